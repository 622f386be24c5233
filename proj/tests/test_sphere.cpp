#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "blowup/exponent.hpp"
#include "blowup/sphere_spectrum.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace blowup;

namespace {

SphereSolveOptions unchecked() {
  SphereSolveOptions o;
  o.check_convergence = false;
  return o;
}

int odd_count(const std::array<int, 3>& sig) { return static_cast<int>(std::count(sig.begin(), sig.end(), -1)); }

}  // namespace

TEST_SUITE("sphere") {

TEST_CASE("quadrature integrates the basis exactly") {
  const auto basis = HarmonicBasis::sphere(12);
  CHECK((basis.gram() - Eigen::MatrixXd::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("isotropic pencil") {
  const auto basis = HarmonicBasis::sphere(8);
  const auto pencil = assemble_pencil(AnisotropyMatrix::normalize({1.0, 1.0, 1.0}, 4), basis);
  CHECK((pencil.mass - Eigen::MatrixXd::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff() < 1e-12);
  for (int p = 0; p < basis.size(); ++p) {
    const int l = basis.degree(p);
    for (int q = 0; q < basis.size(); ++q) {
      const double expect = p == q ? l * (l + 1.0) : 0.0;
      CHECK(std::abs(pencil.stiffness(p, q) - expect) < 1e-11);
    }
  }
}

TEST_CASE("selection-rule assembly matches dense quadrature") {
  const auto basis = HarmonicBasis::sphere(10);
  const auto m = AnisotropyMatrix::normalize({2.0, 1.0, 1.0}, 4);
  const auto pencil = assemble_pencil(m, basis);
  const auto dense = oracle::dense_pencil(basis, [&](const double* x) {
    return m[0] * x[0] * x[0] + m[1] * x[1] * x[1] + m[2] * x[2] * x[2];
  });
  CHECK((pencil.mass - dense.mass).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((pencil.stiffness - dense.stiffness).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((pencil.stiffness - pencil.stiffness.transpose()).cwiseAbs().maxCoeff() < 1e-13);
  // Y_00 couples to Y_20 through the weight.
  CHECK(std::abs(pencil.mass(0, 6)) > 1e-3);
  Eigen::LLT<Eigen::MatrixXd> llt(pencil.mass);
  CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("isotropic lambda1 and its eigenspace") {
  const auto r = solve_lambda1_sphere(AnisotropyMatrix::normalize({1.0, 1.0, 1.0}, 4), 8);
  CHECK(std::abs(r.lambda1 - 2.0) < 1e-6);
  CHECK(r.multiplicity == 3);
  // The cluster spans the degree-1 harmonics x_1, x_2, x_3.
  const auto basis = HarmonicBasis::sphere(8);
  for (const auto& v : r.eigenvectors) {
    double outside = 0.0;
    for (int p = 0; p < basis.size(); ++p) {
      if (basis.degree(p) != 1) outside = std::max(outside, std::abs(v(p)));
    }
    CHECK(outside < 1e-10);
  }
  CHECK(r.constant_mode_overlap < 1e-10);
}

TEST_CASE("property O near the identity") {
  const auto r = solve_lambda1_sphere(AnisotropyMatrix::normalize({1.05, 1.0, 0.95}, 4), 12);
  CHECK(r.lambda1 < 2.0);
  REQUIRE(!r.parity_signatures.empty());
  for (const auto& sig : r.parity_signatures) {
    REQUIRE(sig.has_value());
    CHECK(odd_count(*sig) == 1);
  }
}

TEST_CASE("cluster eigenvectors are weighted-orthonormal") {
  const auto m = AnisotropyMatrix::normalize({1.0, 1.0, 1.0}, 4);
  const auto basis = HarmonicBasis::sphere(16);
  const auto r = solve_lambda1_sphere(m, 16);
  for (std::size_t i = 0; i < r.eigenvectors.size(); ++i) {
    for (std::size_t j = 0; j < r.eigenvectors.size(); ++j) {
      const double ip = weighted_inner_product(r.eigenvectors[i], r.eigenvectors[j], m, basis);
      CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
  }
}

TEST_CASE("anisotropy trend") {
  const double l10 = solve_lambda1_sphere(AnisotropyMatrix::normalize({10.0, 1.0, 1.0}, 4), 24, unchecked()).lambda1;
  const double l100 = solve_lambda1_sphere(AnisotropyMatrix::normalize({100.0, 1.0, 1.0}, 4), 24, unchecked()).lambda1;
  CHECK(l100 < l10);
  CHECK(l10 < 2.0);
}

TEST_CASE("invariances and Galerkin monotonicity") {
  const double base = solve_lambda1_sphere(AnisotropyMatrix::normalize({2.0, 1.0, 0.5}, 4), 16, unchecked()).lambda1;
  for (double c : {0.01, 100.0}) {
    const double l = solve_lambda1_sphere(AnisotropyMatrix::normalize({2.0 * c, c, 0.5 * c}, 4), 16, unchecked()).lambda1;
    CHECK(std::abs(l - base) < 1e-10);
  }
  double prev = 1e300;
  for (int degree : {4, 8, 12, 16, 20}) {
    const double l = solve_lambda1_sphere(AnisotropyMatrix::normalize({5.0, 2.0, 1.0}, 4), degree, unchecked()).lambda1;
    CHECK(l <= prev + 1e-12);
    prev = l;
  }
}

TEST_CASE("coordinate trial functions bound lambda1 from above") {
  const auto m = AnisotropyMatrix::normalize({3.0, 1.5, 1.0}, 4);
  const auto basis = HarmonicBasis::sphere(16);
  const auto pencil = assemble_pencil(m, basis);
  const double l1 = solve_lambda1_sphere(m, 16).lambda1;
  for (int axis = 0; axis < 3; ++axis) {
    const Eigen::VectorXd u = basis.coordinate_function(axis);
    CHECK(u.dot(pencil.stiffness * u) / u.dot(pencil.mass * u) >= l1 - 1e-12);
  }
}

TEST_CASE("weighted inner product") {
  const auto basis = HarmonicBasis::sphere(6);
  const auto iso = AnisotropyMatrix::normalize({1.0, 1.0, 1.0}, 4);
  const auto m = AnisotropyMatrix::normalize({3.0, 2.0, 0.5}, 4);
  Eigen::VectorXd one = Eigen::VectorXd::Zero(basis.size());
  one(0) = 1.0;
  CHECK(weighted_inner_product(one, one, iso, basis) == doctest::Approx(1.0).epsilon(1e-14));
  const Eigen::VectorXd x1 = basis.coordinate_function(0);
  const Eigen::VectorXd x2 = basis.coordinate_function(1);
  CHECK(std::abs(weighted_inner_product(x1, x2, m, basis)) < 1e-15);
  Eigen::VectorXd y1 = Eigen::VectorXd::Zero(basis.size());
  y1(basis.coordinate_index(0)) = 1.0;
  CHECK(weighted_inner_product(y1, y1, iso, basis) == doctest::Approx(1.0).epsilon(1e-14));
  // x_1 itself: avg(x_1^2) = 1/3.
  CHECK(weighted_inner_product(x1, x1, iso, basis) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(error_kind([&] { weighted_inner_product(one.head(3), one, iso, basis); }) == ErrorKind::SizeMismatch);
}

TEST_CASE("dimension handling") {
  CHECK(error_kind([] { solve_lambda1_sphere(AnisotropyMatrix::normalize({1.0, 2.0}, 3)); }) ==
        ErrorKind::WrongDimension);
  CHECK(error_kind([] { solve_lambda1_sphere(AnisotropyMatrix::normalize({1.0, 2.0, 3.0, 4.0}, 5)); }) ==
        ErrorKind::UnsupportedDimension);
  CHECK(error_kind([] { solve_lambda1_sphere(AnisotropyMatrix::normalize({1.0, 1.0, 1.0}, 4), 3); }) ==
        ErrorKind::InvalidArgument);
  CHECK(error_kind([] { assemble_pencil(AnisotropyMatrix::normalize({1.0, 2.0}, 3), HarmonicBasis::sphere(4)); }) ==
        ErrorKind::WrongDimension);
}

TEST_CASE("convergence check") {
  // Strong anisotropy is not resolved at degree 16: the contract is to refuse.
  CHECK(error_kind([] { solve_lambda1_sphere(AnisotropyMatrix::normalize({100.0, 1.0, 1.0}, 4), 16); }) ==
        ErrorKind::NotConverged);
  const auto r = solve_lambda1_sphere(AnisotropyMatrix::normalize({2.0, 1.0, 1.0}, 4), 16);
  CHECK(r.relative_change <= 1e-7);
  // The adaptive driver raises the degree until it settles.
  AdaptiveSphereOptions o;
  const auto a = solve_lambda1_sphere_adaptive(AnisotropyMatrix::normalize({10.0, 1.0, 1.0}, 4), o);
  CHECK(a.relative_change <= 1e-7);
  CHECK(a.max_degree > 16);
  CHECK(a.lambda1 == doctest::Approx(0.6658427935).epsilon(2e-7));
}

TEST_CASE("exponent routing") {
  const auto r4 = compute_exponent(AnisotropyMatrix::normalize({1.0, 1.0, 1.0}, 4));
  CHECK(r4.lambda1 == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(r4.alpha == doctest::Approx((std::sqrt(17.0) - 3.0) / 2.0).epsilon(1e-10));
  CHECK(r4.multiplicity == 3);
  const auto r3 = compute_exponent(AnisotropyMatrix::normalize({1.0, 1.0}, 3));
  CHECK(r3.blowup_exponent == doctest::Approx(std::sqrt(2.0) - 2.0).epsilon(1e-10));
  CHECK(r3.epsilon_exponent == doctest::Approx((std::sqrt(2.0) - 2.0) / 2.0).epsilon(1e-10));
  CHECK(error_kind([] { compute_exponent(AnisotropyMatrix::normalize({1.0, 1.0, 1.0, 1.0}, 5)); }) ==
        ErrorKind::UnsupportedDimension);
}

}
