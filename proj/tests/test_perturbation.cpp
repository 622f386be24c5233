#include <doctest.h>

#include <cmath>

#include "blowup/circle_spectrum.hpp"
#include "blowup/perturbation.hpp"
#include "blowup/sphere_spectrum.hpp"
#include "test_util.hpp"

using namespace blowup;

namespace {

double sphere_direct(double a1, double a2, double a3) {
  SphereSolveOptions o;
  o.check_convergence = false;
  return solve_lambda1_sphere(AnisotropyMatrix::normalize({a1, a2, a3}, 4), 16, o).lambda1;
}

}  // namespace

TEST_SUITE("perturbation") {

TEST_CASE("constant perturbation has no first-order effect") {
  for (int n : {3, 4}) {
    const auto s = make_perturbation_setup(n, std::vector<double>(n - 1, 0.7));
    for (std::size_t j = 0; j < s.base_functions.size(); ++j) {
      CHECK(std::abs(first_order_coefficient(s, static_cast<int>(j))) < 1e-12);
    }
  }
}

TEST_CASE("zero perturbation") {
  const auto s = make_perturbation_setup(4, {0.0, 0.0, 0.0});
  const auto r = second_order_coefficient(s, 0);
  CHECK(r.c1 == doctest::Approx(0.0));
  CHECK(std::abs(r.c2) < 1e-14);
  CHECK(r.v1.norm() < 1e-14);
  const auto p = predict_lambda1(s, 0.0);
  for (double v : p.second_order) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("base space has property O") {
  const auto s3 = make_perturbation_setup(3, {1.0, -1.0});
  CHECK(s3.lambda_base == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s3.base_functions.size() == 2);
  const auto s4 = make_perturbation_setup(4, {1.0, 0.0, 0.0});
  CHECK(s4.lambda_base == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s4.base_functions.size() == 3);
  for (int axis = 0; axis < 3; ++axis) CHECK(base_index_for_axis(s4, axis) >= 0);
}

TEST_CASE("n = 3, b = cos 2t: series against direct solves") {
  const auto s = make_perturbation_setup(3, {1.0, -1.0});
  // The x_2-odd function sin t sees beta~ = +eps.
  const auto r = second_order_coefficient(s, base_index_for_axis(s, 1));
  CHECK(r.c1 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.rhs_orthogonality < 1e-9);
  double prev1 = 0.0, prev2 = 0.0;
  for (double eps : {0.04, 0.02, 0.01}) {
    const double d = solve_dirichlet_mu1({eps, 512}).mu1;
    const double e1 = std::abs(d - (1.0 + eps * r.c1));
    const double e2 = std::abs(d - (1.0 + eps * r.c1 + eps * eps * r.c2));
    if (prev1 > 0.0) {
      CHECK(prev1 / e1 == doctest::Approx(4.0).epsilon(0.1));
      CHECK(prev2 / e2 == doctest::Approx(8.0).epsilon(0.15));
    }
    prev1 = e1;
    prev2 = e2;
  }
  const double pred = predict_lambda1(s, -0.3).min_second_order;
  CHECK(std::abs(pred - solve_dirichlet_mu1({-0.3, 512}).mu1) < 0.01);
}

TEST_CASE("n = 4, b = diag(1, 0, 0)") {
  const auto s = make_perturbation_setup(4, {1.0, 0.0, 0.0});
  const int j = base_index_for_axis(s, 0);
  const auto r = second_order_coefficient(s, j);
  // Finite-difference slope, Richardson-extrapolated.
  const double d1 = (sphere_direct(1.02, 1.0, 1.0) - 2.0) / 0.02;
  const double d2 = (sphere_direct(1.01, 1.0, 1.0) - 2.0) / 0.01;
  CHECK(r.c1 == doctest::Approx(2.0 * d2 - d1).epsilon(1e-3));
  const double direct = sphere_direct(1.05, 1.0, 1.0);
  const auto p = predict_lambda1(s, 0.05);
  CHECK(std::abs(p.min_second_order - direct) < 1e-4);
  // The minimizing branch has the parity of the direct eigenvector.
  SphereSolveOptions o;
  o.check_convergence = false;
  const auto res = solve_lambda1_sphere(AnisotropyMatrix::normalize({1.05, 1.0, 1.0}, 4), 16, o);
  REQUIRE(res.multiplicity == 1);
  REQUIRE(res.parity_signatures[0]);
  CHECK((*res.parity_signatures[0])[s.odd_axis[p.argmin]] == -1);
}

TEST_CASE("v1 is orthogonal to the base space and keeps parity") {
  for (int n : {3, 4}) {
    const auto s = make_perturbation_setup(n, n == 3 ? std::vector<double>{1.0, -1.0} : std::vector<double>{1.0, 0.3, -0.5});
    for (std::size_t j = 0; j < s.base_functions.size(); ++j) {
      const auto r = second_order_coefficient(s, static_cast<int>(j));
      for (const auto& f : s.base_functions) CHECK(std::abs(r.v1.dot(s.base_pencil.mass * f)) < 1e-10);
      const auto sig = parity_signature(r.v1, s.basis);
      if (r.v1.norm() > 1e-12) {
        REQUIRE(sig);
        const auto base = parity_signature(s.base_functions[j], s.basis);
        CHECK(*sig == *base);
      }
      CHECK(r.condition_number < 1e12);
    }
  }
}

TEST_CASE("c1 equals the pencil derivative of the Rayleigh quotient") {
  const auto s = make_perturbation_setup(4, {0.4, -0.2, 1.0});
  for (std::size_t j = 0; j < s.base_functions.size(); ++j) {
    const auto& f = s.base_functions[j];
    const double rq = f.dot((s.b_pencil.stiffness - s.lambda_base * s.b_pencil.mass) * f) / f.dot(s.base_pencil.mass * f);
    CHECK(std::abs(first_order_coefficient(s, static_cast<int>(j)) - rq) < 1e-10);
  }
}

TEST_CASE("input validation") {
  CHECK(error_kind([] { make_perturbation_setup(5, {1.0, 0.0, 0.0, 0.0}); }) == ErrorKind::UnsupportedDimension);
  CHECK(error_kind([] { make_perturbation_setup(4, {1.0, 0.0}); }) == ErrorKind::SizeMismatch);
  const auto s = make_perturbation_setup(3, {1.0, -1.0});
  CHECK(error_kind([&] { predict_lambda1(s, 1.5); }) == ErrorKind::InvalidArgument);
}

}
