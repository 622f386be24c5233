#include <doctest.h>

#include <cmath>

#include "blowup/coeff_reduction.hpp"
#include "test_util.hpp"

using namespace blowup;

namespace {

// I + s x_1 (e_1 e_n^T + e_n e_1^T)
AffineCoefficientField shear_field(int n, double s, double sigma = 0.5) {
  std::vector<Eigen::MatrixXd> slopes(n, Eigen::MatrixXd::Zero(n, n));
  slopes[0](0, n - 1) = slopes[0](n - 1, 0) = s;
  return AffineCoefficientField(Eigen::MatrixXd::Identity(n, n), slopes, sigma, 1.0);
}

AffineCoefficientField tilted_field() {
  Eigen::MatrixXd a0(3, 3);
  a0 << 1.0, 0.0, 0.2, 0.0, 1.0, 0.1, 0.2, 0.1, 1.2;
  std::vector<Eigen::MatrixXd> slopes(3, Eigen::MatrixXd::Zero(3, 3));
  slopes[0](0, 2) = slopes[0](2, 0) = 0.1;
  slopes[1] = 0.05 * Eigen::MatrixXd::Identity(3, 3);
  slopes[2](0, 1) = slopes[2](1, 0) = 0.02;
  return AffineCoefficientField(a0, slopes, 0.5, 1.0);
}

}  // namespace

TEST_SUITE("reduction") {

TEST_CASE("SPD square root") {
  CHECK((matrix_sqrt_spd(Eigen::Matrix3d::Identity()) - Eigen::Matrix3d::Identity()).norm() < 1e-15);
  Eigen::Matrix2d d;
  d << 4, 0, 0, 9;
  Eigen::Matrix2d expect;
  expect << 2, 0, 0, 3;
  CHECK((matrix_sqrt_spd(d) - expect).norm() < 1e-15);
  Eigen::Matrix2d a;
  a << 2, 1, 1, 2;
  const Eigen::MatrixXd c = matrix_sqrt_spd(a);
  CHECK((c * c - a).norm() / a.norm() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  CHECK(eig.eigenvalues()(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eig.eigenvalues()(1) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  Eigen::Matrix2d bad;
  bad << 1, 2, 2, 1;
  CHECK(error_kind([&] { matrix_sqrt_spd(bad); }) == ErrorKind::NotPositiveDefinite);
}

TEST_CASE("constant diagonal field") {
  Eigen::MatrixXd a0 = Eigen::MatrixXd::Zero(3, 3);
  a0.diagonal() << 1.5, 0.8, 1.2;
  const AffineCoefficientField f(a0, std::vector<Eigen::MatrixXd>(3, Eigen::MatrixXd::Zero(3, 3)), 0.5, 1.0);
  const auto r = fixed_point_x0(f, 0.01);
  CHECK(r.x0.norm() == 0.0);
  for (int i = 0; i < 3; ++i) CHECK(r.transform(i, i) == doctest::Approx(1.0 / std::sqrt(a0(i, i))).epsilon(1e-15));
  CHECK(self_map_check(f, 0.01, 64).ok);
  CHECK(self_map_check(f, 0.01, 64).max_ratio == 0.0);
}

TEST_CASE("shear field, n = 3") {
  const auto f = shear_field(3, 0.1);
  const double eps = 0.01;
  const auto r = fixed_point_x0(f, eps);
  // y = -(eps/2) 0.1 y / A^nn with A^nn = 1 forces y = 0.
  CHECK(r.x0.norm() < 1e-15);
  CHECK(r.residual < 1e-12);
  CHECK(r.x0.head(2).norm() <= r.R + 1e-14);
  CHECK(r.R == doctest::Approx(std::sqrt(2.0) * eps / (2 * 0.25)));
  CHECK(r.collinearity_residual < 1e-10);
  const Eigen::MatrixXd b = r.transform * f(r.x0) * r.transform.transpose();
  CHECK((b - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(self_map_check(f, eps, 256).ok);
}

TEST_CASE("tilted field: closed-form fixed point") {
  const auto f = tilted_field();
  const double eps = 0.05;
  const auto r = fixed_point_x0(f, eps);
  CHECK(r.x0.norm() > 1e-3);
  CHECK(r.residual < 1e-12);
  CHECK(r.collinearity_residual < 1e-10);
  CHECK(r.x0.head(2).norm() <= r.R + 1e-14);
  CHECK(r.x0(2) == 0.0);
  // With x = (y1, y2, 0): A_n' = (0.2 + 0.1 y1, 0.1), A^nn = 1.2 + 0.05 y2.
  // y2 = -(eps/2) 0.1 / (1.2 + 0.05 y2) is a quadratic; y1 is then linear.
  const double h = eps / 2;
  const double y2 = (-1.2 + std::sqrt(1.44 - 4 * 0.05 * h * 0.1)) / (2 * 0.05);
  const double ann = 1.2 + 0.05 * y2;
  const double y1 = -h * 0.2 / (ann + h * 0.1);
  CHECK(r.x0(0) == doctest::Approx(y1).epsilon(1e-12));
  CHECK(r.x0(1) == doctest::Approx(y2).epsilon(1e-12));
  const Eigen::MatrixXd b = r.transform * f(r.x0) * r.transform.transpose();
  CHECK((b - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("reduction is idempotent") {
  const auto f = tilted_field();
  const auto r = fixed_point_x0(f, 0.05);
  const Eigen::MatrixXd l = aligned_transform(f, r.x0);
  CHECK((l * f(r.x0) * l.transpose() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  // l C = Q sends the last column of C(x0) to a multiple of e_n.
  const Eigen::MatrixXd c = matrix_sqrt_spd(f(r.x0));
  const Eigen::VectorXd image = l * c * c.col(2);
  CHECK(image.head(2).norm() < 1e-14);
  CHECK(image(2) > 0.0);
  const auto moved = f.transformed(l, r.x0);
  CHECK(moved.sigma() == doctest::Approx(0.25));
  CHECK((moved.a0() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(fixed_point_x0(moved, 0.05).x0.norm() < 1e-13);
}

TEST_CASE("higher dimension") {
  const auto f = shear_field(5, 0.2);
  const auto r = fixed_point_x0(f, 0.02);
  CHECK(r.residual < 1e-12);
  CHECK(r.R == doctest::Approx(std::sqrt(4.0) * 0.02 / (2 * 0.25)));
  CHECK(self_map_check(f, 0.02, 128).ok);
}

TEST_CASE("field validation and iteration failures") {
  // sigma I <= A fails: A0 has eigenvalue 0.3 < 0.5.
  Eigen::MatrixXd a0 = Eigen::MatrixXd::Identity(3, 3);
  a0(1, 1) = 0.3;
  const std::vector<Eigen::MatrixXd> zero(3, Eigen::MatrixXd::Zero(3, 3));
  CHECK(error_kind([&] { AffineCoefficientField(a0, zero, 0.5, 1.0); }) == ErrorKind::EllipticityViolation);
  // Ellipticity lost only at the edge of the ball.
  std::vector<Eigen::MatrixXd> steep(3, Eigen::MatrixXd::Zero(3, 3));
  steep[2] = 0.8 * Eigen::MatrixXd::Identity(3, 3);
  CHECK(error_kind([&] { AffineCoefficientField(Eigen::MatrixXd::Identity(3, 3), steep, 0.5, 1.0); }) ==
        ErrorKind::EllipticityViolation);
  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(3, 3);
  asym(0, 1) = 0.1;
  CHECK(error_kind([&] { AffineCoefficientField(asym, zero, 0.5, 1.0); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([&] { AffineCoefficientField(Eigen::MatrixXd::Identity(3, 3), {}, 0.5, 1.0); }) ==
        ErrorKind::SizeMismatch);
  CHECK(error_kind([&] { AffineCoefficientField(Eigen::MatrixXd::Identity(3, 3), zero, 1.5, 1.0); }) ==
        ErrorKind::InvalidArgument);

  const auto f = tilted_field();
  CHECK(error_kind([&] { fixed_point_x0(f, 0.05, 1e-13, 2); }) == ErrorKind::NoConvergence);
  CHECK(error_kind([&] { fixed_point_x0(f, 0.0); }) == ErrorKind::InvalidArgument);
  // A tiny validated ball: the first iterate already leaves it.
  Eigen::MatrixXd tilt = Eigen::MatrixXd::Identity(3, 3);
  tilt(0, 2) = tilt(2, 0) = 0.3;
  const AffineCoefficientField small(tilt, zero, 0.5, 1e-4);
  CHECK(error_kind([&] { fixed_point_x0(small, 0.05); }) == ErrorKind::EllipticityViolation);
}

}
