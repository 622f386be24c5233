#pragma once

// Normal form for variable coefficients: pick the point x0 where the gap
// direction lines up with A_n(x0), then l = C(x0)^{-1} with C = sqrt(A)
// makes the coefficients the identity there.

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace blowup {

/// A(x) = A0 + sum_k x_k A_k on the ball |x| <= domain_radius of R^n, with
/// sigma I <= A(x) <= I / sigma checked at construction.
class AffineCoefficientField {
 public:
  /// Throws InvalidArgument (n < 2, sigma outside (0, 1], radius <= 0, or a
  /// non-symmetric matrix), SizeMismatch, and EllipticityViolation when a
  /// sampled point breaks the bounds.
  AffineCoefficientField(Eigen::MatrixXd a0, std::vector<Eigen::MatrixXd> slopes, double sigma,
                         double domain_radius);

  int dim() const noexcept { return static_cast<int>(a0_.rows()); }
  const Eigen::MatrixXd& a0() const noexcept { return a0_; }
  const std::vector<Eigen::MatrixXd>& slopes() const noexcept { return slopes_; }
  double sigma() const noexcept { return sigma_; }
  double domain_radius() const noexcept { return radius_; }

  Eigen::MatrixXd operator()(const Eigen::VectorXd& x) const;
  bool contains(const Eigen::VectorXd& x) const { return x.norm() <= radius_ * (1.0 + 1e-14); }

  /// Coordinates z = L (x - center); the result is again affine, with sigma^2
  /// and the largest ball about z = 0 that stays inside the original domain.
  AffineCoefficientField transformed(const Eigen::MatrixXd& l, const Eigen::VectorXd& center) const;

 private:
  Eigen::MatrixXd a0_;
  std::vector<Eigen::MatrixXd> slopes_;
  double sigma_;
  double radius_;
};

/// Unique SPD square root via the symmetric eigendecomposition. Throws
/// NotPositiveDefinite.
Eigen::MatrixXd matrix_sqrt_spd(const Eigen::MatrixXd& a);

/// R = sqrt(n - 1) eps / (2 sigma^2).
double confinement_radius(const AffineCoefficientField& field, double eps);

/// T(y) = -(eps/2) (A_n(y, 0))' / A^{nn}(y, 0) for y in R^{n-1}.
Eigen::VectorXd reduction_map(const AffineCoefficientField& field, double eps, const Eigen::VectorXd& y);

struct ReductionResult {
  /// (y*, 0)
  Eigen::VectorXd x0;
  /// C(x0)^{-1}
  Eigen::MatrixXd transform;
  double residual = 0.0;
  int iterations = 0;
  /// Part of x0 - e_n eps/2 orthogonal to A_n(x0).
  double collinearity_residual = 0.0;
  double R = 0.0;
};

/// Plain iteration y <- T(y) from 0. Throws InvalidArgument (eps <= 0),
/// NoConvergence when max_iter runs out, EllipticityViolation when an
/// iterate leaves the validated ball.
ReductionResult fixed_point_x0(const AffineCoefficientField& field, double eps, double tol = 1e-13,
                               int max_iter = 10000);

/// Q C(x0)^{-1} with Q orthogonal and Q C_n parallel to e_n, so the gap stays
/// vertical after the change of variables. Still maps A(x0) to I.
Eigen::MatrixXd aligned_transform(const AffineCoefficientField& field, const Eigen::VectorXd& x0);

struct SelfMapReport {
  bool ok = true;
  int samples = 0;
  double max_ratio = 0.0;  // max |T y| / R
  std::string detail;
};

/// |T y| <= R at `samples` Halton points of the closed ball of radius R.
SelfMapReport self_map_check(const AffineCoefficientField& field, double eps, int samples);

/// Radical-inverse Halton points, component d using the d-th prime.
double halton(int index, int base);

}  // namespace blowup
