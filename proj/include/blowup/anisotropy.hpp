#pragma once

// Curvature data of two nearly touching inclusions and the quantities derived
// from it directly: the quadratic weight a(xi) on the unit sphere, the map
// from the first nonzero eigenvalue to the radial exponent, and the closed-form
// bounds on that eigenvalue.

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace blowup {

/// Diagonalized relative curvature matrix M = D^2(f-g)(0') in ambient
/// dimension n. Holds the n-1 eigenvalues a_1 >= ... >= a_{n-1} > 0.
/// Full matrices must be rotated to diagonal form by the caller; lambda_1 is
/// invariant under that rotation.
class AnisotropyMatrix {
 public:
  /// Sorts `raw_diag` descending and validates it.
  /// Throws NonPositiveEntry, DimensionMismatch or UnsupportedDimension (n < 3).
  static AnisotropyMatrix normalize(std::span<const double> raw_diag, int n);
  static AnisotropyMatrix normalize(std::initializer_list<double> raw_diag, int n) {
    return normalize(std::span<const double>(raw_diag.begin(), raw_diag.size()), n);
  }

  int dim() const noexcept { return dim_; }
  std::span<const double> entries() const noexcept { return entries_; }
  double largest() const noexcept { return entries_.front(); }
  double smallest() const noexcept { return entries_.back(); }
  double operator[](std::size_t i) const { return entries_[i]; }

  /// Same shape with every entry multiplied by `c` > 0.
  AnisotropyMatrix scaled(double c) const;

  /// a(xi) = sum_j a_j xi_j^2. `xi` must have n-1 components.
  double weight(std::span<const double> xi) const;

  /// n = 3 only: a(cos t, sin t) = a_1 cos^2 t + a_2 sin^2 t.
  double weight_at_angle(double theta) const;

  /// n = 3 only: beta = (a_1 - a_2) / (a_1 + a_2), in [0, 1).
  double beta() const;

 private:
  AnisotropyMatrix(int n, std::vector<double> a) : dim_(n), entries_(std::move(a)) {}

  int dim_;
  std::vector<double> entries_;
};

/// Positive root of alpha^2 + (n-1) alpha - lambda, in the rationalized form
/// 2 lambda / ((n-1) + sqrt((n-1)^2 + 4 lambda)) which keeps full relative
/// accuracy as lambda -> 0. Throws NegativeLambda.
double alpha_of_lambda(double lambda, int n);

/// Closed-form bounds evaluated on the same curvature data.
struct AnalyticBounds {
  /// lambda_1 <= n - 2, equality iff the weight is constant.
  double upper_n_minus_2 = 0.0;
  /// n = 3: (a_1 + 3 a_2) / (3 a_1 + a_2).
  std::optional<double> mu_upper_rational;
  /// n = 3: (beta_tilde, (1 + beta_tilde)^{1/2}) with beta_tilde = -beta.
  /// The multiplicative constants of the two-sided envelope are unknown, so
  /// only the bare power is reported.
  std::optional<std::pair<double, double>> sqrt_envelope;
};

AnalyticBounds analytic_bounds(const AnisotropyMatrix& m);

struct SolverMeta {
  std::string method;
  int resolution = 0;
  bool extrapolated = false;
};

struct ExponentReport {
  int dim = 0;
  double lambda1 = 0.0;
  double alpha = 0.0;
  /// alpha - 1, the power of |x'| in the gradient bound.
  double blowup_exponent = 0.0;
  /// (alpha - 1)/2: the power of eps once |x'| ~ sqrt(eps).
  double epsilon_exponent = 0.0;
  int multiplicity = 1;
  AnalyticBounds bounds;
  SolverMeta solver_meta;
  bool below_upper_bound = true;
  bool below_rational_bound = true;
};

/// Fills the alpha / bound fields of a report from a computed lambda_1.
ExponentReport make_exponent_report(const AnisotropyMatrix& m, double lambda1, int multiplicity,
                                    SolverMeta meta, double bound_slack = 1e-6);

}  // namespace blowup
