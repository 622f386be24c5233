#include "blowup/anisotropy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "blowup/errors.hpp"

namespace blowup {

AnisotropyMatrix AnisotropyMatrix::normalize(std::span<const double> raw_diag, int n) {
  if (n < 3) {
    throw Error(ErrorKind::UnsupportedDimension, "ambient dimension must be at least 3, got " +
                                                     std::to_string(n));
  }
  if (raw_diag.size() != static_cast<std::size_t>(n - 1)) {
    throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(n - 1) +
                                                  " diagonal entries, got " +
                                                  std::to_string(raw_diag.size()));
  }
  std::vector<double> a(raw_diag.begin(), raw_diag.end());
  for (double v : a) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::NonPositiveEntry, "curvature entries must be finite and positive");
    }
  }
  std::sort(a.begin(), a.end(), std::greater<>());
  return AnisotropyMatrix(n, std::move(a));
}

AnisotropyMatrix AnisotropyMatrix::scaled(double c) const {
  std::vector<double> a = entries_;
  for (double& v : a) v *= c;
  return normalize(a, dim_);
}

double AnisotropyMatrix::weight(std::span<const double> xi) const {
  if (xi.size() != entries_.size()) {
    throw Error(ErrorKind::SizeMismatch, "point has wrong number of coordinates");
  }
  double s = 0.0;
  for (std::size_t j = 0; j < xi.size(); ++j) s += entries_[j] * xi[j] * xi[j];
  return s;
}

double AnisotropyMatrix::weight_at_angle(double theta) const {
  if (dim_ != 3) throw Error(ErrorKind::WrongDimension, "angular weight needs n = 3");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return entries_[0] * c * c + entries_[1] * s * s;
}

double AnisotropyMatrix::beta() const {
  if (dim_ != 3) throw Error(ErrorKind::WrongDimension, "beta is defined for n = 3 only");
  return (entries_[0] - entries_[1]) / (entries_[0] + entries_[1]);
}

double alpha_of_lambda(double lambda, int n) {
  if (lambda < 0.0 || std::isnan(lambda)) {
    throw Error(ErrorKind::NegativeLambda, "lambda must be nonnegative");
  }
  if (n < 3) throw Error(ErrorKind::UnsupportedDimension, "n must be at least 3");
  const double b = static_cast<double>(n - 1);
  return 2.0 * lambda / (b + std::sqrt(b * b + 4.0 * lambda));
}

AnalyticBounds analytic_bounds(const AnisotropyMatrix& m) {
  AnalyticBounds out;
  out.upper_n_minus_2 = static_cast<double>(m.dim() - 2);
  if (m.dim() == 3) {
    const double a1 = m[0];
    const double a2 = m[1];
    out.mu_upper_rational = (a1 + 3.0 * a2) / (3.0 * a1 + a2);
    const double beta_tilde = (a2 - a1) / (a1 + a2);
    out.sqrt_envelope = std::make_pair(beta_tilde, std::sqrt(1.0 + beta_tilde));
  }
  return out;
}

ExponentReport make_exponent_report(const AnisotropyMatrix& m, double lambda1, int multiplicity,
                                    SolverMeta meta, double bound_slack) {
  ExponentReport r;
  r.dim = m.dim();
  r.lambda1 = lambda1;
  r.alpha = alpha_of_lambda(lambda1, m.dim());
  r.blowup_exponent = r.alpha - 1.0;
  r.epsilon_exponent = 0.5 * r.blowup_exponent;
  r.multiplicity = multiplicity;
  r.bounds = analytic_bounds(m);
  r.solver_meta = std::move(meta);
  r.below_upper_bound = lambda1 <= r.bounds.upper_n_minus_2 + bound_slack;
  r.below_rational_bound =
      !r.bounds.mu_upper_rational || lambda1 <= *r.bounds.mu_upper_rational + bound_slack;
  return r;
}

}  // namespace blowup
