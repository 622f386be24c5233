#include "blowup/coeff_reduction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "blowup/errors.hpp"

namespace blowup {
namespace {

constexpr std::array<int, 12> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

bool symmetric(const Eigen::MatrixXd& a) {
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, a.cwiseAbs().maxCoeff());
}

// Deterministic points of the unit ball: Halton in the cube, kept if inside,
// plus the same directions pushed to the sphere (extreme eigenvalues of an
// affine field sit on the boundary).
std::vector<Eigen::VectorXd> ball_samples(int n, int count) {
  std::vector<Eigen::VectorXd> pts;
  pts.push_back(Eigen::VectorXd::Zero(n));
  for (int k = 0; k < n; ++k) {
    pts.push_back(Eigen::VectorXd::Unit(n, k));
    pts.push_back(-Eigen::VectorXd::Unit(n, k));
  }
  int kept = 0;
  for (int idx = 1; kept < count && idx < 64 * count; ++idx) {
    Eigen::VectorXd p(n);
    for (int d = 0; d < n; ++d) p(d) = 2.0 * halton(idx, kPrimes[d % kPrimes.size()]) - 1.0;
    const double r = p.norm();
    if (r > 1.0 || r == 0.0) continue;
    pts.push_back(p);
    pts.push_back(p / r);
    ++kept;
  }
  return pts;
}

}  // namespace

double halton(int index, int base) {
  double f = 1.0;
  double r = 0.0;
  for (int i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

AffineCoefficientField::AffineCoefficientField(Eigen::MatrixXd a0, std::vector<Eigen::MatrixXd> slopes,
                                               double sigma, double domain_radius)
    : a0_(std::move(a0)), slopes_(std::move(slopes)), sigma_(sigma), radius_(domain_radius) {
  const int n = static_cast<int>(a0_.rows());
  if (n < 2 || a0_.cols() != n) throw Error(ErrorKind::InvalidArgument, "A0 must be square with n >= 2");
  if (static_cast<int>(slopes_.size()) != n) {
    throw Error(ErrorKind::SizeMismatch, "need one slope matrix per coordinate");
  }
  if (!(sigma_ > 0.0 && sigma_ <= 1.0)) throw Error(ErrorKind::InvalidArgument, "sigma must lie in (0, 1]");
  if (!(radius_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "domain radius must be positive");
  if (!symmetric(a0_)) throw Error(ErrorKind::InvalidArgument, "A0 is not symmetric");
  for (const auto& s : slopes_) {
    if (s.rows() != n || s.cols() != n) throw Error(ErrorKind::SizeMismatch, "slope matrix has wrong shape");
    if (!symmetric(s)) throw Error(ErrorKind::InvalidArgument, "slope matrix is not symmetric");
  }
  for (const auto& p : ball_samples(n, 256)) {
    const Eigen::VectorXd x = radius_ * p;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig((*this)(x), Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues()(0);
    const double hi = eig.eigenvalues()(n - 1);
    if (lo < sigma_ || hi > 1.0 / sigma_) {
      std::ostringstream os;
      os << "eigenvalues [" << lo << ", " << hi << "] at |x| = " << x.norm() << " leave [" << sigma_
         << ", " << 1.0 / sigma_ << "]";
      throw Error(ErrorKind::EllipticityViolation, os.str());
    }
  }
}

Eigen::MatrixXd AffineCoefficientField::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw Error(ErrorKind::SizeMismatch, "point has wrong dimension");
  Eigen::MatrixXd a = a0_;
  for (int k = 0; k < dim(); ++k) a += x(k) * slopes_[k];
  return a;
}

AffineCoefficientField AffineCoefficientField::transformed(const Eigen::MatrixXd& l,
                                                           const Eigen::VectorXd& center) const {
  // A~(z) = L A(center + L^{-1} z) L^T.
  const int n = dim();
  const Eigen::MatrixXd inv = l.inverse();
  Eigen::MatrixXd b0 = l * (*this)(center) * l.transpose();
  std::vector<Eigen::MatrixXd> bs(n, Eigen::MatrixXd::Zero(n, n));
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) bs[j] += inv(k, j) * slopes_[k];
    bs[j] = l * bs[j] * l.transpose();
    bs[j] = 0.5 * (bs[j] + bs[j].transpose());
  }
  b0 = 0.5 * (b0 + b0.transpose());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(inv);
  const double stretch = svd.singularValues()(0);
  const double r = (radius_ - center.norm()) / stretch;
  if (!(r > 0.0)) throw Error(ErrorKind::EllipticityViolation, "center lies outside the validated ball");
  // Eigenvalues of L A L^T for L = Q C^{-1} lie in [sigma^2, sigma^-2].
  return AffineCoefficientField(std::move(b0), std::move(bs), sigma_ * sigma_, r);
}

Eigen::MatrixXd matrix_sqrt_spd(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::SizeMismatch, "matrix must be square");
  if (!symmetric(a)) throw Error(ErrorKind::NotPositiveDefinite, "matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  if (eig.info() != Eigen::Success || !(eig.eigenvalues()(0) > 0.0)) {
    throw Error(ErrorKind::NotPositiveDefinite, "smallest eigenvalue is not positive");
  }
  const Eigen::MatrixXd c =
      eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (c + c.transpose());
}

double confinement_radius(const AffineCoefficientField& field, double eps) {
  const double s = field.sigma();
  return std::sqrt(static_cast<double>(field.dim() - 1)) * eps / (2.0 * s * s);
}

Eigen::VectorXd reduction_map(const AffineCoefficientField& field, double eps, const Eigen::VectorXd& y) {
  const int n = field.dim();
  if (y.size() != n - 1) throw Error(ErrorKind::SizeMismatch, "y must have n - 1 components");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  x.head(n - 1) = y;
  const Eigen::MatrixXd a = field(x);
  // + 0.0 keeps exact zeros unsigned in reports.
  return (-(0.5 * eps / a(n - 1, n - 1)) * a.col(n - 1).head(n - 1)).array() + 0.0;
}

ReductionResult fixed_point_x0(const AffineCoefficientField& field, double eps, double tol, int max_iter) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  const int n = field.dim();
  ReductionResult out;
  out.R = confinement_radius(field, eps);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n - 1);
  bool converged = false;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd next = reduction_map(field, eps, y);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    x.head(n - 1) = next;
    if (!field.contains(x)) {
      throw Error(ErrorKind::EllipticityViolation, "iterate left the validated ball");
    }
    const double step = (next - y).norm();
    y = next;
    out.iterations = it;
    if (step < tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorKind::NoConvergence, "no fixed point after " + std::to_string(max_iter) + " iterations");
  }
  out.x0 = Eigen::VectorXd::Zero(n);
  out.x0.head(n - 1) = y;
  out.residual = (reduction_map(field, eps, y) - y).norm();
  const Eigen::MatrixXd a = field(out.x0);
  out.transform = matrix_sqrt_spd(a).inverse();
  Eigen::VectorXd v = out.x0;
  v(n - 1) -= 0.5 * eps;
  const Eigen::VectorXd u = a.col(n - 1).normalized();
  out.collinearity_residual = (v - v.dot(u) * u).norm();
  return out;
}

Eigen::MatrixXd aligned_transform(const AffineCoefficientField& field, const Eigen::VectorXd& x0) {
  const int n = field.dim();
  const Eigen::MatrixXd c = matrix_sqrt_spd(field(x0));
  // Householder reflection sending C_n / |C_n| to e_n.
  const Eigen::VectorXd u = c.col(n - 1).normalized();
  Eigen::VectorXd w = u - Eigen::VectorXd::Unit(n, n - 1);
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
  if (w.norm() > 1e-15) {
    w.normalize();
    q -= 2.0 * w * w.transpose();
  }
  return q * c.inverse();
}

SelfMapReport self_map_check(const AffineCoefficientField& field, double eps, int samples) {
  SelfMapReport rep;
  const int n = field.dim();
  const double R = confinement_radius(field, eps);
  for (const auto& p : ball_samples(n - 1, std::max(samples, 0))) {
    if (rep.samples >= samples) break;
    const Eigen::VectorXd y = R * p;
    const double ratio = reduction_map(field, eps, y).norm() / R;
    ++rep.samples;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (ratio > 1.0 + 1e-14) {
      std::ostringstream os;
      os << "|T y| = " << ratio * R << " > R = " << R << " at |y| = " << y.norm();
      rep.ok = false;
      rep.detail = os.str();
      return rep;
    }
  }
  return rep;
}

}  // namespace blowup
