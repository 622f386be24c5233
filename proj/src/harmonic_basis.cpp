#include "blowup/harmonic_basis.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "blowup/errors.hpp"

namespace blowup {
namespace {

constexpr double kPi = std::numbers::pi;

// Associated Legendre functions normalized so that sqrt(2 - delta_m0) Q_l^m
// times cos/sin(m phi) has unit mean square on S^2, together with dQ/dtheta.
// Index [l][m] for 0 <= m <= l.
struct LegendreTable {
  std::vector<std::vector<double>> q;
  std::vector<std::vector<double>> dq;
};

LegendreTable legendre_table(int lmax, double t, double s) {
  LegendreTable tab;
  tab.q.assign(lmax + 1, std::vector<double>(lmax + 1, 0.0));
  tab.dq.assign(lmax + 1, std::vector<double>(lmax + 1, 0.0));
  auto& q = tab.q;
  q[0][0] = 1.0;
  for (int m = 1; m <= lmax; ++m) {
    q[m][m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * q[m - 1][m - 1];
  }
  for (int m = 0; m < lmax; ++m) q[m + 1][m] = std::sqrt(2.0 * m + 3.0) * t * q[m][m];
  for (int m = 0; m <= lmax; ++m) {
    for (int l = m + 2; l <= lmax; ++l) {
      const double l2 = static_cast<double>(l) * l;
      const double m2 = static_cast<double>(m) * m;
      const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
      const double b = std::sqrt((2.0 * l + 1.0) * (l - 1.0 - m) * (l - 1.0 + m) /
                                 ((2.0 * l - 3.0) * (l2 - m2)));
      q[l][m] = a * t * q[l - 1][m] - b * q[l - 2][m];
    }
  }
  // d/dtheta P_l^m(cos theta) = (l t P_l^m - (l + m) P_{l-1}^m) / sin theta.
  for (int l = 0; l <= lmax; ++l) {
    for (int m = 0; m <= l; ++m) {
      double prev = 0.0;
      if (l > m) {
        prev = (l + m) * std::sqrt((2.0 * l + 1.0) * (l - m) / ((2.0 * l - 1.0) * (l + m))) *
               q[l - 1][m];
      }
      tab.dq[l][m] = (l * t * q[l][m] - prev) / s;
    }
  }
  return tab;
}

}  // namespace

void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(count, 0.0);
  weights.assign(count, 0.0);
  for (int i = 0; i < count; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (count + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= count; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = count * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

HarmonicBasis HarmonicBasis::sphere(int max_degree) {
  if (max_degree < 0) throw Error(ErrorKind::InvalidArgument, "max_degree must be >= 0");
  HarmonicBasis b;
  b.ambient_dim_ = 3;
  b.max_degree_ = max_degree;
  const int lmax = max_degree;
  const int n_polar = lmax + 4;
  const int n_azimuth = 2 * lmax + 8;
  const int n_nodes = n_polar * n_azimuth;
  const int n_basis = (lmax + 1) * (lmax + 1);

  for (int l = 0; l <= lmax; ++l) {
    for (int m = -l; m <= l; ++m) {
      b.degree_.push_back(l);
      b.order_.push_back(m);
      const int am = std::abs(m);
      // Parities: x3 -> -x3 gives (-1)^(l+|m|); x2 -> -x2 flips sine type;
      // x1 -> -x1 gives (-1)^|m| for cosine type, (-1)^(|m|+1) for sine type.
      int cls = 0;
      const bool sine = m < 0;
      if ((sine ? am + 1 : am) % 2 != 0) cls |= 1;
      if (sine) cls |= 2;
      if ((l + am) % 2 != 0) cls |= 4;
      b.parity_class_.push_back(cls);
    }
  }

  std::vector<double> gl_x;
  std::vector<double> gl_w;
  gauss_legendre(n_polar, gl_x, gl_w);

  b.points_.resize(n_nodes, 3);
  b.weights_.resize(n_nodes);
  b.values_.resize(n_nodes, n_basis);
  b.gradient_.assign(3, Eigen::MatrixXd(n_nodes, n_basis));

  int node = 0;
  for (int i = 0; i < n_polar; ++i) {
    const double t = gl_x[i];
    const double s = std::sqrt(1.0 - t * t);
    const LegendreTable tab = legendre_table(lmax, t, s);
    for (int k = 0; k < n_azimuth; ++k, ++node) {
      const double phi = 2.0 * kPi * k / n_azimuth;
      const double cp = std::cos(phi);
      const double sp = std::sin(phi);
      b.points_(node, 0) = s * cp;
      b.points_(node, 1) = s * sp;
      b.points_(node, 2) = t;
      b.weights_(node) = 0.5 * gl_w[i] / n_azimuth;
      const Eigen::Vector3d e_theta(t * cp, t * sp, -s);
      const Eigen::Vector3d e_phi(-sp, cp, 0.0);
      int p = 0;
      for (int l = 0; l <= lmax; ++l) {
        for (int m = -l; m <= l; ++m, ++p) {
          const int am = std::abs(m);
          const double norm = m == 0 ? 1.0 : std::numbers::sqrt2;
          double ang = 1.0;
          double dang = 0.0;
          if (m > 0) {
            ang = std::cos(am * phi);
            dang = -am * std::sin(am * phi);
          } else if (m < 0) {
            ang = std::sin(am * phi);
            dang = am * std::cos(am * phi);
          }
          const double value = norm * tab.q[l][am] * ang;
          const double d_theta = norm * tab.dq[l][am] * ang;
          const double d_phi_over_s = norm * tab.q[l][am] * dang / s;
          b.values_(node, p) = value;
          const Eigen::Vector3d g = d_theta * e_theta + d_phi_over_s * e_phi;
          for (int c = 0; c < 3; ++c) b.gradient_[c](node, p) = g[c];
        }
      }
    }
  }
  return b;
}

HarmonicBasis HarmonicBasis::circle(int max_frequency, int nodes) {
  if (max_frequency < 0) throw Error(ErrorKind::InvalidArgument, "max_frequency must be >= 0");
  if (nodes < 2 * max_frequency + 4) {
    throw Error(ErrorKind::InvalidArgument, "too few quadrature nodes for the frequency range");
  }
  HarmonicBasis b;
  b.ambient_dim_ = 2;
  b.max_degree_ = max_frequency;
  const int n_basis = 2 * max_frequency + 1;
  b.degree_.push_back(0);
  b.order_.push_back(0);
  b.parity_class_.push_back(0);
  for (int k = 1; k <= max_frequency; ++k) {
    // cos k t: odd in x1 iff k odd, even in x2. sin k t: odd in x2, odd in x1 iff k even.
    b.degree_.push_back(k);
    b.order_.push_back(k);
    b.parity_class_.push_back(k % 2 != 0 ? 1 : 0);
    b.degree_.push_back(k);
    b.order_.push_back(-k);
    b.parity_class_.push_back(2 | (k % 2 == 0 ? 1 : 0));
  }
  b.points_.resize(nodes, 2);
  b.weights_ = Eigen::VectorXd::Constant(nodes, 1.0 / nodes);
  b.values_.resize(nodes, n_basis);
  b.gradient_.assign(2, Eigen::MatrixXd(nodes, n_basis));
  for (int q = 0; q < nodes; ++q) {
    const double t = 2.0 * kPi * q / nodes;
    const double ct = std::cos(t);
    const double st = std::sin(t);
    b.points_(q, 0) = ct;
    b.points_(q, 1) = st;
    b.values_(q, 0) = 1.0;
    b.gradient_[0](q, 0) = 0.0;
    b.gradient_[1](q, 0) = 0.0;
    for (int k = 1; k <= max_frequency; ++k) {
      const double c = std::numbers::sqrt2 * std::cos(k * t);
      const double s = std::numbers::sqrt2 * std::sin(k * t);
      const int pc = 2 * k - 1;
      const int ps = 2 * k;
      b.values_(q, pc) = c;
      b.values_(q, ps) = s;
      // Tangent direction (-sin t, cos t).
      const double dc = -k * s;
      const double ds = k * c;
      b.gradient_[0](q, pc) = -st * dc;
      b.gradient_[1](q, pc) = ct * dc;
      b.gradient_[0](q, ps) = -st * ds;
      b.gradient_[1](q, ps) = ct * ds;
    }
  }
  return b;
}

std::array<int, 3> HarmonicBasis::parity(int p) const {
  const int cls = parity_class(p);
  std::array<int, 3> out{1, 1, 1};
  for (int i = 0; i < ambient_dim_; ++i) out[i] = (cls >> i) & 1 ? -1 : 1;
  return out;
}

bool HarmonicBasis::may_couple(int p, int q) const {
  if (parity_class(p) != parity_class(q)) return false;
  const int dl = std::abs(degree(p) - degree(q));
  if (ambient_dim_ == 2) {
    return dl == 0 || dl == 2 || degree(p) + degree(q) == 2;
  }
  if (dl > 2) return false;
  const int mp = std::abs(order(p));
  const int mq = std::abs(order(q));
  const int dm = std::abs(mp - mq);
  return dm == 0 || dm == 2 || mp + mq == 2;
}

int HarmonicBasis::coordinate_index(int axis) const {
  if (axis < 0 || axis >= ambient_dim_ || max_degree_ < 1) {
    throw Error(ErrorKind::InvalidArgument, "no degree-1 function for that axis");
  }
  if (ambient_dim_ == 2) return axis == 0 ? 1 : 2;
  // l = 1 block is ordered m = -1 (x2), 0 (x3), 1 (x1).
  static constexpr std::array<int, 3> kIndex{3, 1, 2};
  return kIndex[axis];
}

Eigen::VectorXd HarmonicBasis::coordinate_function(int axis) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(size());
  // The degree-1 functions are sqrt(n - 1) x_i.
  c(coordinate_index(axis)) = 1.0 / std::sqrt(static_cast<double>(ambient_dim_));
  return c;
}

Eigen::MatrixXd HarmonicBasis::gram() const {
  return values_.transpose() * weights_.asDiagonal() * values_;
}

}  // namespace blowup
