#pragma once

// Real harmonic bases on S^1 and S^2 with a product quadrature rule.
//
// Basis functions are orthonormal under the normalized surface average, so
// with a = 1 the mass matrix is the identity and the stiffness matrix is
// diag(l (l + 1)) on S^2 or diag(k^2) on S^1. Every basis function has a
// definite parity under each reflection x_i -> -x_i.

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace blowup {

/// w(xi) = sum_j coeffs[j] xi_j^2. Coefficients may have either sign; a
/// constant c is represented as c (1, ..., 1) since |xi| = 1.
struct QuadraticWeight {
  std::vector<double> coeffs;

  double operator()(std::span<const double> xi) const {
    double s = 0.0;
    for (std::size_t j = 0; j < coeffs.size(); ++j) s += coeffs[j] * xi[j] * xi[j];
    return s;
  }
};

class HarmonicBasis {
 public:
  /// Y_{l,m}, 0 <= l <= max_degree, on S^2 with Gauss-Legendre (L + 4 nodes)
  /// in cos(polar) times a (2L + 8)-point trapezoid rule in azimuth.
  static HarmonicBasis sphere(int max_degree);

  /// 1, sqrt2 cos k t, sqrt2 sin k t for 1 <= k <= max_frequency on S^1 with
  /// a `nodes`-point trapezoid rule.
  static HarmonicBasis circle(int max_frequency, int nodes);

  /// Dimension of the ambient space of the sphere, n - 1.
  int ambient_dim() const noexcept { return ambient_dim_; }
  int size() const noexcept { return static_cast<int>(degree_.size()); }
  int max_degree() const noexcept { return max_degree_; }
  int node_count() const noexcept { return static_cast<int>(weights_.size()); }

  /// Node coordinates, one row per node.
  const Eigen::MatrixXd& points() const noexcept { return points_; }
  /// Quadrature weights for the normalized average; they sum to 1.
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  /// values()(q, p) = Y_p at node q.
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  /// Ambient component c of the tangential gradient of each Y_p.
  const Eigen::MatrixXd& gradient(int component) const { return gradient_.at(component); }

  int degree(int p) const { return degree_.at(p); }
  /// Signed order: m on S^2 (negative for sine-type), +-k on S^1.
  int order(int p) const { return order_.at(p); }
  /// +1 / -1 for even / odd under x_i -> -x_i, i < ambient_dim().
  std::array<int, 3> parity(int p) const;
  /// Bit i set when Y_p is odd in x_i.
  int parity_class(int p) const { return parity_class_.at(p); }

  /// Whether a degree-2 even weight can couple Y_p and Y_q in either the
  /// mass or the stiffness matrix.
  bool may_couple(int p, int q) const;

  /// Index of the degree-1 function proportional to x_axis.
  int coordinate_index(int axis) const;
  /// Coefficient vector of the function x_axis itself.
  Eigen::VectorXd coordinate_function(int axis) const;

  /// Unweighted Gram matrix by quadrature; identity up to rounding.
  Eigen::MatrixXd gram() const;

 private:
  int ambient_dim_ = 0;
  int max_degree_ = 0;
  Eigen::MatrixXd points_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd values_;
  std::vector<Eigen::MatrixXd> gradient_;
  std::vector<int> degree_;
  std::vector<int> order_;
  std::vector<int> parity_class_;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace blowup
