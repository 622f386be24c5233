#pragma once

// Independent reference computations. None of these share code paths with
// the solvers they check.

#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "blowup/harmonic_basis.hpp"

namespace oracle {

// Root of alpha^2 + (n-1) alpha - lambda on [0, max(1, lambda)] by bisection.
inline double alpha_bisection(double lambda, int n) {
  double lo = 0.0, hi = std::max(1.0, lambda);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mid * mid + (n - 1) * mid - lambda > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// First nonzero eigenvalue of -(a u')' = lambda a u on the full circle,
// a = a1 cos^2 + a2 sin^2, by Galerkin in e^{ik t}, |k| <= K. With
// a = c0 + c2 cos 2t the matrices are exact: M_jk = avg(a e^{i(k-j)t}) and
// S_jk = j k M_jk. No quadrature, no reduction to a half interval.
inline double periodic_lambda1(double a1, double a2, int K = 96) {
  const int size = 2 * K + 1;
  const double c0 = 0.5 * (a1 + a2);
  const double c2 = 0.25 * (a1 - a2);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(size, size);
  for (int p = 0; p < size; ++p) {
    for (int q = 0; q < size; ++q) {
      const int d = std::abs(p - q);
      const double v = d == 0 ? c0 : (d == 2 ? c2 : 0.0);
      m(p, q) = v;
      s(p, q) = static_cast<double>(p - K) * static_cast<double>(q - K) * v;
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, m);
  const auto& ev = eig.eigenvalues();
  for (int i = 0; i < size; ++i) {
    if (ev(i) > 1e-9) return ev(i);
  }
  return std::nan("");
}

// Weighted pencil by brute-force quadrature over every (p, q) pair, ignoring
// the selection rules the production assembly relies on.
struct DensePencil {
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd mass;
};

inline DensePencil dense_pencil(const blowup::HarmonicBasis& basis, const std::function<double(const double*)>& a) {
  const int q = basis.node_count();
  const int d = basis.ambient_dim();
  Eigen::VectorXd w(q);
  for (int i = 0; i < q; ++i) {
    const Eigen::VectorXd x = basis.points().row(i).transpose();
    w(i) = basis.weights()(i) * a(x.data());
  }
  DensePencil out;
  out.mass = basis.values().transpose() * w.asDiagonal() * basis.values();
  out.stiffness = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  for (int c = 0; c < d; ++c) out.stiffness += basis.gradient(c).transpose() * w.asDiagonal() * basis.gradient(c);
  return out;
}

}  // namespace oracle
