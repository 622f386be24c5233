#pragma once

// Two-term eigenvalue series for L_mu u = lambda (1 + mu b) u about a base
// point mu0, one series per base eigenfunction f_j (odd in x_j, even in the
// other coordinates). Parity decouples the f_j, so no general degenerate
// perturbation theory is needed.

#include <vector>

#include <Eigen/Dense>

#include "blowup/harmonic_basis.hpp"
#include "blowup/sphere_spectrum.hpp"

namespace blowup {

struct PerturbationSetup {
  int dim = 0;
  /// Even perturbation b(xi) = sum_j b_j xi_j^2.
  QuadraticWeight b;
  double mu0 = 0.0;
  HarmonicBasis basis;
  /// Pencils for the weights 1 + mu0 b and b.
  Pencil base_pencil;
  Pencil b_pencil;
  std::vector<Eigenpair> base_spectrum;
  /// lambda_{1, mu0}: the discrete first nonzero eigenvalue at the base point.
  double lambda_base = 0.0;
  /// Base eigenspace basis, normalized in the weighted inner product at mu0.
  std::vector<Eigen::VectorXd> base_functions;
  /// Coordinate in which each base function is odd.
  std::vector<int> odd_axis;
};

/// n = 3 uses Fourier modes up to `resolution` (default 64) with a 2048-point
/// trapezoid rule; n = 4 uses spherical harmonics up to degree `resolution`
/// (default 16). Throws UnsupportedDimension, SizeMismatch, InvalidArgument
/// when 1 + mu0 b is not positive or the base eigenspace lacks property O.
PerturbationSetup make_perturbation_setup(int n, std::vector<double> b, double mu0 = 0.0,
                                          int resolution = 0);

/// Index into setup.base_functions of the function odd in `axis`; -1 if the
/// base eigenspace has none.
int base_index_for_axis(const PerturbationSetup& setup, int axis);

/// c_1 = avg(b |grad f|^2 - lambda b f^2) / avg((1 + mu0 b) f^2), by pointwise
/// quadrature. Throws QuadratureFailure if the denominator is below 1e-12.
double first_order_coefficient(const PerturbationSetup& setup, int j);

struct SecondOrderResult {
  double c1 = 0.0;
  double c2 = 0.0;
  /// Coefficients of v_1 in the harmonic basis.
  Eigen::VectorXd v1;
  /// v_1 at the quadrature nodes (the grid samples used for n = 3).
  Eigen::VectorXd v1_samples;
  /// 1 / min |lambda - lambda_k| over the modes outside the base eigenspace.
  double resolvent_norm = 0.0;
  double condition_number = 0.0;
  /// max_i |<f_i, rhs>| for the first-order equation; vanishes by the choice of c_1.
  double rhs_orthogonality = 0.0;
};

/// Solves (lambda (1 + mu0 b) - L_mu0) v_1 = rhs on the complement of the
/// base eigenspace by the spectral resolvent of the discrete pencil, then
/// evaluates c_2. Throws SingularResolvent when the condition number exceeds
/// 1e12, QuadratureFailure when the rhs is not orthogonal to the base space.
SecondOrderResult second_order_coefficient(const PerturbationSetup& setup, int j);

struct Lambda1Prediction {
  std::vector<double> first_order;
  std::vector<double> second_order;
  double min_first_order = 0.0;
  double min_second_order = 0.0;
  /// Index j attaining the second-order minimum.
  int argmin = 0;
};

/// lambda_base + eps c1_j + eps^2 c2_j for each j and the minimum over j.
/// Throws InvalidArgument if 1 + (mu0 + eps) b is not positive.
Lambda1Prediction predict_lambda1(const PerturbationSetup& setup, double eps);

}  // namespace blowup
