#pragma once

// First eigenvalues of the weighted problem on the unit circle (n = 3).
//
// The periodic problem [(1 + b cos 2t) u']' = -lambda (1 + b cos 2t) u splits
// into two Dirichlet problems on (0, pi): eigenfunctions vanishing at 0, pi
// give mu_1(b), those vanishing at pi/2, 3pi/2 give mu_1(-b). Since mu_1 is
// increasing, lambda_1 = mu_1(-beta) and lambda_2 = mu_1(beta).

#include <vector>

#include "blowup/anisotropy.hpp"

namespace blowup {

struct DirichletSLProblem {
  /// Coefficient p(t) = 1 + beta_tilde cos 2t, beta_tilde in (-1, 1].
  double beta_tilde = 0.0;
  /// Interior points of the coarse grid on (0, pi); must be >= 16.
  int grid_size = 512;
};

/// Unextrapolated eigenpair of the discrete pencil K u = mu W u on one grid.
struct DiscreteDirichletMode {
  double mu = 0.0;
  /// Interior nodes t_i = i pi / (N + 1), i = 1..N.
  std::vector<double> nodes;
  /// Positive, max-abs normalized.
  std::vector<double> values;
};

struct CircleSpectralResult {
  /// Richardson-extrapolated first eigenvalue from grids N and 2N.
  double mu1 = 0.0;
  /// Discrete values on grids N, 2N, 4N.
  double mu_coarse = 0.0;
  double mu_fine = 0.0;
  double mu_finest = 0.0;
  std::vector<double> nodes;
  /// Eigenfunction on the coarse grid, max-abs = 1 and positive.
  std::vector<double> eigenfunction;
  /// Observed convergence order from the three grids.
  double estimated_order = 0.0;
  bool extrapolated = true;
  int grid_size = 0;
};

/// Smallest eigenvalue of the conservative 3-point discretization with N
/// interior points, by Sturm-sequence bisection on the tridiagonal pencil and
/// inverse iteration for the eigenvector. Throws DegenerateWeight,
/// ConvergenceFailure, InvalidArgument (N < 1).
DiscreteDirichletMode dirichlet_mode(double beta_tilde, int interior_points);

/// Throws DegenerateWeight for beta_tilde outside (-1, 1], InvalidArgument for
/// grid_size < 16, ConvergenceFailure if bisection stalls.
CircleSpectralResult solve_dirichlet_mu1(const DirichletSLProblem& problem);

/// Weighted L2 norm (int_0^pi p u^2)^{1/2} of samples on the interior nodes,
/// by the trapezoid rule with zero end values.
double weighted_l2_norm(double beta_tilde, const std::vector<double>& nodes,
                        const std::vector<double>& values);

enum class OddAxis { X1, None };

struct CirclePair {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double beta = 0.0;
  /// X1 when a_1 > a_2: the lambda_1 eigenfunction is odd about t = pi/2.
  OddAxis odd_axis = OddAxis::None;
  int multiplicity = 1;
  /// Set when a_1 > a_2 but lambda_2 - lambda_1 < 1e-9.
  bool small_gap = false;
  CircleSpectralResult first;
  CircleSpectralResult second;
};

/// Throws WrongDimension unless m.dim() == 3.
CirclePair lambda1_lambda2_circle(const AnisotropyMatrix& m, int grid_size = 512);

/// A periodic eigenfunction of the n = 3 problem sampled on the uniform grid
/// t_j = 2 pi j / n_theta. Built from the Dirichlet mode on n_theta / 2 - 1
/// interior points, so the samples are an exact eigenvector of the periodic
/// conservative discretization on that grid.
struct CircleMode {
  /// Discrete eigenvalue on this grid (not extrapolated).
  double mu = 0.0;
  std::vector<double> theta;
  std::vector<double> values;
};

/// which = 1: lambda_1 mode, odd about pi/2 and positive near t = 0 (cos-like).
/// which = 2: lambda_2 mode, vanishing at 0 and pi (sin-like).
/// n_theta must be even and >= 8.
CircleMode sample_circle_mode(const AnisotropyMatrix& m, int which, int n_theta);

}  // namespace blowup
