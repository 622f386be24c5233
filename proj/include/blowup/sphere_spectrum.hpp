#pragma once

// lambda_1 for n = 4: Galerkin discretization of -div(a grad u) = lambda a u on
// S^2 in real spherical harmonics.

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "blowup/anisotropy.hpp"
#include "blowup/harmonic_basis.hpp"

namespace blowup {

using GalerkinBasis = HarmonicBasis;

/// stiffness(p, q) = avg(w grad Y_p . grad Y_q), mass(p, q) = avg(w Y_p Y_q).
struct Pencil {
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd mass;
};

/// Assembles only the entries allowed by the degree-2 selection rules; all
/// other entries are exactly zero. Throws SizeMismatch if the weight has the
/// wrong number of coefficients.
Pencil assemble_weighted_pencil(const QuadraticWeight& weight, const HarmonicBasis& basis);

/// Pencil for a(xi) = xi^T M xi. Throws WrongDimension unless
/// m.dim() == basis.ambient_dim() + 1.
Pencil assemble_pencil(const AnisotropyMatrix& m, const HarmonicBasis& basis);

/// One generalized eigenpair, mass-normalized, supported on a single parity
/// class of the basis.
struct Eigenpair {
  double value = 0.0;
  Eigen::VectorXd vector;
  int parity_class = 0;
};

/// Full spectrum of the pencil, solved block by block over the parity classes
/// (the pencil has no entries between classes). Sorted by eigenvalue.
std::vector<Eigenpair> parity_block_spectrum(const Pencil& pencil, const HarmonicBasis& basis);

/// Parities (+1 even / -1 odd) of a coefficient vector under each reflection,
/// or nullopt if its support mixes parity classes.
std::optional<std::array<int, 3>> parity_signature(const Eigen::VectorXd& coeffs,
                                                   const HarmonicBasis& basis,
                                                   double rel_tol = 1e-12);

struct SphereSpectralResult {
  double lambda1 = 0.0;
  int multiplicity = 0;
  /// Weighted-orthonormal basis of the lambda_1 cluster.
  std::vector<Eigen::VectorXd> eigenvectors;
  /// Eigenvalue of each cluster member.
  std::vector<double> cluster_values;
  std::vector<std::optional<std::array<int, 3>>> parity_signatures;
  /// Smallest nonzero eigenvalues (up to 8), ascending.
  std::vector<double> low_spectrum;
  int max_degree = 0;
  /// lambda_1 at max_degree + 4 and the relative difference to lambda1.
  double lambda1_check = 0.0;
  double relative_change = 0.0;
  /// max |<v, 1>| over the cluster, which should vanish.
  double constant_mode_overlap = 0.0;
};

struct SphereSolveOptions {
  double zero_tol = 1e-9;
  double cluster_rel_tol = 1e-7;
  double convergence_rel_tol = 1e-7;
  bool check_convergence = true;
};

/// Throws WrongDimension (n = 3), UnsupportedDimension (n >= 5),
/// InvalidArgument (L < 4), NotConverged.
SphereSpectralResult solve_lambda1_sphere(const AnisotropyMatrix& m, int max_degree = 16,
                                          const SphereSolveOptions& options = {});

/// Normalized weighted average avg(a u v). Throws SizeMismatch.
double weighted_inner_product(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                              const AnisotropyMatrix& m, const HarmonicBasis& basis);

}  // namespace blowup
