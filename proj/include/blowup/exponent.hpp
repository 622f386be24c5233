#pragma once

// End-to-end lambda_1 -> alpha(lambda_1) for n = 3 and n = 4.

#include "blowup/anisotropy.hpp"
#include "blowup/sphere_spectrum.hpp"

namespace blowup {

struct AdaptiveSphereOptions {
  int start_degree = 16;
  int step = 4;
  /// Largest degree tried before giving up with NotConverged.
  int max_degree = 40;
  double rel_tol = 1e-7;
};

/// Raises the harmonic degree by `step` until two successive solves agree to
/// rel_tol. Strongly anisotropic weights need more than the starting degree.
SphereSpectralResult solve_lambda1_sphere_adaptive(const AnisotropyMatrix& m,
                                                   const AdaptiveSphereOptions& options = {});

/// n = 3 goes through the Dirichlet reduction (resolution = grid size,
/// default 512); n = 4 through the adaptive Galerkin solve (resolution =
/// starting degree, default 16; max_degree caps the refinement, default 40).
/// Throws UnsupportedDimension for n >= 5.
ExponentReport compute_exponent(const AnisotropyMatrix& m, int resolution = 0, int max_degree = 0);

}  // namespace blowup
