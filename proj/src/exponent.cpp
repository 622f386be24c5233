#include "blowup/exponent.hpp"

#include <cmath>
#include <string>

#include "blowup/circle_spectrum.hpp"
#include "blowup/errors.hpp"

namespace blowup {

SphereSpectralResult solve_lambda1_sphere_adaptive(const AnisotropyMatrix& m,
                                                   const AdaptiveSphereOptions& options) {
  if (options.step <= 0 || options.start_degree < 4 || options.max_degree < options.start_degree) {
    throw Error(ErrorKind::InvalidArgument, "bad degree schedule");
  }
  SphereSolveOptions inner;
  inner.check_convergence = false;
  inner.convergence_rel_tol = options.rel_tol;
  SphereSpectralResult prev = solve_lambda1_sphere(m, options.start_degree, inner);
  for (int l = options.start_degree + options.step; l <= options.max_degree; l += options.step) {
    SphereSpectralResult next = solve_lambda1_sphere(m, l, inner);
    const double change = std::abs(next.lambda1 - prev.lambda1) / next.lambda1;
    if (change <= options.rel_tol) {
      // Report the coarser solve, checked against the finer one.
      prev.lambda1_check = next.lambda1;
      prev.relative_change = change;
      return prev;
    }
    prev = std::move(next);
  }
  throw Error(ErrorKind::NotConverged, "lambda_1 still moving at degree " + std::to_string(options.max_degree));
}

ExponentReport compute_exponent(const AnisotropyMatrix& m, int resolution, int max_degree) {
  if (m.dim() == 3) {
    const int grid = resolution > 0 ? resolution : 512;
    const CirclePair pair = lambda1_lambda2_circle(m, grid);
    return make_exponent_report(m, pair.lambda1, pair.multiplicity,
                                {"dirichlet_sturm_bisection", grid, pair.first.extrapolated});
  }
  if (m.dim() == 4) {
    AdaptiveSphereOptions opts;
    if (resolution > 0) {
      opts.start_degree = resolution;
      opts.max_degree = std::max(opts.max_degree, resolution + 4);
    }
    if (max_degree > 0) opts.max_degree = max_degree;
    const SphereSpectralResult res = solve_lambda1_sphere_adaptive(m, opts);
    return make_exponent_report(m, res.lambda1, res.multiplicity,
                                {"spherical_harmonic_galerkin", res.max_degree, false});
  }
  throw Error(ErrorKind::UnsupportedDimension, "only n = 3 and n = 4 are implemented");
}

}  // namespace blowup
