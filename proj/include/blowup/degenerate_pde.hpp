#pragma once

// Finite-volume solver for div[(eps + a(theta) r^2) grad v] = div F on the unit
// disk with Dirichlet data at r = 1, plus the weighted averages and the
// dyadic oscillation decay used to read off the exponent alpha(lambda_1).

#include <optional>
#include <span>
#include <vector>

#include "blowup/anisotropy.hpp"

namespace blowup {

/// Cell-centered polar grid: r_i = (i + 1/2) / n_r for i = 0..n_r-1 (no node
/// at the origin), theta_j = 2 pi j / n_theta, periodic in theta.
struct PolarGrid {
  int n_r = 256;
  int n_theta = 512;

  double h_r() const { return 1.0 / n_r; }
  double h_theta() const;
  double radius(int i) const { return (i + 0.5) / n_r; }
  double angle(int j) const;
  std::vector<double> angles() const;
  std::size_t cells() const { return static_cast<std::size_t>(n_r) * n_theta; }
  /// Throws InvalidArgument unless n_r >= 4 and n_theta is even and >= 8.
  void validate() const;
};

struct SolveInfo {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Values on a PolarGrid, row-major (ring i, angle j), with the weight a(theta)
/// of the n = 3 model attached.
class PolarField {
 public:
  PolarField(PolarGrid grid, AnisotropyMatrix m, std::vector<double> values, SolveInfo info = {});

  const PolarGrid& grid() const noexcept { return grid_; }
  const AnisotropyMatrix& anisotropy() const noexcept { return m_; }
  std::span<const double> values() const noexcept { return values_; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * grid_.n_theta + j]; }
  /// a(theta_j) at the angular nodes.
  std::span<const double> weight() const noexcept { return weight_; }
  const SolveInfo& info() const noexcept { return info_; }

  /// Samples f(r, theta) at the cell centers. Throws WrongDimension unless n = 3.
  template <class F>
  static PolarField sample(PolarGrid grid, const AnisotropyMatrix& m, F&& f) {
    grid.validate();
    std::vector<double> v(grid.cells());
    for (int i = 0; i < grid.n_r; ++i) {
      for (int j = 0; j < grid.n_theta; ++j) {
        v[static_cast<std::size_t>(i) * grid.n_theta + j] = f(grid.radius(i), grid.angle(j));
      }
    }
    return PolarField(grid, m, std::move(v));
  }

 private:
  PolarGrid grid_;
  AnisotropyMatrix m_;
  std::vector<double> values_;
  std::vector<double> weight_;
  SolveInfo info_;
};

/// Flux field F sampled on the cell faces: `radial` at the n_r + 1 circles
/// r = i h_r (index i * n_theta + j), `angular` at the rays theta_j + h/2
/// between angle j and j + 1 (index i * n_theta + j).
struct FaceFlux {
  std::vector<double> radial;
  std::vector<double> angular;
};

struct DiskSolveOptions {
  PolarGrid grid;
  double rel_tol = 1e-11;
  int max_iter = 500;
};

/// Throws WrongDimension (n != 3), SizeMismatch, InvalidArgument (eps < 0) and
/// SolverDiverged when the residual target is missed.
PolarField solve_weighted_disk(const AnisotropyMatrix& m, double eps,
                               std::span<const double> boundary, const FaceFlux* flux,
                               const DiskSolveOptions& options);

/// Weighted average sum a(theta_j) r_i v_ij / sum a(theta_j) r_i over rings
/// [ring_begin, ring_end). A single ring gives the circle average, a range the
/// area-weighted annulus average. Throws EmptyRange.
double weighted_circle_average(const PolarField& field, int ring_begin, int ring_end);

/// Weighted projection avg_a(v Y) / avg_a(Y Y) of one ring onto an angular mode.
double weighted_ring_projection(const PolarField& field, int ring, std::span<const double> mode);

struct DecayFit {
  /// rho_k = 2^-k for every resolvable level k = 0, 1, ...
  std::vector<double> radii;
  std::vector<double> omega;
  double fitted_exponent = 0.0;
  /// Inclusive levels used in the least-squares fit.
  int k_min = 0;
  int k_max = 0;
};

/// Dyadic rings need at least 8 radial cells in (rho/2, rho).
int max_dyadic_level(const PolarGrid& grid);

/// omega(rho) = (weighted mean square of v - (v)^a over B_rho \ B_rho/2)^{1/2}.
/// Throws EmptyRange if the annulus holds no cells.
double oscillation(const PolarField& field, int level);

/// Fits log omega against log rho over levels 1..K-1 where K is the deepest
/// resolvable level, also dropping levels with omega below 100 machine
/// epsilons relative to the field scale. `k_max` caps the window. Throws
/// InsufficientRings when fewer than 3 levels remain.
DecayFit measure_decay(const PolarField& field, std::optional<int> k_max = std::nullopt);

/// Max and min of the field attained on the outermost ring bound every value.
bool satisfies_max_principle(const PolarField& field, std::span<const double> boundary,
                             double slack = 1e-10);

}  // namespace blowup
