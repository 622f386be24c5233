#include "blowup/circle_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "blowup/errors.hpp"

namespace blowup {
namespace {

constexpr double kPi = std::numbers::pi;

struct Pencil {
  std::vector<double> diag;  // K_ii
  std::vector<double> off;   // K_{i,i+1}, size N-1
  std::vector<double> mass;  // W_ii
};

void check_beta(double beta_tilde) {
  if (!(beta_tilde > -1.0) || !(beta_tilde <= 1.0)) {
    throw Error(ErrorKind::DegenerateWeight, "beta_tilde must lie in (-1, 1]");
  }
}

Pencil build_pencil(double beta_tilde, int n) {
  const double h = kPi / (n + 1);
  const double inv_h2 = 1.0 / (h * h);
  auto p = [beta_tilde](double t) { return 1.0 + beta_tilde * std::cos(2.0 * t); };
  Pencil k;
  k.diag.resize(n);
  k.off.resize(n > 0 ? n - 1 : 0);
  k.mass.resize(n);
  for (int i = 1; i <= n; ++i) {
    const double left = p((i - 0.5) * h);
    const double right = p((i + 0.5) * h);
    k.diag[i - 1] = (left + right) * inv_h2;
    if (i < n) k.off[i - 1] = -right * inv_h2;
    // Clamp the node value: at beta_tilde = 1 with odd N the midpoint node
    // would carry exactly zero mass.
    k.mass[i - 1] = std::max(p(i * h), 0.0);
  }
  return k;
}

// Number of pencil eigenvalues below x: negative pivots of K - x W.
int count_below(const Pencil& k, double x) {
  int count = 0;
  double d = 0.0;
  const std::size_t n = k.diag.size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = k.diag[i] - x * k.mass[i];
    if (i > 0) v -= k.off[i - 1] * k.off[i - 1] / d;
    if (v == 0.0) v = -1e-300;
    if (v < 0.0) ++count;
    d = v;
  }
  return count;
}

// Thomas solve of (K - shift W) x = rhs; the matrix is positive definite
// whenever shift is below the smallest eigenvalue.
std::vector<double> shifted_solve(const Pencil& k, double shift, const std::vector<double>& rhs) {
  const std::size_t n = k.diag.size();
  std::vector<double> c(n), d(n), x(n);
  double denom = k.diag[0] - shift * k.mass[0];
  c[0] = n > 1 ? k.off[0] / denom : 0.0;
  d[0] = rhs[0] / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = k.diag[i] - shift * k.mass[i] - k.off[i - 1] * c[i - 1];
    c[i] = i + 1 < n ? k.off[i] / denom : 0.0;
    d[i] = (rhs[i] - k.off[i - 1] * d[i - 1]) / denom;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

void normalize_max_abs(std::vector<double>& v) {
  double peak = 0.0;
  for (double x : v) {
    if (std::abs(x) > std::abs(peak)) peak = x;
  }
  if (peak != 0.0) {
    for (double& x : v) x /= peak;
  }
}

double richardson(double coarse, double fine, double ratio, double order) {
  const double f = std::pow(ratio, order);
  return (f * fine - coarse) / (f - 1.0);
}

double mesh_width(int n) { return kPi / (n + 1); }

}  // namespace

DiscreteDirichletMode dirichlet_mode(double beta_tilde, int interior_points) {
  check_beta(beta_tilde);
  if (interior_points < 1) {
    throw Error(ErrorKind::InvalidArgument, "need at least one interior point");
  }
  const int n = interior_points;
  const Pencil k = build_pencil(beta_tilde, n);
  const double h = mesh_width(n);

  // Upper bracket: discrete Rayleigh quotient of sin t.
  std::vector<double> trial(n);
  for (int i = 0; i < n; ++i) trial[i] = std::sin((i + 1) * h);
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < n; ++i) {
    double kx = k.diag[i] * trial[i];
    if (i > 0) kx += k.off[i - 1] * trial[i - 1];
    if (i + 1 < n) kx += k.off[i] * trial[i + 1];
    num += trial[i] * kx;
    den += k.mass[i] * trial[i] * trial[i];
  }
  double lo = 0.0;
  double hi = 1.0001 * num / den;
  while (count_below(k, hi) < 1) hi *= 2.0;

  constexpr int kMaxBisection = 400;
  constexpr double kRelTol = 1e-12;
  int it = 0;
  for (; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(k, mid) >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if ((hi - lo) > kRelTol * hi) {
    throw Error(ErrorKind::ConvergenceFailure,
                "bisection did not reach relative tolerance 1e-12 in " +
                    std::to_string(kMaxBisection) + " steps");
  }

  DiscreteDirichletMode mode;
  mode.mu = 0.5 * (lo + hi);
  mode.nodes.resize(n);
  for (int i = 0; i < n; ++i) mode.nodes[i] = (i + 1) * h;

  // Inverse iteration with the lower bracket as shift, which keeps the
  // shifted matrix positive definite.
  std::vector<double> x = trial;
  for (int sweep = 0; sweep < 4; ++sweep) {
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = k.mass[i] * x[i];
    x = shifted_solve(k, lo * (1.0 - 1e-10), rhs);
    normalize_max_abs(x);
  }
  // Rayleigh quotient in difference form: a sum of nonnegative terms, so it
  // avoids the cancellation in the Sturm pivots (entries ~ 1/h^2) and its
  // error is quadratic in the eigenvector error.
  double energy = 0.0;
  for (int f = 0; f <= n; ++f) {
    // Face between nodes f and f + 1 (nodes 0 and n + 1 are the Dirichlet ends).
    const double jump = (f < n ? x[f] : 0.0) - (f > 0 ? x[f - 1] : 0.0);
    energy += (1.0 + beta_tilde * std::cos(2.0 * (f + 0.5) * h)) * jump * jump;
  }
  energy /= h * h;
  double mass = 0.0;
  for (int i = 0; i < n; ++i) mass += k.mass[i] * x[i] * x[i];
  const double rq = energy / mass;
  if (rq >= lo * (1.0 - 1e-9) && rq <= hi * (1.0 + 1e-9)) mode.mu = rq;
  mode.values = std::move(x);
  return mode;
}

CircleSpectralResult solve_dirichlet_mu1(const DirichletSLProblem& problem) {
  check_beta(problem.beta_tilde);
  if (problem.grid_size < 16) {
    throw Error(ErrorKind::InvalidArgument, "grid_size must be at least 16");
  }
  const int n = problem.grid_size;
  DiscreteDirichletMode coarse = dirichlet_mode(problem.beta_tilde, n);
  const DiscreteDirichletMode fine = dirichlet_mode(problem.beta_tilde, 2 * n);
  const DiscreteDirichletMode finest = dirichlet_mode(problem.beta_tilde, 4 * n);

  CircleSpectralResult r;
  r.grid_size = n;
  r.mu_coarse = coarse.mu;
  r.mu_fine = fine.mu;
  r.mu_finest = finest.mu;
  r.mu1 = richardson(coarse.mu, fine.mu, mesh_width(n) / mesh_width(2 * n), 2.0);

  const double reference =
      richardson(fine.mu, finest.mu, mesh_width(2 * n) / mesh_width(4 * n), 2.0);
  const double e_coarse = std::abs(coarse.mu - reference);
  const double e_fine = std::abs(fine.mu - reference);
  r.estimated_order = (e_coarse > 0.0 && e_fine > 0.0)
                          ? std::log(e_coarse / e_fine) / std::log(mesh_width(n) / mesh_width(2 * n))
                          : 2.0;
  r.nodes = std::move(coarse.nodes);
  r.eigenfunction = std::move(coarse.values);
  r.extrapolated = true;
  return r;
}

double weighted_l2_norm(double beta_tilde, const std::vector<double>& nodes,
                        const std::vector<double>& values) {
  if (nodes.size() != values.size() || nodes.empty()) {
    throw Error(ErrorKind::SizeMismatch, "nodes and values must have equal nonzero length");
  }
  const double h = kPi / static_cast<double>(nodes.size() + 1);
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    s += (1.0 + beta_tilde * std::cos(2.0 * nodes[i])) * values[i] * values[i];
  }
  return std::sqrt(s * h);
}

CirclePair lambda1_lambda2_circle(const AnisotropyMatrix& m, int grid_size) {
  if (m.dim() != 3) {
    throw Error(ErrorKind::WrongDimension, "circle solver requires n = 3");
  }
  CirclePair out;
  out.beta = m.beta();
  out.first = solve_dirichlet_mu1({-out.beta, grid_size});
  if (out.beta == 0.0) {
    out.second = out.first;
  } else {
    out.second = solve_dirichlet_mu1({out.beta, grid_size});
  }
  out.lambda1 = out.first.mu1;
  out.lambda2 = out.second.mu1;
  if (out.beta > 0.0) {
    out.odd_axis = OddAxis::X1;
    out.multiplicity = 1;
    out.small_gap = (out.lambda2 - out.lambda1) < 1e-9;
  } else {
    out.odd_axis = OddAxis::None;
    out.multiplicity = 2;
  }
  return out;
}

CircleMode sample_circle_mode(const AnisotropyMatrix& m, int which, int n_theta) {
  if (m.dim() != 3) throw Error(ErrorKind::WrongDimension, "circle modes require n = 3");
  if (which != 1 && which != 2) throw Error(ErrorKind::InvalidArgument, "which must be 1 or 2");
  if (n_theta < 8 || n_theta % 2 != 0) {
    throw Error(ErrorKind::InvalidArgument, "n_theta must be even and at least 8");
  }
  if (which == 1 && n_theta % 4 != 0) {
    throw Error(ErrorKind::InvalidArgument, "lambda_1 mode needs n_theta divisible by 4");
  }
  const double beta = m.beta();
  const int half = n_theta / 2;
  // The lambda_1 mode lives on (pi/2, 3pi/2) where the shifted coefficient is
  // 1 - beta cos 2s.
  const DiscreteDirichletMode d = dirichlet_mode(which == 1 ? -beta : beta, half - 1);

  CircleMode mode;
  mode.mu = d.mu;
  mode.theta.resize(n_theta);
  mode.values.resize(n_theta);
  const int shift = which == 1 ? n_theta / 4 : 0;
  for (int j = 0; j < n_theta; ++j) {
    mode.theta[j] = 2.0 * kPi * j / n_theta;
    // s = t + pi/2 for the cos-like mode, s = t for the sin-like mode; both are
    // odd-extended with period pi sign flips.
    const int k = (j + shift) % n_theta;  // index of s in units of pi/half
    const int within = k % half;
    const int lap = k / half;
    const double v = within == 0 ? 0.0 : d.values[within - 1];
    mode.values[j] = lap % 2 == 0 ? v : -v;
  }
  return mode;
}

}  // namespace blowup
