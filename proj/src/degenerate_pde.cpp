#include "blowup/degenerate_pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "blowup/errors.hpp"

namespace blowup {
namespace {

constexpr double kPi = std::numbers::pi;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Face conductances of the finite-volume operator, with the area and distance
// factors included.
struct Conductances {
  int n_r = 0;
  int n_theta = 0;
  std::vector<double> radial;    // face i (r = i h) for i = 1..n_r-1, [i * n_theta + j]
  std::vector<double> boundary;  // outer face, per angle
  std::vector<double> angular;   // between j and j+1 on ring i
};

Conductances build_conductances(const PolarGrid& g, std::span<const double> a_node,
                                std::span<const double> a_face, double eps) {
  Conductances c;
  c.n_r = g.n_r;
  c.n_theta = g.n_theta;
  const double h = g.h_r();
  const double dt = g.h_theta();
  c.radial.assign(static_cast<std::size_t>(g.n_r + 1) * g.n_theta, 0.0);
  for (int i = 1; i < g.n_r; ++i) {
    const double r = i * h;
    for (int j = 0; j < g.n_theta; ++j) {
      c.radial[static_cast<std::size_t>(i) * g.n_theta + j] = (eps + a_node[j] * r * r) * r * dt / h;
    }
  }
  c.boundary.resize(g.n_theta);
  for (int j = 0; j < g.n_theta; ++j) c.boundary[j] = (eps + a_node[j]) * dt / (0.5 * h);
  c.angular.resize(g.cells());
  for (int i = 0; i < g.n_r; ++i) {
    const double r = g.radius(i);
    for (int j = 0; j < g.n_theta; ++j) {
      c.angular[static_cast<std::size_t>(i) * g.n_theta + j] = (eps + a_face[j] * r * r) * h / (r * dt);
    }
  }
  return c;
}

void apply(const Conductances& c, const std::vector<double>& v, std::vector<double>& out) {
  const int nt = c.n_theta;
  out.assign(v.size(), 0.0);
  for (int i = 0; i < c.n_r; ++i) {
    const std::size_t row = static_cast<std::size_t>(i) * nt;
    for (int j = 0; j < nt; ++j) {
      const std::size_t k = row + j;
      double s = 0.0;
      if (i > 0) s += c.radial[row + j] * (v[k] - v[k - nt]);
      if (i + 1 < c.n_r) {
        s += c.radial[row + nt + j] * (v[k] - v[k + nt]);
      } else {
        s += c.boundary[j] * v[k];
      }
      const int jp = (j + 1) % nt;
      const int jm = (j + nt - 1) % nt;
      s += c.angular[k] * (v[k] - v[row + jp]);
      s += c.angular[row + jm] * (v[k] - v[row + jm]);
      out[k] = s;
    }
  }
}

// Exact inverse of the separable operator whose coefficient is
// a(theta) (r^2 + eps / a_ref). With eps = 0 this is the operator itself.
class SeparableSolver {
 public:
  SeparableSolver(const PolarGrid& g, std::span<const double> a_node, std::span<const double> a_face,
                  double eps, double a_ref)
      : n_r_(g.n_r), n_theta_(g.n_theta), dt_(g.h_theta()) {
    const double h = g.h_r();
    auto w = [eps, a_ref](double r) { return r * r + eps / a_ref; };

    // Radial tridiagonal T_r and angular scaling s_i.
    std::vector<double> cond(n_r_ + 1, 0.0);
    for (int i = 1; i < n_r_; ++i) cond[i] = w(i * h) * (i * h) / h;
    cond[n_r_] = w(1.0) / (0.5 * h);
    t_diag_.resize(n_r_);
    t_off_.resize(n_r_ - 1);
    s_.resize(n_r_);
    for (int i = 0; i < n_r_; ++i) {
      t_diag_[i] = cond[i] + cond[i + 1];
      if (i + 1 < n_r_) t_off_[i] = -cond[i + 1];
      const double r = g.radius(i);
      s_[i] = w(r) * h / r;
    }

    // Periodic angular pencil K' phi = mu D phi, D = diag(a_node).
    const int nt = n_theta_;
    Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(nt, nt);
    const double inv_dt2 = 1.0 / (dt_ * dt_);
    for (int j = 0; j < nt; ++j) {
      const int jp = (j + 1) % nt;
      const double k = a_face[j] * inv_dt2;
      const double scale = 1.0 / std::sqrt(a_node[j] * a_node[jp]);
      sym(j, j) += k / a_node[j];
      sym(jp, jp) += k / a_node[jp];
      sym(j, jp) -= k * scale;
      sym(jp, j) -= k * scale;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success) {
      throw Error(ErrorKind::SolverDiverged, "angular eigendecomposition failed");
    }
    mu_ = eig.eigenvalues();
    phi_ = eig.eigenvectors();
    for (int j = 0; j < nt; ++j) phi_.row(j) /= std::sqrt(a_node[j]);
  }

  // x = P^{-1} y for y laid out as (ring, angle).
  void solve(const std::vector<double>& y, std::vector<double>& x) const {
    Eigen::Map<const RowMatrix> ym(y.data(), n_r_, n_theta_);
    RowMatrix modal = ym * phi_;
    modal /= dt_;
    std::vector<double> c(n_r_), d(n_r_);
    for (int k = 0; k < n_theta_; ++k) {
      const double mu = mu_(k);
      // Thomas sweep for (T_r + mu diag(s)) column k.
      double denom = t_diag_[0] + mu * s_[0];
      c[0] = n_r_ > 1 ? t_off_[0] / denom : 0.0;
      d[0] = modal(0, k) / denom;
      for (int i = 1; i < n_r_; ++i) {
        denom = t_diag_[i] + mu * s_[i] - t_off_[i - 1] * c[i - 1];
        c[i] = i + 1 < n_r_ ? t_off_[i] / denom : 0.0;
        d[i] = (modal(i, k) - t_off_[i - 1] * d[i - 1]) / denom;
      }
      modal(n_r_ - 1, k) = d[n_r_ - 1];
      for (int i = n_r_ - 1; i-- > 0;) modal(i, k) = d[i] - c[i] * modal(i + 1, k);
    }
    x.resize(y.size());
    Eigen::Map<RowMatrix> xm(x.data(), n_r_, n_theta_);
    xm.noalias() = modal * phi_.transpose();
  }

 private:
  int n_r_;
  int n_theta_;
  double dt_;
  std::vector<double> t_diag_;
  std::vector<double> t_off_;
  std::vector<double> s_;
  Eigen::VectorXd mu_;
  Eigen::MatrixXd phi_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> weights_at(const PolarGrid& g, const AnisotropyMatrix& m, double offset) {
  std::vector<double> w(g.n_theta);
  for (int j = 0; j < g.n_theta; ++j) w[j] = m.weight_at_angle(g.angle(j) + offset);
  return w;
}

// Cells with rho/2 < r_i < rho for rho = 2^-level, as [begin, end).
std::pair<int, int> annulus_cells(const PolarGrid& g, int level) {
  const double rho = std::ldexp(1.0, -level);
  int begin = g.n_r;
  int end = 0;
  for (int i = 0; i < g.n_r; ++i) {
    const double r = g.radius(i);
    if (r > 0.5 * rho && r < rho) {
      begin = std::min(begin, i);
      end = std::max(end, i + 1);
    }
  }
  return {begin, std::max(begin, end)};
}

}  // namespace

double PolarGrid::h_theta() const { return 2.0 * kPi / n_theta; }

double PolarGrid::angle(int j) const { return 2.0 * kPi * j / n_theta; }

std::vector<double> PolarGrid::angles() const {
  std::vector<double> t(n_theta);
  for (int j = 0; j < n_theta; ++j) t[j] = angle(j);
  return t;
}

void PolarGrid::validate() const {
  if (n_r < 4 || n_theta < 8 || n_theta % 2 != 0) {
    throw Error(ErrorKind::InvalidArgument, "polar grid needs n_r >= 4 and even n_theta >= 8");
  }
}

PolarField::PolarField(PolarGrid grid, AnisotropyMatrix m, std::vector<double> values, SolveInfo info)
    : grid_(grid), m_(std::move(m)), values_(std::move(values)), info_(info) {
  grid_.validate();
  if (m_.dim() != 3) throw Error(ErrorKind::WrongDimension, "polar fields model n = 3");
  if (values_.size() != grid_.cells()) {
    throw Error(ErrorKind::SizeMismatch, "field size does not match the grid");
  }
  weight_ = weights_at(grid_, m_, 0.0);
}

PolarField solve_weighted_disk(const AnisotropyMatrix& m, double eps,
                               std::span<const double> boundary, const FaceFlux* flux,
                               const DiskSolveOptions& options) {
  if (m.dim() != 3) throw Error(ErrorKind::WrongDimension, "disk solver models n = 3");
  if (!(eps >= 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be nonnegative");
  const PolarGrid& g = options.grid;
  g.validate();
  if (static_cast<int>(boundary.size()) != g.n_theta) {
    throw Error(ErrorKind::SizeMismatch, "boundary data must have one value per angular node");
  }
  const int nt = g.n_theta;
  const std::vector<double> a_node = weights_at(g, m, 0.0);
  const std::vector<double> a_face = weights_at(g, m, 0.5 * g.h_theta());
  const Conductances cond = build_conductances(g, a_node, a_face, eps);

  // Constants solve the homogeneous equation, so solve for v - mean(g); a
  // constant boundary then reproduces the constant exactly.
  double shift = 0.0;
  for (double b : boundary) shift += b;
  shift /= nt;
  std::vector<double> rhs(g.cells(), 0.0);
  const std::size_t outer = static_cast<std::size_t>(g.n_r - 1) * nt;
  for (int j = 0; j < nt; ++j) rhs[outer + j] += cond.boundary[j] * (boundary[j] - shift);

  if (flux != nullptr) {
    if (flux->radial.size() != static_cast<std::size_t>(g.n_r + 1) * nt ||
        flux->angular.size() != g.cells()) {
      throw Error(ErrorKind::SizeMismatch, "flux field does not match the grid faces");
    }
    // A v = -(outward flux of F) per cell.
    const double h = g.h_r();
    const double dt = g.h_theta();
    for (int i = 0; i < g.n_r; ++i) {
      const double r_in = i * h;
      const double r_out = (i + 1) * h;
      for (int j = 0; j < nt; ++j) {
        const std::size_t k = static_cast<std::size_t>(i) * nt + j;
        const std::size_t f_in = static_cast<std::size_t>(i) * nt + j;
        const std::size_t f_out = f_in + nt;
        const int jm = (j + nt - 1) % nt;
        double out_flux = flux->radial[f_out] * r_out * dt - flux->radial[f_in] * r_in * dt;
        out_flux += (flux->angular[k] - flux->angular[static_cast<std::size_t>(i) * nt + jm]) * h;
        rhs[k] -= out_flux;
      }
    }
  }

  const double a_ref = *std::max_element(a_node.begin(), a_node.end());
  const SeparableSolver precond(g, a_node, a_face, eps, a_ref);

  SolveInfo info;
  std::vector<double> x(g.cells(), 0.0);
  auto finish = [&](std::vector<double> v) {
    for (double& e : v) e += shift;
    return PolarField(g, m, std::move(v), info);
  };
  const double b_norm = std::sqrt(dot(rhs, rhs));
  if (b_norm == 0.0) return finish(std::move(x));

  std::vector<double> r = rhs;
  std::vector<double> z;
  std::vector<double> q;
  precond.solve(r, z);
  std::vector<double> p = z;
  double rz = dot(r, z);
  double res = 1.0;
  int it = 0;
  for (; it < options.max_iter; ++it) {
    apply(cond, p, q);
    const double alpha = rz / dot(p, q);
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * q[k];
    }
    res = std::sqrt(dot(r, r)) / b_norm;
    if (res < options.rel_tol) {
      ++it;
      break;
    }
    precond.solve(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = z[k] + beta * p[k];
  }
  // Report the true residual, not the recurrence.
  apply(cond, x, q);
  double true_res = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) true_res += (q[k] - rhs[k]) * (q[k] - rhs[k]);
  info.relative_residual = std::sqrt(true_res) / b_norm;
  info.iterations = it;
  if (!(info.relative_residual < options.rel_tol)) {
    throw Error(ErrorKind::SolverDiverged, "relative residual " + std::to_string(info.relative_residual) +
                                               " after " + std::to_string(it) + " iterations");
  }
  return finish(std::move(x));
}

double weighted_circle_average(const PolarField& field, int ring_begin, int ring_end) {
  const PolarGrid& g = field.grid();
  if (ring_begin < 0 || ring_end > g.n_r || ring_begin >= ring_end) {
    throw Error(ErrorKind::EmptyRange, "ring range [" + std::to_string(ring_begin) + ", " +
                                           std::to_string(ring_end) + ") is empty or out of bounds");
  }
  const auto a = field.weight();
  double num = 0.0;
  double den = 0.0;
  for (int i = ring_begin; i < ring_end; ++i) {
    const double r = g.radius(i);
    for (int j = 0; j < g.n_theta; ++j) {
      num += a[j] * r * field.at(i, j);
      den += a[j] * r;
    }
  }
  return num / den;
}

double weighted_ring_projection(const PolarField& field, int ring, std::span<const double> mode) {
  const PolarGrid& g = field.grid();
  if (ring < 0 || ring >= g.n_r) throw Error(ErrorKind::EmptyRange, "ring index out of range");
  if (static_cast<int>(mode.size()) != g.n_theta) {
    throw Error(ErrorKind::SizeMismatch, "mode must have one value per angular node");
  }
  const auto a = field.weight();
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < g.n_theta; ++j) {
    num += a[j] * field.at(ring, j) * mode[j];
    den += a[j] * mode[j] * mode[j];
  }
  return num / den;
}

int max_dyadic_level(const PolarGrid& grid) {
  int k = -1;
  while (true) {
    const auto [begin, end] = annulus_cells(grid, k + 1);
    if (end - begin < 8) break;
    ++k;
  }
  return k;
}

double oscillation(const PolarField& field, int level) {
  const PolarGrid& g = field.grid();
  const auto [begin, end] = annulus_cells(g, level);
  if (begin >= end) throw Error(ErrorKind::EmptyRange, "annulus holds no cells");
  const double mean = weighted_circle_average(field, begin, end);
  const auto a = field.weight();
  double num = 0.0;
  double den = 0.0;
  for (int i = begin; i < end; ++i) {
    const double r = g.radius(i);
    for (int j = 0; j < g.n_theta; ++j) {
      const double d = field.at(i, j) - mean;
      num += a[j] * r * d * d;
      den += a[j] * r;
    }
  }
  return std::sqrt(num / den);
}

DecayFit measure_decay(const PolarField& field, std::optional<int> k_max) {
  const int deepest = max_dyadic_level(field.grid());
  DecayFit fit;
  double scale = 0.0;
  for (double v : field.values()) scale = std::max(scale, std::abs(v));
  for (int k = 0; k <= deepest; ++k) {
    fit.radii.push_back(std::ldexp(1.0, -k));
    fit.omega.push_back(oscillation(field, k));
  }
  const double floor = 100.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
  int hi = deepest - 1;
  if (k_max) hi = std::min(hi, *k_max);
  std::vector<double> xs;
  std::vector<double> ys;
  fit.k_min = -1;
  for (int k = 1; k <= hi; ++k) {
    if (!(fit.omega[k] > floor)) continue;
    if (fit.k_min < 0) fit.k_min = k;
    fit.k_max = k;
    xs.push_back(std::log(fit.radii[k]));
    ys.push_back(std::log(fit.omega[k]));
  }
  if (xs.size() < 3) {
    throw Error(ErrorKind::InsufficientRings,
                "only " + std::to_string(xs.size()) + " usable dyadic rings (need 3)");
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  fit.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

bool satisfies_max_principle(const PolarField& field, std::span<const double> boundary,
                             double slack) {
  if (boundary.empty()) return true;
  const auto [lo, hi] = std::minmax_element(boundary.begin(), boundary.end());
  const double span = std::max(1.0, *hi - *lo);
  for (double v : field.values()) {
    if (v > *hi + slack * span || v < *lo - slack * span) return false;
  }
  return true;
}

}  // namespace blowup
