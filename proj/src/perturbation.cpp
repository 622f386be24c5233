#include "blowup/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "blowup/errors.hpp"

namespace blowup {
namespace {

constexpr int kCircleNodes = 2048;
constexpr double kClusterTol = 1e-7;

bool weight_positive(const QuadraticWeight& b, double mu) {
  // On the sphere 1 + mu b = sum_j (1 + mu b_j) xi_j^2.
  return std::all_of(b.coeffs.begin(), b.coeffs.end(),
                     [mu](double bj) { return 1.0 + mu * bj > 0.0; });
}

QuadraticWeight shifted_weight(const QuadraticWeight& b, double mu) {
  QuadraticWeight w;
  for (double bj : b.coeffs) w.coeffs.push_back(1.0 + mu * bj);
  return w;
}

struct NodalFunction {
  Eigen::VectorXd value;
  std::vector<Eigen::VectorXd> grad;
};

NodalFunction at_nodes(const HarmonicBasis& basis, const Eigen::VectorXd& c) {
  NodalFunction f;
  f.value = basis.values() * c;
  for (int k = 0; k < basis.ambient_dim(); ++k) f.grad.push_back(basis.gradient(k) * c);
  return f;
}

Eigen::VectorXd weight_at_nodes(const HarmonicBasis& basis, const QuadraticWeight& w) {
  Eigen::VectorXd out(basis.node_count());
  std::vector<double> xi(basis.ambient_dim());
  for (int q = 0; q < basis.node_count(); ++q) {
    for (int k = 0; k < basis.ambient_dim(); ++k) xi[k] = basis.points()(q, k);
    out(q) = w(xi);
  }
  return out;
}

double denominator(const PerturbationSetup& s, const NodalFunction& f) {
  const Eigen::VectorXd w0 = weight_at_nodes(s.basis, shifted_weight(s.b, s.mu0));
  const double den = (s.basis.weights().array() * w0.array() * f.value.array().square()).sum();
  if (std::abs(den) < 1e-12) {
    throw Error(ErrorKind::QuadratureFailure, "normalizing integral is below 1e-12");
  }
  return den;
}

void check_index(const PerturbationSetup& s, int j) {
  if (j < 0 || j >= static_cast<int>(s.base_functions.size())) {
    throw Error(ErrorKind::InvalidArgument, "base function index out of range");
  }
}

}  // namespace

PerturbationSetup make_perturbation_setup(int n, std::vector<double> b, double mu0,
                                          int resolution) {
  if (n != 3 && n != 4) {
    throw Error(ErrorKind::UnsupportedDimension, "perturbation series supports n = 3 or 4");
  }
  if (static_cast<int>(b.size()) != n - 1) {
    throw Error(ErrorKind::SizeMismatch, "b needs n - 1 diagonal entries");
  }
  PerturbationSetup s;
  s.dim = n;
  s.b.coeffs = std::move(b);
  s.mu0 = mu0;
  if (!weight_positive(s.b, mu0)) {
    throw Error(ErrorKind::InvalidArgument, "1 + mu0 b must be positive on the sphere");
  }
  if (n == 3) {
    s.basis = HarmonicBasis::circle(resolution > 0 ? resolution : 64, kCircleNodes);
  } else {
    s.basis = HarmonicBasis::sphere(resolution > 0 ? resolution : 16);
  }
  s.base_pencil = assemble_weighted_pencil(shifted_weight(s.b, mu0), s.basis);
  s.b_pencil = assemble_weighted_pencil(s.b, s.basis);
  s.base_spectrum = parity_block_spectrum(s.base_pencil, s.basis);

  const Eigenpair* first = nullptr;
  for (const auto& e : s.base_spectrum) {
    if (std::abs(e.value) >= 1e-9) {
      first = &e;
      break;
    }
  }
  if (first == nullptr) throw Error(ErrorKind::InvalidArgument, "no nonzero base eigenvalue");
  s.lambda_base = first->value;

  for (int axis = 0; axis < n - 1; ++axis) {
    const int cls = 1 << axis;
    int in_cluster = 0;
    const Eigenpair* pick = nullptr;
    for (const auto& e : s.base_spectrum) {
      if (e.parity_class != cls || std::abs(e.value) < 1e-9) continue;
      if (std::abs(e.value - s.lambda_base) <= kClusterTol * s.lambda_base) {
        ++in_cluster;
        if (pick == nullptr) pick = &e;
      }
    }
    if (in_cluster > 1) {
      throw Error(ErrorKind::InvalidArgument, "repeated base eigenvalue within one parity class");
    }
    if (pick != nullptr) {
      Eigen::VectorXd f = pick->vector;
      // Sign convention: positive x_axis component.
      if (f(s.basis.coordinate_index(axis)) < 0.0) f = -f;
      s.base_functions.push_back(std::move(f));
      s.odd_axis.push_back(axis);
    }
  }
  // Every member of the base cluster must be one of the odd-in-one-axis functions.
  int cluster_size = 0;
  for (const auto& e : s.base_spectrum) {
    if (std::abs(e.value) >= 1e-9 && std::abs(e.value - s.lambda_base) <= kClusterTol * s.lambda_base) {
      ++cluster_size;
    }
  }
  if (cluster_size != static_cast<int>(s.base_functions.size()) || s.base_functions.empty()) {
    throw Error(ErrorKind::InvalidArgument, "base eigenspace does not satisfy property O");
  }
  return s;
}

int base_index_for_axis(const PerturbationSetup& setup, int axis) {
  for (std::size_t j = 0; j < setup.odd_axis.size(); ++j) {
    if (setup.odd_axis[j] == axis) return static_cast<int>(j);
  }
  return -1;
}

double first_order_coefficient(const PerturbationSetup& setup, int j) {
  check_index(setup, j);
  const NodalFunction f = at_nodes(setup.basis, setup.base_functions[j]);
  const Eigen::VectorXd b = weight_at_nodes(setup.basis, setup.b);
  Eigen::ArrayXd grad2 = Eigen::ArrayXd::Zero(setup.basis.node_count());
  for (const auto& g : f.grad) grad2 += g.array().square();
  const double num =
      (setup.basis.weights().array() * b.array() *
       (grad2 - setup.lambda_base * f.value.array().square()))
          .sum();
  return num / denominator(setup, f);
}

SecondOrderResult second_order_coefficient(const PerturbationSetup& setup, int j) {
  check_index(setup, j);
  SecondOrderResult out;
  const double lambda = setup.lambda_base;
  const double c1 = first_order_coefficient(setup, j);
  out.c1 = c1;
  const Eigen::VectorXd& f = setup.base_functions[j];

  // Galerkin form of the first-order equation:
  // (lambda M0 - K0) v1 = (K_b - lambda M_b - c1 M0) f.
  const Eigen::VectorXd rhs = setup.b_pencil.stiffness * f - lambda * (setup.b_pencil.mass * f) -
                              c1 * (setup.base_pencil.mass * f);
  double rhs_scale = rhs.cwiseAbs().maxCoeff();
  for (const auto& fi : setup.base_functions) {
    out.rhs_orthogonality = std::max(out.rhs_orthogonality, std::abs(fi.dot(rhs)));
  }
  if (out.rhs_orthogonality > 1e-9 * std::max(1.0, rhs_scale)) {
    throw Error(ErrorKind::QuadratureFailure,
                "first-order right-hand side is not orthogonal to the base eigenspace");
  }

  out.v1 = Eigen::VectorXd::Zero(setup.basis.size());
  double min_gap = std::numeric_limits<double>::infinity();
  double max_gap = 0.0;
  for (const auto& e : setup.base_spectrum) {
    const double gap = lambda - e.value;
    if (std::abs(gap) <= kClusterTol * lambda) continue;
    min_gap = std::min(min_gap, std::abs(gap));
    max_gap = std::max(max_gap, std::abs(gap));
    out.v1 += (e.vector.dot(rhs) / gap) * e.vector;
  }
  out.resolvent_norm = 1.0 / min_gap;
  out.condition_number = max_gap / min_gap;
  if (!(out.condition_number <= 1e12)) {
    throw Error(ErrorKind::SingularResolvent,
                "deflated system condition number " + std::to_string(out.condition_number));
  }

  const NodalFunction fn = at_nodes(setup.basis, f);
  const NodalFunction vn = at_nodes(setup.basis, out.v1);
  const Eigen::ArrayXd b = weight_at_nodes(setup.basis, setup.b).array();
  const Eigen::ArrayXd w0 = 1.0 + setup.mu0 * b;
  Eigen::ArrayXd grad_dot = Eigen::ArrayXd::Zero(setup.basis.node_count());
  for (int k = 0; k < setup.basis.ambient_dim(); ++k) {
    grad_dot += vn.grad[k].array() * fn.grad[k].array();
  }
  const Eigen::ArrayXd integrand = b * grad_dot -
                                   (lambda * b + c1 * w0) * vn.value.array() * fn.value.array() -
                                   c1 * b * fn.value.array().square();
  out.c2 = (setup.basis.weights().array() * integrand).sum() / denominator(setup, fn);
  out.v1_samples = vn.value;
  return out;
}

Lambda1Prediction predict_lambda1(const PerturbationSetup& setup, double eps) {
  if (!weight_positive(setup.b, setup.mu0 + eps)) {
    throw Error(ErrorKind::InvalidArgument, "1 + (mu0 + eps) b must be positive");
  }
  Lambda1Prediction p;
  const int m = static_cast<int>(setup.base_functions.size());
  for (int j = 0; j < m; ++j) {
    const SecondOrderResult so = second_order_coefficient(setup, j);
    p.first_order.push_back(setup.lambda_base + eps * so.c1);
    p.second_order.push_back(setup.lambda_base + eps * so.c1 + eps * eps * so.c2);
  }
  p.min_first_order = *std::min_element(p.first_order.begin(), p.first_order.end());
  const auto it = std::min_element(p.second_order.begin(), p.second_order.end());
  p.min_second_order = *it;
  p.argmin = static_cast<int>(it - p.second_order.begin());
  return p;
}

}  // namespace blowup
