#include "blowup/sphere_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "blowup/errors.hpp"

namespace blowup {
namespace {

void check_sphere_dim(const AnisotropyMatrix& m) {
  if (m.dim() == 3) {
    throw Error(ErrorKind::WrongDimension, "n = 3 is handled by the circle solver");
  }
  if (m.dim() != 4) {
    throw Error(ErrorKind::UnsupportedDimension,
                "spherical Galerkin solver supports n = 4 only, got n = " + std::to_string(m.dim()));
  }
}

QuadraticWeight to_weight(const AnisotropyMatrix& m) {
  return QuadraticWeight{std::vector<double>(m.entries().begin(), m.entries().end())};
}

// Eigenvalues of one pencil; lambda_1 only.
double lambda1_only(const AnisotropyMatrix& m, int max_degree, double zero_tol) {
  const HarmonicBasis basis = HarmonicBasis::sphere(max_degree);
  const auto spectrum = parity_block_spectrum(assemble_pencil(m, basis), basis);
  for (const auto& e : spectrum) {
    if (std::abs(e.value) >= zero_tol) return e.value;
  }
  throw Error(ErrorKind::NotConverged, "no nonzero eigenvalue found");
}

}  // namespace

Pencil assemble_weighted_pencil(const QuadraticWeight& weight, const HarmonicBasis& basis) {
  const int d = basis.ambient_dim();
  if (static_cast<int>(weight.coeffs.size()) != d) {
    throw Error(ErrorKind::SizeMismatch, "weight has " + std::to_string(weight.coeffs.size()) +
                                             " coefficients, basis needs " + std::to_string(d));
  }
  const int nq = basis.node_count();
  const int np = basis.size();
  const auto& pts = basis.points();
  Eigen::VectorXd w(nq);
  for (int q = 0; q < nq; ++q) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += weight.coeffs[j] * pts(q, j) * pts(q, j);
    w(q) = s * basis.weights()(q);
  }

  // Weighted copies so every entry is a plain column dot product.
  const Eigen::MatrixXd wv = w.asDiagonal() * basis.values();
  std::vector<Eigen::MatrixXd> wg;
  wg.reserve(d);
  for (int c = 0; c < d; ++c) wg.push_back(w.asDiagonal() * basis.gradient(c));

  Pencil out;
  out.stiffness = Eigen::MatrixXd::Zero(np, np);
  out.mass = Eigen::MatrixXd::Zero(np, np);
  for (int p = 0; p < np; ++p) {
    const int lp = basis.degree(p);
    for (int q = p; q < np; ++q) {
      if (basis.degree(q) > lp + 2) break;
      if (!basis.may_couple(p, q)) continue;
      const double mpq = wv.col(p).dot(basis.values().col(q));
      double kpq = 0.0;
      for (int c = 0; c < d; ++c) kpq += wg[c].col(p).dot(basis.gradient(c).col(q));
      out.mass(p, q) = out.mass(q, p) = mpq;
      out.stiffness(p, q) = out.stiffness(q, p) = kpq;
    }
  }
  return out;
}

Pencil assemble_pencil(const AnisotropyMatrix& m, const HarmonicBasis& basis) {
  if (m.dim() != basis.ambient_dim() + 1) {
    throw Error(ErrorKind::WrongDimension,
                "basis lives on S^" + std::to_string(basis.ambient_dim() - 1) + " but n = " +
                    std::to_string(m.dim()));
  }
  return assemble_weighted_pencil(to_weight(m), basis);
}

std::vector<Eigenpair> parity_block_spectrum(const Pencil& pencil, const HarmonicBasis& basis) {
  std::map<int, std::vector<int>> classes;
  for (int p = 0; p < basis.size(); ++p) classes[basis.parity_class(p)].push_back(p);

  std::vector<Eigenpair> out;
  out.reserve(basis.size());
  for (const auto& [cls, idx] : classes) {
    const int nb = static_cast<int>(idx.size());
    Eigen::MatrixXd k(nb, nb);
    Eigen::MatrixXd mm(nb, nb);
    for (int a = 0; a < nb; ++a) {
      for (int b = 0; b < nb; ++b) {
        k(a, b) = pencil.stiffness(idx[a], idx[b]);
        mm(a, b) = pencil.mass(idx[a], idx[b]);
      }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(k, mm);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorKind::NotConverged, "generalized eigensolve failed (mass not positive?)");
    }
    for (int e = 0; e < nb; ++e) {
      Eigenpair pair;
      pair.value = solver.eigenvalues()(e);
      pair.parity_class = cls;
      pair.vector = Eigen::VectorXd::Zero(basis.size());
      for (int a = 0; a < nb; ++a) pair.vector(idx[a]) = solver.eigenvectors()(a, e);
      out.push_back(std::move(pair));
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Eigenpair& x, const Eigenpair& y) { return x.value < y.value; });
  return out;
}

std::optional<std::array<int, 3>> parity_signature(const Eigen::VectorXd& coeffs,
                                                   const HarmonicBasis& basis, double rel_tol) {
  const double scale = coeffs.cwiseAbs().maxCoeff();
  if (scale == 0.0) return std::nullopt;
  int cls = -1;
  for (int p = 0; p < basis.size(); ++p) {
    if (std::abs(coeffs(p)) <= rel_tol * scale) continue;
    if (cls < 0) {
      cls = basis.parity_class(p);
    } else if (cls != basis.parity_class(p)) {
      return std::nullopt;
    }
  }
  std::array<int, 3> sig{1, 1, 1};
  for (int i = 0; i < basis.ambient_dim(); ++i) sig[i] = (cls >> i) & 1 ? -1 : 1;
  return sig;
}

SphereSpectralResult solve_lambda1_sphere(const AnisotropyMatrix& m, int max_degree,
                                          const SphereSolveOptions& options) {
  check_sphere_dim(m);
  if (max_degree < 4) throw Error(ErrorKind::InvalidArgument, "max_degree must be >= 4");

  const HarmonicBasis basis = HarmonicBasis::sphere(max_degree);
  const Pencil pencil = assemble_pencil(m, basis);
  const auto spectrum = parity_block_spectrum(pencil, basis);

  SphereSpectralResult r;
  r.max_degree = max_degree;
  std::vector<const Eigenpair*> nonzero;
  for (const auto& e : spectrum) {
    if (std::abs(e.value) >= options.zero_tol) nonzero.push_back(&e);
  }
  if (nonzero.empty()) throw Error(ErrorKind::NotConverged, "no nonzero eigenvalue found");
  r.lambda1 = nonzero.front()->value;
  for (const Eigenpair* e : nonzero) {
    if (std::abs(e->value - r.lambda1) > options.cluster_rel_tol * std::abs(r.lambda1)) break;
    r.eigenvectors.push_back(e->vector);
    r.cluster_values.push_back(e->value);
    r.parity_signatures.push_back(parity_signature(e->vector, basis));
  }
  r.multiplicity = static_cast<int>(r.eigenvectors.size());
  for (std::size_t i = 0; i < nonzero.size() && i < 8; ++i) r.low_spectrum.push_back(nonzero[i]->value);

  const Eigen::VectorXd one = Eigen::VectorXd::Unit(basis.size(), 0);
  for (const auto& v : r.eigenvectors) {
    r.constant_mode_overlap =
        std::max(r.constant_mode_overlap, std::abs(v.dot(pencil.mass * one)));
  }

  if (options.check_convergence) {
    r.lambda1_check = lambda1_only(m, max_degree + 4, options.zero_tol);
    r.relative_change = std::abs(r.lambda1_check - r.lambda1) / std::abs(r.lambda1_check);
    if (r.relative_change > options.convergence_rel_tol) {
      throw Error(ErrorKind::NotConverged,
                  "lambda_1 changed by " + std::to_string(r.relative_change) + " between L = " +
                      std::to_string(max_degree) + " and L = " + std::to_string(max_degree + 4));
    }
  } else {
    r.lambda1_check = r.lambda1;
  }
  return r;
}

double weighted_inner_product(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                              const AnisotropyMatrix& m, const HarmonicBasis& basis) {
  if (u.size() != basis.size() || v.size() != basis.size()) {
    throw Error(ErrorKind::SizeMismatch, "coefficient vectors do not match the basis size");
  }
  if (m.dim() != basis.ambient_dim() + 1) {
    throw Error(ErrorKind::WrongDimension, "weight and basis dimensions differ");
  }
  // avg(a u v) evaluated pointwise at the quadrature nodes.
  const Eigen::VectorXd uq = basis.values() * u;
  const Eigen::VectorXd vq = basis.values() * v;
  double s = 0.0;
  std::vector<double> xi(basis.ambient_dim());
  for (int q = 0; q < basis.node_count(); ++q) {
    for (int j = 0; j < basis.ambient_dim(); ++j) xi[j] = basis.points()(q, j);
    s += basis.weights()(q) * m.weight(xi) * uq(q) * vq(q);
  }
  return s;
}

}  // namespace blowup
