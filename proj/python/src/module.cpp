#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "blowup/anisotropy.hpp"
#include "blowup/circle_spectrum.hpp"
#include "blowup/coeff_reduction.hpp"
#include "blowup/degenerate_pde.hpp"
#include "blowup/errors.hpp"
#include "blowup/exponent.hpp"
#include "blowup/perturbation.hpp"
#include "blowup/sphere_spectrum.hpp"
#include "blowup/verify.hpp"

namespace py = pybind11;
using namespace blowup;

namespace {

AnisotropyMatrix matrix(const std::vector<double>& diag, int n) { return AnisotropyMatrix::normalize(diag, n); }

py::dict exponent(const std::vector<double>& diag, int n, int resolution, int max_degree) {
  const auto r = compute_exponent(matrix(diag, n), resolution, max_degree);
  py::dict d;
  d["lambda1"] = r.lambda1;
  d["alpha"] = r.alpha;
  d["blowup_exponent"] = r.blowup_exponent;
  d["epsilon_exponent"] = r.epsilon_exponent;
  d["multiplicity"] = r.multiplicity;
  d["upper_bound"] = r.bounds.upper_n_minus_2;
  d["rational_bound"] = r.bounds.mu_upper_rational ? py::cast(*r.bounds.mu_upper_rational) : py::none();
  d["method"] = r.solver_meta.method;
  d["resolution"] = r.solver_meta.resolution;
  return d;
}

py::dict circle(const std::vector<double>& diag, int grid_size) {
  const auto r = lambda1_lambda2_circle(matrix(diag, 3), grid_size);
  py::dict d;
  d["lambda1"] = r.lambda1;
  d["lambda2"] = r.lambda2;
  d["beta"] = r.beta;
  d["multiplicity"] = r.multiplicity;
  d["small_gap"] = r.small_gap;
  return d;
}

py::dict dirichlet(double beta_tilde, int grid_size) {
  const auto r = solve_dirichlet_mu1({beta_tilde, grid_size});
  py::dict d;
  d["mu1"] = r.mu1;
  d["estimated_order"] = r.estimated_order;
  d["nodes"] = r.nodes;
  d["eigenfunction"] = r.eigenfunction;
  return d;
}

py::dict sphere(const std::vector<double>& diag, int max_degree, bool check_convergence) {
  SphereSolveOptions o;
  o.check_convergence = check_convergence;
  const auto r = solve_lambda1_sphere(matrix(diag, 4), max_degree, o);
  py::dict d;
  d["lambda1"] = r.lambda1;
  d["multiplicity"] = r.multiplicity;
  d["low_spectrum"] = r.low_spectrum;
  d["relative_change"] = r.relative_change;
  d["parity_signatures"] = r.parity_signatures;
  return d;
}

py::dict series(int n, const std::vector<double>& b, int axis) {
  const auto s = make_perturbation_setup(n, b);
  const auto r = second_order_coefficient(s, base_index_for_axis(s, axis));
  py::dict d;
  d["lambda_base"] = s.lambda_base;
  d["c1"] = r.c1;
  d["c2"] = r.c2;
  return d;
}

py::dict disk(const std::vector<double>& diag, py::array_t<double, py::array::c_style | py::array::forcecast> boundary,
              int n_r, double eps) {
  const auto m = matrix(diag, 3);
  DiskSolveOptions o;
  o.grid = {n_r, static_cast<int>(boundary.size())};
  const std::span<const double> data(boundary.data(), static_cast<std::size_t>(boundary.size()));
  PolarField f = [&] {
    py::gil_scoped_release release;
    return solve_weighted_disk(m, eps, data, nullptr, o);
  }();
  py::array_t<double> values({o.grid.n_r, o.grid.n_theta});
  std::copy(f.values().begin(), f.values().end(), values.mutable_data());
  py::dict d;
  d["values"] = values;
  d["iterations"] = f.info().iterations;
  d["relative_residual"] = f.info().relative_residual;
  try {
    const auto fit = measure_decay(f);
    d["fitted_exponent"] = fit.fitted_exponent;
    d["radii"] = fit.radii;
    d["omega"] = fit.omega;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientRings) throw;
    d["fitted_exponent"] = py::none();
  }
  return d;
}

py::dict circle_mode(const std::vector<double>& diag, int which, int n_theta) {
  const auto r = sample_circle_mode(matrix(diag, 3), which, n_theta);
  py::dict d;
  d["mu"] = r.mu;
  d["theta"] = r.theta;
  d["values"] = r.values;
  return d;
}

py::dict reduce(const Eigen::MatrixXd& a0, const std::vector<Eigen::MatrixXd>& slopes, double sigma, double eps,
                double domain_radius) {
  const AffineCoefficientField f(a0, slopes, sigma, domain_radius);
  const auto r = fixed_point_x0(f, eps);
  py::dict d;
  d["x0"] = r.x0;
  d["transform"] = r.transform;
  d["aligned_transform"] = aligned_transform(f, r.x0);
  d["residual"] = r.residual;
  d["iterations"] = r.iterations;
  d["collinearity_residual"] = r.collinearity_residual;
  d["R"] = r.R;
  return d;
}

py::list verify(const std::string& suite, std::uint64_t seed) {
  std::vector<CheckResult> checks;
  {
    py::gil_scoped_release release;
    checks = run_suite(suite, {seed});
  }
  py::list out;
  for (const auto& c : checks) {
    py::dict d;
    d["suite"] = c.suite;
    d["name"] = c.name;
    d["measured"] = c.measured;
    d["required"] = c.required;
    d["pass"] = c.pass;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_blowup, m) {
  m.doc() = "Gradient blow-up exponents for anisotropic degenerate elliptic problems";

  // Kept alive by the module attribute for the life of the interpreter.
  static py::handle error_type = py::exception<Error>(m, "BlowupError", PyExc_ValueError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("normalize", [](const std::vector<double>& diag, int n) {
    const auto a = matrix(diag, n);
    return std::vector<double>(a.entries().begin(), a.entries().end());
  }, py::arg("diag"), py::arg("n"), "Validate and sort diag(a) in descending order.");
  m.def("alpha_of_lambda", &alpha_of_lambda, py::arg("lam"), py::arg("n"));
  m.def("compute_exponent", &exponent, py::arg("diag"), py::arg("n"), py::arg("resolution") = 0,
        py::arg("max_degree") = 0);
  m.def("circle_pair", &circle, py::arg("diag"), py::arg("grid_size") = 512);
  m.def("dirichlet_mu1", &dirichlet, py::arg("beta_tilde"), py::arg("grid_size") = 512);
  m.def("sphere_lambda1", &sphere, py::arg("diag"), py::arg("max_degree") = 16,
        py::arg("check_convergence") = true);
  m.def("series_coefficients", &series, py::arg("n"), py::arg("b"), py::arg("axis") = 0,
        "lambda_base, c1, c2 of lambda(eps) ~ lambda_base + c1 eps + c2 eps^2 for the branch odd in `axis`.");
  m.def("sample_circle_mode", &circle_mode, py::arg("diag"), py::arg("which"), py::arg("n_theta"));
  m.def("solve_disk", &disk, py::arg("diag"), py::arg("boundary"), py::arg("n_r"), py::arg("eps") = 0.0,
        "Solve div((eps + a r^2) grad v) = 0 in the unit disk; len(boundary) sets n_theta.");
  m.def("reduce", &reduce, py::arg("a0"), py::arg("slopes"), py::arg("sigma"), py::arg("eps"),
        py::arg("domain_radius") = 1.0);
  m.def("run_suite", &verify, py::arg("suite") = "all", py::arg("seed") = 20240601);
}
