// blowup: command-line front end. JSON and CSV go to stdout or --out.
//
// Exit codes: 0 ok, 1 verification failure, 2 input error, 3 numerical failure.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "blowup/anisotropy.hpp"
#include "blowup/circle_spectrum.hpp"
#include "blowup/coeff_reduction.hpp"
#include "blowup/degenerate_pde.hpp"
#include "blowup/errors.hpp"
#include "blowup/exponent.hpp"
#include "blowup/perturbation.hpp"
#include "blowup/verify.hpp"

using json = nlohmann::ordered_json;
using namespace blowup;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kInputError = 2, kNumericalFailure = 3 };

std::string num(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

// A table that renders as CSV (header row, LF) or a JSON array of objects.
struct Table {
  using Cell = std::variant<double, std::string>;
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  std::string csv() const {
    std::string s;
    for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
    s += '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) s += ',';
        s += std::holds_alternative<double>(row[i]) ? num(std::get<double>(row[i])) : std::get<std::string>(row[i]);
      }
      s += '\n';
    }
    return s;
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& row : rows) {
      json o = json::object();
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (std::holds_alternative<double>(row[i])) {
          o[header[i]] = std::get<double>(row[i]);
        } else {
          o[header[i]] = std::get<std::string>(row[i]);
        }
      }
      arr.push_back(std::move(o));
    }
    return arr;
  }
};

struct Output {
  std::string path;
  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      std::cout.flush();
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot open output file '" + path + "'");
    f << text;
  }
  void write(const json& j) const { write(j.dump(2) + "\n"); }
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    double v = 0.0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || p != item.data() + item.size()) {
      throw Error(ErrorKind::ParseError, std::string("bad number '") + item + "' in " + what);
    }
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorKind::ParseError, std::string("empty list for ") + what);
  return out;
}

// Evaluates f(i) for i < count on `jobs` threads; results keep input order.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, int jobs, F f) {
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        slots[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<T> out;
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

json bounds_json(const AnalyticBounds& b) {
  json j;
  j["upper_n_minus_2"] = b.upper_n_minus_2;
  if (b.mu_upper_rational) j["mu_upper_rational"] = *b.mu_upper_rational;
  if (b.sqrt_envelope) {
    j["sqrt_envelope"] = {{"beta_tilde", b.sqrt_envelope->first}, {"power", b.sqrt_envelope->second}};
  }
  return j;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

// Square matrix from a flat row-major array or an array of rows.
Eigen::MatrixXd matrix_from(const json& j, int n, const std::string& what) {
  Eigen::MatrixXd m(n, n);
  if (!j.is_array()) throw Error(ErrorKind::ParseError, what + " must be an array");
  if (j.size() == static_cast<std::size_t>(n * n) && (n == 1 || !j[0].is_array())) {
    for (int k = 0; k < n * n; ++k) m(k / n, k % n) = j.at(k).get<double>();
    return m;
  }
  if (j.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorKind::SizeMismatch, what + " must have " + std::to_string(n * n) + " entries");
  }
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != static_cast<std::size_t>(n)) {
      throw Error(ErrorKind::SizeMismatch, what + " row " + std::to_string(i) + " has the wrong length");
    }
    for (int k = 0; k < n; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

struct CoefficientFile {
  AffineCoefficientField field;
  double eps;
};

CoefficientFile load_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read '" + path + "'");
  json j;
  try {
    j = json::parse(in);
    const int n = j.at("dim_n").get<int>();
    if (n < 2 || n > 16) throw Error(ErrorKind::InvalidArgument, "dim_n must be in [2, 16]");
    Eigen::MatrixXd a0 = matrix_from(j.at("A0"), n, "A0");
    const json& s = j.at("slopes");
    if (!s.is_array() || s.size() != static_cast<std::size_t>(n)) {
      throw Error(ErrorKind::SizeMismatch, "slopes must list dim_n matrices");
    }
    std::vector<Eigen::MatrixXd> slopes;
    for (int k = 0; k < n; ++k) slopes.push_back(matrix_from(s[k], n, "slopes[" + std::to_string(k) + "]"));
    const double radius = j.value("domain_radius", 1.0);
    return {AffineCoefficientField(std::move(a0), std::move(slopes), j.at("sigma").get<double>(), radius),
            j.value("eps", std::nan(""))};
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

std::vector<double> boundary_data(const std::string& kind, const AnisotropyMatrix& m, int n_theta) {
  PolarGrid g{8, n_theta};
  const auto th = g.angles();
  std::vector<double> b(n_theta);
  if (kind == "eig1" || kind == "eig2") return sample_circle_mode(m, kind == "eig1" ? 1 : 2, n_theta).values;
  for (int j = 0; j < n_theta; ++j) {
    if (kind == "cos") {
      b[j] = std::cos(th[j]);
    } else if (kind == "sin") {
      b[j] = std::sin(th[j]);
    } else if (kind == "const") {
      b[j] = 1.0;
    } else if (kind == "odd") {
      // Generic data odd in x_1: contains every cos-odd mode.
      b[j] = std::cos(th[j]) + 0.3 * std::cos(3 * th[j]) + 0.2 * std::cos(th[j]) * std::sin(th[j]) * std::sin(th[j]);
    } else {
      throw Error(ErrorKind::InvalidArgument, "unknown boundary '" + kind + "'");
    }
  }
  return b;
}

// ---- subcommands ----

int run_exponent(int n, const std::string& diag, int resolution, int max_degree, const Output& out) {
  const auto m = AnisotropyMatrix::normalize(parse_list(diag, "--diag"), n);
  const ExponentReport r = compute_exponent(m, resolution, max_degree);
  json j;
  j["n"] = n;
  j["diag"] = m.entries();
  j["lambda1"] = r.lambda1;
  j["alpha"] = r.alpha;
  j["blowup_exponent"] = r.blowup_exponent;
  j["epsilon_exponent"] = r.epsilon_exponent;
  j["multiplicity"] = r.multiplicity;
  j["bounds"] = bounds_json(r.bounds);
  j["below_upper_bound"] = r.below_upper_bound;
  if (r.bounds.mu_upper_rational) j["below_rational_bound"] = r.below_rational_bound;
  j["solver"] = {{"method", r.solver_meta.method},
                 {"resolution", r.solver_meta.resolution},
                 {"extrapolated", r.solver_meta.extrapolated}};
  out.write(j);
  return kOk;
}

int run_sweep(const std::string& ratios_text, int grid, int jobs, const std::string& format, const Output& out) {
  const auto ratios = parse_list(ratios_text, "--ratios");
  for (double r : ratios) {
    if (!(r >= 1.0) || !std::isfinite(r)) {
      throw Error(ErrorKind::InvalidArgument, "ratios must be finite and >= 1 (a_1 >= a_2), got " + num(r));
    }
  }
  const auto pairs = parallel_map<CirclePair>(ratios.size(), jobs, [&](std::size_t i) {
    return lambda1_lambda2_circle(AnisotropyMatrix::normalize({ratios[i], 1.0}, 3), grid);
  });
  Table t;
  t.header = {"ratio", "beta", "lambda1", "lambda2", "alpha1", "rational_bound", "status"};
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const auto& p = pairs[i];
    std::string status;
    if (i > 0 && ratios[i] > ratios[i - 1] && !(p.lambda1 < pairs[i - 1].lambda1)) status = "not_decreasing";
    if (p.small_gap) status += status.empty() ? "small_gap" : ";small_gap";
    if (status.empty()) status = "ok";
    const double rational = (ratios[i] + 3.0) / (3.0 * ratios[i] + 1.0);
    t.rows.push_back({ratios[i], p.beta, p.lambda1, p.lambda2, alpha_of_lambda(p.lambda1, 3), rational, status});
  }
  if (format == "json") {
    out.write(t.to_json());
  } else {
    out.write(t.csv());
  }
  return kOk;
}

int run_pde_rate(const std::string& diag, const std::string& boundary, double eps, const std::string& levels_text,
                 const std::string& field_csv, const Output& out) {
  const auto m = AnisotropyMatrix::normalize(parse_list(diag, "--diag"), 3);
  std::vector<int> levels;
  for (double v : parse_list(levels_text, "--levels")) {
    if (v != std::floor(v) || v < 4 || v > 8192) throw Error(ErrorKind::InvalidArgument, "bad radial resolution " + num(v));
    levels.push_back(static_cast<int>(v));
  }
  const auto pair = lambda1_lambda2_circle(m);
  // Which spectral exponent the data should show.
  const bool second = boundary == "eig2" || boundary == "sin";
  double predicted_lambda = second ? pair.lambda2 : pair.lambda1;
  if (boundary == "sin" && pair.multiplicity == 2) predicted_lambda = pair.lambda1;

  json runs = json::array();
  std::vector<double> fits;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    DiskSolveOptions opt;
    opt.grid = {levels[k], 2 * levels[k]};
    const auto b = boundary_data(boundary, m, opt.grid.n_theta);
    const PolarField f = solve_weighted_disk(m, eps, b, nullptr, opt);
    const DecayFit fit = measure_decay(f);
    fits.push_back(fit.fitted_exponent);
    json rings = json::array();
    for (std::size_t i = 0; i < fit.radii.size(); ++i) rings.push_back({{"rho", fit.radii[i]}, {"omega", fit.omega[i]}});
    runs.push_back({{"n_r", opt.grid.n_r},
                    {"n_theta", opt.grid.n_theta},
                    {"iterations", f.info().iterations},
                    {"relative_residual", f.info().relative_residual},
                    {"fitted_exponent", fit.fitted_exponent},
                    {"window", {fit.k_min, fit.k_max}},
                    {"rings", rings}});
    if (!field_csv.empty() && k + 1 == levels.size()) {
      std::string s = "r,theta,value\n";
      for (int i = 0; i < opt.grid.n_r; ++i) {
        for (int j = 0; j < opt.grid.n_theta; ++j) {
          s += num(opt.grid.radius(i)) + "," + num(opt.grid.angle(j)) + "," + num(f.at(i, j)) + "\n";
        }
      }
      Output{field_csv}.write(s);
    }
  }
  // Second-order Richardson on the two finest levels when they differ by 2x.
  double fitted = fits.back();
  bool extrapolated = false;
  if (levels.size() >= 2 && levels[levels.size() - 1] == 2 * levels[levels.size() - 2]) {
    fitted = fits.back() + (fits.back() - fits[fits.size() - 2]) / 3.0;
    extrapolated = true;
  }
  const double alpha = alpha_of_lambda(predicted_lambda, 3);
  json j;
  j["diag"] = m.entries();
  j["boundary"] = boundary;
  j["eps"] = eps;
  j["fitted_exponent"] = fitted;
  j["extrapolated"] = extrapolated;
  j["alpha_predicted"] = alpha;
  j["lambda_predicted"] = predicted_lambda;
  j["relative_gap"] = std::abs(fitted - alpha) / alpha;
  j["levels"] = runs;
  out.write(j);
  return kOk;
}

int run_perturb(int n, const std::string& b_text, const std::string& eps_text, const std::string& format,
                const Output& out) {
  const auto b = parse_list(b_text, "--b");
  const auto eps = parse_list(eps_text, "--eps");
  const auto setup = make_perturbation_setup(n, b);
  Table t;
  t.header = {"eps", "direct", "first_order", "second_order", "error_first", "error_second"};
  for (double e : eps) {
    std::vector<double> a(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) a[k] = 1.0 + e * b[k];
    for (double v : a) {
      if (!(v > 0.0)) throw Error(ErrorKind::InvalidArgument, "1 + eps b is not positive at eps = " + num(e));
    }
    const auto m = AnisotropyMatrix::normalize(a, n);
    const double direct = n == 3 ? lambda1_lambda2_circle(m).lambda1 : solve_lambda1_sphere_adaptive(m).lambda1;
    const auto p = predict_lambda1(setup, e);
    t.rows.push_back({e, direct, p.min_first_order, p.min_second_order, std::abs(direct - p.min_first_order),
                      std::abs(direct - p.min_second_order)});
  }
  if (format == "json") {
    out.write(t.to_json());
  } else {
    out.write(t.csv());
  }
  return kOk;
}

int run_reduce(const std::string& path, std::optional<double> eps_override, const Output& out) {
  CoefficientFile cf = load_coefficients(path);
  const double eps = eps_override ? *eps_override : cf.eps;
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive (file field 'eps' or --eps)");
  const auto& field = cf.field;
  const ReductionResult r = fixed_point_x0(field, eps);
  const int n = field.dim();
  const Eigen::MatrixXd nf = r.transform * field(r.x0) * r.transform.transpose() - Eigen::MatrixXd::Identity(n, n);
  const SelfMapReport self = self_map_check(field, eps, 512);
  json j;
  j["dim_n"] = n;
  j["eps"] = eps;
  j["x0"] = std::vector<double>(r.x0.data(), r.x0.data() + r.x0.size());
  j["transform"] = matrix_json(r.transform);
  j["residual"] = r.residual;
  j["iterations"] = r.iterations;
  j["collinearity_residual"] = r.collinearity_residual;
  j["R"] = r.R;
  j["x0_norm"] = r.x0.norm();
  j["normal_form_error"] = nf.cwiseAbs().maxCoeff();
  j["self_map"] = {{"ok", self.ok}, {"samples", self.samples}, {"max_ratio", self.max_ratio}};
  if (!self.ok) j["self_map"]["detail"] = self.detail;
  out.write(j);
  return kOk;
}

int run_verify(const std::string& suite, std::uint64_t seed, const std::string& format, const Output& out) {
  if (suite != "all" && std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end()) {
    throw Error(ErrorKind::InvalidArgument, "unknown suite '" + suite + "'");
  }
  VerifyOptions opts;
  opts.seed = seed;
  const auto checks = run_suite(suite, opts);
  int failed = 0;
  json arr = json::array();
  std::string text;
  for (const auto& c : checks) {
    failed += c.pass ? 0 : 1;
    text += std::string(c.pass ? "PASS" : "FAIL") + "  [" + c.suite + "] " + c.name + ": measured " + num(c.measured) +
            ", required " + c.required + "\n";
    arr.push_back({{"suite", c.suite}, {"name", c.name}, {"measured", std::isfinite(c.measured) ? json(c.measured) : json()},
                   {"required", c.required}, {"pass", c.pass}});
  }
  text += std::to_string(checks.size() - failed) + "/" + std::to_string(checks.size()) + " checks passed\n";
  if (format == "json") {
    out.write(json{{"checks", arr}, {"passed", checks.size() - failed}, {"failed", failed}});
  } else {
    out.write(text);
  }
  return failed ? kVerifyFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic blow-up exponents: spectra, model PDE decay, perturbation series, coefficient reduction"};
  app.require_subcommand(1);
  Output out;
  std::uint64_t seed = 20240601;
  app.add_option("--out", out.path, "Write results to this file instead of stdout");
  app.add_option("--seed", seed, "Seed for randomized sweeps");

  int n = 3;
  std::string diag;
  int resolution = 0, max_degree = 0;
  auto* exponent = app.add_subcommand("exponent", "lambda_1, alpha(lambda_1) and bounds for diag(a)");
  exponent->add_option("--n", n, "Ambient dimension (3 or 4)")->required();
  exponent->add_option("--diag", diag, "Comma-separated a_1,...,a_{n-1}")->required();
  exponent->add_option("--resolution", resolution, "Grid size (n = 3) or starting harmonic degree (n = 4)");
  exponent->add_option("--max-degree", max_degree, "Largest harmonic degree tried before giving up (n = 4, default 40)");

  std::string ratios, format = "csv";
  int grid = 512, jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "n = 3 table over a_1/a_2 ratios");
  sweep->add_option("--ratios", ratios, "Comma-separated ratios a_1/a_2 >= 1")->required();
  sweep->add_option("--grid", grid, "Interior grid points of the Dirichlet problem");
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  std::string boundary = "eig1", levels = "256,512", field_csv;
  double eps = 0.0;
  auto* pde = app.add_subcommand("pde-rate", "Oscillation decay rate of the model disk problem (n = 3)");
  pde->add_option("--diag", diag, "a_1,a_2")->required();
  pde->add_option("--boundary", boundary, "cos | sin | eig1 | eig2 | odd | const");
  pde->add_option("--eps", eps, "Regularization eps >= 0");
  pde->add_option("--levels", levels, "Comma-separated radial resolutions (angular = 2x)");
  pde->add_option("--field-csv", field_csv, "Dump the finest solution as r,theta,value");

  std::string b_text, eps_list = "0.04,0.02,0.01";
  auto* perturb = app.add_subcommand("perturb", "Two-term series about the isotropic weight vs direct solves");
  perturb->add_option("--n", n, "3 or 4")->required();
  perturb->add_option("--b", b_text, "Diagonal of the perturbation b")->required();
  perturb->add_option("--eps", eps_list, "Comma-separated eps values");
  perturb->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  std::string coeff;
  std::optional<double> reduce_eps;
  auto* reduce = app.add_subcommand("reduce", "Normal-form point x0 and map l for an affine coefficient field");
  reduce->add_option("--coeff", coeff, "JSON coefficient file")->required();
  reduce->add_option("--eps", reduce_eps, "Override the file's eps");

  std::string suite = "all", verify_format = "text";
  auto* verify = app.add_subcommand("verify", "Run invariant suites");
  verify->add_option("--suite", suite, "anisotropy | circle | sphere | perturbation | pde | reduction | all");
  verify->add_option("--format", verify_format)->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*exponent) return run_exponent(n, diag, resolution, max_degree, out);
    if (*sweep) return run_sweep(ratios, grid, jobs, format, out);
    if (*pde) return run_pde_rate(diag, boundary, eps, levels, field_csv, out);
    if (*perturb) return run_perturb(n, b_text, eps_list, format, out);
    if (*reduce) return run_reduce(coeff, reduce_eps, out);
    if (*verify) return run_verify(suite, seed, verify_format, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_input_error(e.kind()) ? kInputError : kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kInputError;
}
