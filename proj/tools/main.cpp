// Command-line front end: wires family builders, the path sampler and the
// diagnostic checks into reproducible single-process runs with file outputs.
//
// Exit codes: 0 success, 1 a verify check failed, 2 malformed spec,
// 3 numerical failure.

#include <CLI11.hpp>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "gpseries/diagnostics.hpp"
#include "gpseries/errors.hpp"
#include "gpseries/expansions.hpp"
#include "gpseries/montecarlo.hpp"
#include "gpseries/serialization.hpp"
#include "gpseries/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gpseries;

namespace {

struct GlobalOptions {
  std::string spec_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  unsigned threads = 0;  // 0 = auto
};

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json load_spec(const GlobalOptions& opt) {
  std::ifstream in(opt.spec_path);
  if (!in) throw SpecError("cannot open spec file: " + opt.spec_path);
  json spec;
  try {
    in >> spec;
  } catch (const json::exception& e) {
    throw SpecError(std::string("spec is not valid JSON: ") + e.what());
  }
  if (!spec.is_object()) throw SpecError("spec must be a JSON object");
  return spec;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string csv_preamble(const json& resolved_spec) {
  std::string s = "# gpseries " + std::string(kVersion) + "\n";
  s += "# spec: " + resolved_spec.dump() + "\n";
  return s;
}

json json_with_spec(const json& resolved_spec) {
  json out;
  out["artifact_version"] = kVersion;
  out["resolved_spec"] = resolved_spec;
  return out;
}

Grid grid_from_json(const json& spec) {
  double T = 1.0;
  std::size_t n = 1025;
  int dim = 1;
  if (spec.contains("grid")) {
    const json& g = spec.at("grid");
    if (g.contains("T")) T = double_from_json(g.at("T"), "grid.T");
    if (g.contains("n_points")) n = g.at("n_points").get<std::size_t>();
    if (g.contains("dim")) dim = g.at("dim").get<int>();
  }
  return Grid(T, n, dim);
}

json resolved_grid(const Grid& g) {
  return {{"T", g.horizon()}, {"n_points", g.points_per_axis()}, {"dim", g.dim()}};
}

std::uint64_t seed_from(const json& spec, const GlobalOptions& opt) {
  if (opt.seed_override) return *opt.seed_override;
  if (spec.contains("seed")) return spec.at("seed").get<std::uint64_t>();
  return 0;
}

QuadratureConfig quadrature_from(const json& spec) {
  QuadratureConfig cfg;
  if (spec.contains("quadrature")) {
    const json& q = spec.at("quadrature");
    if (q.contains("abs_tol")) cfg.abs_tol = double_from_json(q.at("abs_tol"), "abs_tol");
    if (q.contains("rel_tol")) cfg.rel_tol = double_from_json(q.at("rel_tol"), "rel_tol");
    if (q.contains("max_panels")) cfg.max_panels = q.at("max_panels").get<std::size_t>();
  }
  cfg.validate();
  return cfg;
}

int run_expand(const GlobalOptions& opt) {
  const json spec = load_spec(opt);
  if (!spec.contains("family")) throw SpecError("expand spec needs a family");
  const QuadratureConfig cfg = quadrature_from(spec);
  const ExpansionFamily family =
      build_family_from_spec(spec.at("family"), cfg, opt.threads);
  json resolved = spec;
  resolved["family"] = resolve_family_spec(spec.at("family"));
  json out = json_with_spec(resolved);
  out.update(family_to_json(family));
  write_text(fs::path(opt.out_dir) / "family.json", out.dump(2) + "\n");
  return 0;
}

int run_sample(const GlobalOptions& opt) {
  const json spec = load_spec(opt);
  if (!spec.contains("family")) throw SpecError("sample spec needs a family");
  const QuadratureConfig cfg = quadrature_from(spec);
  const ExpansionFamily family =
      build_family_from_spec(spec.at("family"), cfg, opt.threads);
  SamplerConfig sampler{seed_from(spec, opt),
                        spec.value("n_replicates", std::size_t(8)),
                        grid_from_json(spec)};
  if (sampler.grid.dim() != 1) {
    throw SpecError("sample writes 1-D path tables; use a dim-1 grid");
  }
  const std::size_t n_terms = spec.contains("n_terms")
                                  ? spec.at("n_terms").get<std::size_t>()
                                  : family.size();
  const Eigen::MatrixXd paths = sample_paths(family, sampler, n_terms, opt.threads);

  json resolved = spec;
  resolved["family"] = resolve_family_spec(spec.at("family"));
  resolved["seed"] = sampler.seed;
  resolved["n_replicates"] = sampler.n_replicates;
  resolved["n_terms"] = n_terms;
  resolved["grid"] = resolved_grid(sampler.grid);

  std::string csv = csv_preamble(resolved);
  csv += "t";
  for (std::size_t r = 0; r < sampler.n_replicates; ++r) {
    csv += ",rep" + std::to_string(r);
  }
  csv += "\n";
  for (std::size_t i = 0; i < sampler.grid.points_per_axis(); ++i) {
    csv += fmt(sampler.grid.point(i));
    for (std::size_t r = 0; r < sampler.n_replicates; ++r) {
      csv += "," + fmt(paths(Eigen::Index(r), Eigen::Index(i)));
    }
    csv += "\n";
  }
  write_text(fs::path(opt.out_dir) / "paths.csv", csv);
  return 0;
}

int run_remainder(const GlobalOptions& opt) {
  const json spec = load_spec(opt);
  if (!spec.contains("family")) throw SpecError("remainder spec needs a family");
  if (!spec.contains("truncations") || !spec.at("truncations").is_array()) {
    throw SpecError("remainder spec needs a truncations array");
  }
  const QuadratureConfig cfg = quadrature_from(spec);
  const ExpansionFamily family =
      build_family_from_spec(spec.at("family"), cfg, opt.threads);
  SamplerConfig sampler{seed_from(spec, opt),
                        spec.value("n_replicates", std::size_t(2000)),
                        grid_from_json(spec)};
  std::vector<std::size_t> truncations;
  for (const auto& t : spec.at("truncations")) {
    truncations.push_back(t.get<std::size_t>());
  }
  const double log_exponent = spec.value("log_exponent", 0.5);
  RemainderCurve curve =
      estimate_remainder(family, sampler, truncations, opt.threads);
  const auto [slope, hw] = fit_rate(curve, log_exponent);

  json resolved = spec;
  resolved["family"] = resolve_family_spec(spec.at("family"));
  resolved["seed"] = sampler.seed;
  resolved["n_replicates"] = sampler.n_replicates;
  resolved["grid"] = resolved_grid(sampler.grid);
  resolved["log_exponent"] = log_exponent;

  std::string csv = csv_preamble(resolved);
  csv += "n,estimate,stderr\n";
  for (std::size_t k = 0; k < curve.truncations.size(); ++k) {
    csv += std::to_string(curve.truncations[k]) + "," +
           fmt(curve.estimates[k]) + "," + fmt(curve.std_errors[k]) + "\n";
  }
  write_text(fs::path(opt.out_dir) / "remainder.csv", csv);

  json fit = json_with_spec(resolved);
  fit["fitted_exponent"] = curve.fitted_exponent;
  fit["ci_halfwidth"] = curve.ci_halfwidth;
  fit["log_exponent"] = curve.log_exponent;
  write_text(fs::path(opt.out_dir) / "remainder_fit.json", fit.dump(2) + "\n");
  (void)slope;
  (void)hw;
  return 0;
}

int run_verify(const GlobalOptions& opt) {
  const json spec = load_spec(opt);
  if (!spec.contains("family")) throw SpecError("verify spec needs a family");
  const QuadratureConfig cfg = quadrature_from(spec);
  const ExpansionFamily family =
      build_family_from_spec(spec.at("family"), cfg, opt.threads);
  Grid grid = spec.contains("grid") ? grid_from_json(spec)
                                    : Grid(family.kernel().horizon(), 65);
  const std::size_t n_terms = spec.contains("n_terms")
                                  ? spec.at("n_terms").get<std::size_t>()
                                  : family.size();

  json checks = spec.value("checks", json::object());
  DiagnosticsReport report;
  {
    const json c = checks.value("reconstruction", json::object());
    const double tol = c.value("tol", 2e-3);
    report.checks.push_back(
        check_covariance_reconstruction(family, grid, n_terms, tol));
  }
  const bool want_parseval = !checks.contains("parseval") ||
                             !checks.at("parseval").is_boolean() ||
                             checks.at("parseval").get<bool>();
  if (want_parseval && grid.dim() == 1) {  // defined on 1-D grids only
    const json c = checks.value("parseval", json::object());
    const double tol = c.is_object() ? c.value("tol", 2e-3) : 2e-3;
    const std::uint64_t seed =
        c.is_object() ? c.value("seed", std::uint64_t(7)) : 7;
    report.checks.push_back(
        check_discrete_parseval(family, grid, n_terms, tol, seed));
  }
  if (family.rate_params() && family.size() >= 16) {
    report.checks.push_back(check_sup_norm_decay(family));
  }
  if (checks.contains("h_norms")) {
    const json c = checks.at("h_norms");
    report.checks.push_back(check_ou_frame_h_norms(
        family, c.value("j_max", std::size_t(20)), c.value("tol", 1e-6)));
  }
  if (checks.contains("eigenvalues")) {
    const json c = checks.at("eigenvalues");
    report.checks.push_back(check_eigenvalue_asymptotics(
        family.kernel(), c.value("N", std::size_t(1024)),
        c.value("j_lo", std::size_t(10)), c.value("j_hi", std::size_t(40)),
        c.value("tol", 0.10)));
  }
  if (checks.contains("nonconvex")) {
    const json c = checks.at("nonconvex");
    report.checks.push_back(check_nonconvex_failure(
        double_from_json(c.at("rho"), "rho"),
        c.contains("alpha") ? double_from_json(c.at("alpha"), "alpha") : 1.0,
        c.contains("T") ? double_from_json(c.at("T"), "T") : 1.0,
        c.value("j_max", std::size_t(400)), cfg));
  }

  json resolved = spec;
  resolved["family"] = resolve_family_spec(spec.at("family"));
  resolved["grid"] = resolved_grid(grid);
  resolved["n_terms"] = n_terms;
  json out = json_with_spec(resolved);
  out.update(report_to_json(report));
  write_text(fs::path(opt.out_dir) / "report.json", out.dump(2) + "\n");
  return report.overall() ? 0 : 1;
}

int run_eigs(const GlobalOptions& opt) {
  const json spec = load_spec(opt);
  if (!spec.contains("kernel")) throw SpecError("eigs spec needs a kernel");
  const Kernel kernel = kernel_from_json(spec.at("kernel"));
  const std::size_t n = spec.value("N", std::size_t(1024));
  const std::size_t j_lo = spec.value("j_lo", std::size_t(1));
  const std::size_t j_hi = spec.value("j_hi", std::size_t(40));
  if (j_lo < 1 || j_hi < j_lo || j_hi > n) throw SpecError("bad j range");

  const auto lambda = nystrom_eigenvalues(kernel, n);
  double rho = 1.0, alpha = 1.0, scale = 1.0;
  if (const auto* fou = std::get_if<FractionalOUKernel>(&kernel.kind())) {
    rho = fou->rho;
    alpha = fou->alpha;
  } else if (const auto* ou =
                 std::get_if<OrnsteinUhlenbeckKernel>(&kernel.kind())) {
    alpha = ou->alpha;
    const double sigma = ou->sigma > 0.0 ? ou->sigma : std::sqrt(2.0 * ou->alpha);
    scale = sigma * sigma / (2.0 * ou->alpha);
  } else {
    throw SpecError("eigs expects a fractional OU (or OU) kernel");
  }
  constexpr double pi = 3.141592653589793238462643383279502884;
  const double T = kernel.horizon();
  const double c_rho = alpha * std::tgamma(1.0 + rho) * std::sin(pi * rho / 2.0) / pi;

  json resolved = spec;
  resolved["N"] = n;
  resolved["j_lo"] = j_lo;
  resolved["j_hi"] = j_hi;
  std::string csv = csv_preamble(resolved);
  csv += "j,lambda_hat,asymptote,ratio\n";
  for (std::size_t j = j_lo; j <= j_hi; ++j) {
    const double asymptote = scale * 2.0 * std::pow(T, 1.0 + rho) * pi * c_rho /
                             std::pow(pi * double(j), 1.0 + rho);
    csv += std::to_string(j) + "," + fmt(lambda[j - 1]) + "," + fmt(asymptote) +
           "," + fmt(lambda[j - 1] / asymptote) + "\n";
  }
  write_text(fs::path(opt.out_dir) / "eigenvalues.csv", csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"series expansions of Gaussian processes: build, sample, verify"};
  app.require_subcommand(1);
  app.fallthrough();  // --out/--seed/--threads may follow the subcommand

  GlobalOptions opt;
  std::uint64_t seed_flag = 0;
  bool seed_set = false;
  app.add_option("--out", opt.out_dir, "output directory")
      ->capture_default_str();
  app.add_option("--threads", opt.threads, "worker threads (0 = auto)")
      ->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed_flag, "seed override");

  const auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--spec", opt.spec_path, "run spec (JSON)")->required();
    return sub;
  };
  auto* expand = add("expand", "build a family and write family.json");
  auto* sample = add("sample", "sample truncated paths into paths.csv");
  auto* remainder =
      add("remainder", "estimate sup-norm remainders and fit the rate");
  auto* verify = add("verify", "run diagnostic checks, write report.json");
  auto* eigs = add("eigs", "Nystrom eigenvalue table for a kernel");

  CLI11_PARSE(app, argc, argv);
  seed_set = seed_opt->count() > 0;
  if (seed_set) opt.seed_override = seed_flag;

  try {
    fs::create_directories(opt.out_dir);
    if (expand->parsed()) return run_expand(opt);
    if (sample->parsed()) return run_sample(opt);
    if (remainder->parsed()) return run_remainder(opt);
    if (verify->parsed()) return run_verify(opt);
    if (eigs->parsed()) return run_eigs(opt);
    std::cerr << "no subcommand\n";
    return 2;
  } catch (const SpecError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
}
