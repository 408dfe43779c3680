#include "gpseries/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "gpseries/errors.hpp"

namespace gpseries {

using nlohmann::json;

std::string double_to_hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double double_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
      throw SpecError("cannot parse number for " + what + ": " + s);
    }
    return v;
  }
  throw SpecError("expected a number (or hex string) for " + what);
}

namespace {

double field_num(const json& j, const std::string& key) {
  if (!j.contains(key)) throw SpecError("missing field: " + key);
  return double_from_json(j.at(key), key);
}

double field_num_or(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  return double_from_json(j.at(key), key);
}

std::int64_t field_int(const json& j, const std::string& key) {
  if (!j.contains(key)) throw SpecError("missing field: " + key);
  if (!j.at(key).is_number_integer()) {
    throw SpecError("expected an integer for " + key);
  }
  return j.at(key).get<std::int64_t>();
}

std::int64_t field_int_or(const json& j, const std::string& key,
                          std::int64_t fallback) {
  if (!j.contains(key)) return fallback;
  return field_int(j, key);
}

std::string field_str(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw SpecError("missing string field: " + key);
  }
  return j.at(key).get<std::string>();
}

json hex(double v) { return json(double_to_hex(v)); }

}  // namespace

json kernel_to_json(const Kernel& kernel) {
  json out;
  std::visit(
      [&out](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, BrownianMotionKernel>) {
          out = {{"kind", "brownian_motion"}, {"T", hex(k.horizon)}};
        } else if constexpr (std::is_same_v<K, BrownianBridgeKernel>) {
          out = {{"kind", "brownian_bridge"}, {"T", hex(k.horizon)}};
        } else if constexpr (std::is_same_v<K, FractionalBMKernel>) {
          out = {{"kind", "fractional_bm"},
                 {"rho", hex(k.rho)},
                 {"T", hex(k.horizon)}};
        } else if constexpr (std::is_same_v<K, OrnsteinUhlenbeckKernel>) {
          out = {{"kind", "ornstein_uhlenbeck"},
                 {"alpha", hex(k.alpha)},
                 {"sigma", hex(k.sigma)},
                 {"T", hex(k.horizon)}};
        } else if constexpr (std::is_same_v<K, FractionalOUKernel>) {
          out = {{"kind", "fractional_ou"},
                 {"rho", hex(k.rho)},
                 {"alpha", hex(k.alpha)},
                 {"T", hex(k.horizon)}};
        } else if constexpr (std::is_same_v<K, StationaryConvexKernel>) {
          if (!k.tabulated()) {
            throw SpecError(
                "closed-form stationary kernels have no JSON representation");
          }
          json values = json::array();
          for (double v : k.table()) values.push_back(hex(v));
          out = {{"kind", "stationary_convex_table"},
                 {"values", std::move(values)},
                 {"step", hex(k.step())},
                 {"max_step", hex(k.step())},
                 {"T", hex(k.horizon())}};
        } else if constexpr (std::is_same_v<K, TriangleKernelSpec>) {
          out = {{"kind", "triangle"},
                 {"support", hex(k.support)},
                 {"T", hex(k.horizon)}};
        } else {
          static_assert(std::is_same_v<K, TensorKernelSpec>);
          json axes = json::array();
          for (const auto& axis : k.axes) axes.push_back(kernel_to_json(axis));
          out = {{"kind", "tensor"}, {"axes", std::move(axes)}};
        }
      },
      kernel.kind());
  return out;
}

Kernel kernel_from_json(const json& j) {
  const std::string kind = field_str(j, "kind");
  if (kind == "brownian_motion") {
    return Kernel(BrownianMotionKernel{field_num(j, "T")});
  }
  if (kind == "brownian_bridge") {
    return Kernel(BrownianBridgeKernel{field_num(j, "T")});
  }
  if (kind == "fractional_bm") {
    return Kernel(FractionalBMKernel{field_num(j, "rho"), field_num(j, "T")});
  }
  if (kind == "ornstein_uhlenbeck") {
    return Kernel(OrnsteinUhlenbeckKernel{
        field_num(j, "alpha"), field_num_or(j, "sigma", 0.0), field_num(j, "T")});
  }
  if (kind == "fractional_ou") {
    return Kernel(FractionalOUKernel{field_num(j, "rho"), field_num(j, "alpha"),
                                     field_num(j, "T")});
  }
  if (kind == "triangle") {
    return Kernel(TriangleKernelSpec{field_num(j, "support"), field_num(j, "T")});
  }
  if (kind == "stationary_convex_table") {
    if (!j.contains("values") || !j.at("values").is_array()) {
      throw SpecError("stationary_convex_table needs a values array");
    }
    std::vector<double> values;
    for (const auto& v : j.at("values")) {
      values.push_back(double_from_json(v, "values[]"));
    }
    const double step = field_num(j, "step");
    const double max_step = field_num_or(j, "max_step", step);
    return Kernel(
        StationaryConvexKernel(std::move(values), step, max_step, field_num(j, "T")));
  }
  if (kind == "tensor") {
    if (!j.contains("axes") || !j.at("axes").is_array()) {
      throw SpecError("tensor kernel needs an axes array");
    }
    std::vector<Kernel> axes;
    for (const auto& axis : j.at("axes")) axes.push_back(kernel_from_json(axis));
    return Kernel(TensorKernelSpec{std::move(axes)});
  }
  throw SpecError("unknown kernel kind: " + kind);
}

json term_to_json(const AnalyticTerm& term) {
  json out;
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ConstTerm>) {
          out = {{"kind", "const"}, {"a", hex(k.a)}};
        } else if constexpr (std::is_same_v<K, RampTerm>) {
          out = {{"kind", "ramp"}, {"slope", hex(k.slope)}};
        } else if constexpr (std::is_same_v<K, TrigTerm>) {
          out = {{"kind", "trig"},
                 {"a_cos", hex(k.a_cos)},
                 {"a_sin", hex(k.a_sin)},
                 {"omega", hex(k.omega)}};
        } else if constexpr (std::is_same_v<K, TrigAffineTerm>) {
          out = {{"kind", "trig_affine"},
                 {"a0", hex(k.a0)},
                 {"a_cos", hex(k.a_cos)},
                 {"a_sin", hex(k.a_sin)},
                 {"omega", hex(k.omega)}};
        } else if constexpr (std::is_same_v<K, DampedMixTerm>) {
          out = {{"kind", "damped_mix"}, {"a_exp", hex(k.a_exp)},
                 {"alpha", hex(k.alpha)}, {"a_cos", hex(k.a_cos)},
                 {"a_sin", hex(k.a_sin)}, {"omega", hex(k.omega)},
                 {"a0", hex(k.a0)}};
        } else if constexpr (std::is_same_v<K, WaveletPrimitiveTerm>) {
          out = {{"kind", "wavelet_primitive"},
                 {"level", k.level},
                 {"shift", k.shift},
                 {"amplitude", hex(k.amplitude)},
                 {"primitive", "haar"}};
        } else if constexpr (std::is_same_v<K, LampertiWarpTerm>) {
          out = {{"kind", "lamperti_warp"}, {"a", hex(k.a)},
                 {"alpha", hex(k.alpha)}, {"T", hex(k.horizon)},
                 {"b", hex(k.b)}};
        } else {
          static_assert(std::is_same_v<K, TensorProductTerm>);
          json factors = json::array();
          for (const auto& f : k.factors) factors.push_back(term_to_json(f));
          out = {{"kind", "tensor_product"}, {"factors", std::move(factors)}};
        }
      },
      term.kind());
  out["horizon"] = hex(term.horizon());
  out["sup_bound"] = hex(term.sup_bound());  // informational; recomputed on load
  return out;
}

AnalyticTerm term_from_json(const json& j) {
  const std::string kind = field_str(j, "kind");
  const double horizon = field_num_or(j, "horizon", 1.0);
  if (kind == "const") {
    return AnalyticTerm(ConstTerm{field_num(j, "a")}, horizon);
  }
  if (kind == "ramp") {
    return AnalyticTerm(RampTerm{field_num(j, "slope")}, horizon);
  }
  if (kind == "trig") {
    return AnalyticTerm(TrigTerm{field_num(j, "a_cos"), field_num(j, "a_sin"),
                                 field_num(j, "omega")},
                        horizon);
  }
  if (kind == "trig_affine") {
    return AnalyticTerm(
        TrigAffineTerm{field_num(j, "a0"), field_num(j, "a_cos"),
                       field_num(j, "a_sin"), field_num(j, "omega")},
        horizon);
  }
  if (kind == "damped_mix") {
    return AnalyticTerm(
        DampedMixTerm{field_num(j, "a_exp"), field_num(j, "alpha"),
                      field_num(j, "a_cos"), field_num(j, "a_sin"),
                      field_num(j, "omega"), field_num(j, "a0")},
        horizon);
  }
  if (kind == "wavelet_primitive") {
    const std::string primitive =
        j.contains("primitive") ? field_str(j, "primitive") : "haar";
    if (primitive != "haar") throw SpecError("unknown wavelet primitive");
    return AnalyticTerm(
        WaveletPrimitiveTerm{int(field_int(j, "level")),
                             long(field_int(j, "shift")),
                             field_num_or(j, "amplitude", 1.0),
                             WaveletPrimitiveId::Haar},
        horizon);
  }
  if (kind == "lamperti_warp") {
    return AnalyticTerm(
        LampertiWarpTerm{field_num(j, "a"), field_num(j, "alpha"),
                         field_num(j, "T"), field_num(j, "b")},
        horizon);
  }
  if (kind == "tensor_product") {
    if (!j.contains("factors") || !j.at("factors").is_array()) {
      throw SpecError("tensor term needs a factors array");
    }
    TensorProductTerm tp;
    for (const auto& f : j.at("factors")) tp.factors.push_back(term_from_json(f));
    return AnalyticTerm(std::move(tp), horizon);
  }
  throw SpecError("unknown term kind: " + kind);
}

json family_to_json(const ExpansionFamily& family) {
  json out;
  out["format"] = "gpseries.family/1";
  out["provenance"] = provenance_tag(family.provenance());
  out["kernel"] = kernel_to_json(family.kernel());
  if (family.rate_params()) {
    out["rate_params"] = {{"theta", hex(family.rate_params()->theta)},
                          {"log_exponent", hex(family.rate_params()->log_exponent)}};
  } else {
    out["rate_params"] = nullptr;
  }
  out["notes"] = family.notes();
  json terms = json::array();
  for (const auto& t : family.terms()) terms.push_back(term_to_json(t));
  out["terms"] = std::move(terms);
  return out;
}

ExpansionFamily family_from_json(const json& j) {
  if (!j.contains("format") || j.at("format") != "gpseries.family/1") {
    throw SpecError("not a gpseries family document");
  }
  const Provenance prov = provenance_from_tag(field_str(j, "provenance"));
  Kernel kernel = kernel_from_json(j.at("kernel"));
  std::optional<RateParams> rate;
  if (j.contains("rate_params") && !j.at("rate_params").is_null()) {
    rate = RateParams{field_num(j.at("rate_params"), "theta"),
                      field_num(j.at("rate_params"), "log_exponent")};
  }
  std::vector<std::string> notes;
  if (j.contains("notes")) {
    for (const auto& n : j.at("notes")) notes.push_back(n.get<std::string>());
  }
  if (!j.contains("terms") || !j.at("terms").is_array()) {
    throw SpecError("family document needs a terms array");
  }
  std::vector<AnalyticTerm> terms;
  terms.reserve(j.at("terms").size());
  for (const auto& t : j.at("terms")) terms.push_back(term_from_json(t));
  return ExpansionFamily(std::move(terms), std::move(kernel), prov, rate,
                         std::move(notes));
}

json report_to_json(const DiagnosticsReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"status", c.pass ? "pass" : "fail"},
                      {"measured", c.measured},
                      {"tolerance", c.tolerance},
                      {"anchor", c.anchor}});
  }
  return {{"checks", std::move(checks)}, {"overall", report.overall()}};
}

ExpansionFamily build_family_from_spec(const json& spec,
                                       const QuadratureConfig& cfg,
                                       unsigned threads) {
  if (!spec.is_object()) throw SpecError("family spec must be an object");
  const std::string tag = field_str(spec, "provenance");
  const Provenance prov = provenance_from_tag(tag);
  switch (prov) {
    case Provenance::BrownianKL:
      return build_bm_kl(field_num_or(spec, "T", 1.0),
                         std::size_t(field_int(spec, "n")));
    case Provenance::BrownianSplitFrame:
      return build_bm_split_frame(field_num_or(spec, "T", 1.0),
                                  std::size_t(field_int(spec, "n_pairs")));
    case Provenance::BrownianPaleyWiener:
      return build_bm_paley_wiener(field_num_or(spec, "T", 1.0),
                                   std::size_t(field_int(spec, "n")));
    case Provenance::BrownianWavelet:
      return build_bm_wavelet(
          field_num_or(spec, "T", 1.0), int(field_int_or(spec, "level_min", -4)),
          int(field_int_or(spec, "level_max", 12)),
          std::size_t(field_int_or(spec, "max_shifts_per_level", 0)));
    case Provenance::FractionalBMDvZ:
      return build_fbm_dvz(field_num(spec, "rho"), field_num_or(spec, "T", 1.0),
                           std::size_t(field_int(spec, "n_pairs")));
    case Provenance::BridgeKL:
      return build_bridge_kl(field_num_or(spec, "T", 1.0),
                             std::size_t(field_int(spec, "n")));
    case Provenance::OUConvolution:
      return build_ou_conv(field_num(spec, "alpha"),
                           field_num_or(spec, "sigma", 0.0),
                           field_num_or(spec, "T", 1.0),
                           std::size_t(field_int(spec, "n")));
    case Provenance::OULamperti:
      return build_ou_lamperti(field_num(spec, "alpha"),
                               field_num_or(spec, "sigma", 0.0),
                               field_num_or(spec, "T", 1.0),
                               std::size_t(field_int(spec, "n")));
    case Provenance::FOUTrigFrame:
      return build_fou_trig(field_num(spec, "rho"), field_num(spec, "alpha"),
                            field_num_or(spec, "T", 1.0),
                            std::size_t(field_int(spec, "n_coeffs")), cfg,
                            threads);
    case Provenance::ConvexStationaryTrigFrame: {
      if (!spec.contains("kernel")) {
        throw SpecError("convex_trig spec needs a kernel");
      }
      const Kernel kernel = kernel_from_json(spec.at("kernel"));
      const double T = field_num_or(spec, "T", kernel.horizon());
      return build_convex_stationary_trig(
          kernel, T, std::size_t(field_int(spec, "n_coeffs")), cfg, threads);
    }
    case Provenance::TensorSheet: {
      if (!spec.contains("families") || !spec.at("families").is_array()) {
        throw SpecError("tensor_sheet spec needs a families array");
      }
      std::vector<ExpansionFamily> families;
      for (const auto& f : spec.at("families")) {
        families.push_back(build_family_from_spec(f, cfg, threads));
      }
      return build_tensor_sheet(families,
                                std::size_t(field_int(spec, "max_terms")));
    }
  }
  throw SpecError("unhandled provenance tag: " + tag);
}

json resolve_family_spec(const json& spec) {
  json out = spec;
  if (!spec.is_object()) throw SpecError("family spec must be an object");
  const Provenance prov = provenance_from_tag(field_str(spec, "provenance"));
  const auto put_default = [&out](const char* key, const json& v) {
    if (!out.contains(key)) out[key] = v;
  };
  switch (prov) {
    case Provenance::BrownianWavelet:
      put_default("T", 1.0);
      put_default("level_min", -4);
      put_default("level_max", 12);
      put_default("max_shifts_per_level", 0);
      break;
    case Provenance::OUConvolution:
    case Provenance::OULamperti:
      put_default("T", 1.0);
      if (!out.contains("sigma") ||
          double_from_json(out.at("sigma"), "sigma") <= 0.0) {
        out["sigma"] =
            std::sqrt(2.0 * double_from_json(out.at("alpha"), "alpha"));
      }
      break;
    case Provenance::TensorSheet: {
      json resolved = json::array();
      for (const auto& f : spec.at("families")) {
        resolved.push_back(resolve_family_spec(f));
      }
      out["families"] = std::move(resolved);
      break;
    }
    default:
      put_default("T", 1.0);
      break;
  }
  return out;
}

}  // namespace gpseries
