#pragma once

#include <json.hpp>
#include <string>

#include "gpseries/diagnostics.hpp"
#include "gpseries/expansions.hpp"
#include "gpseries/kernels.hpp"

namespace gpseries {

// Doubles cross the file boundary as C99 hex-float strings so round trips
// are bit-exact; parsers also accept plain JSON numbers.
std::string double_to_hex(double v);
double double_from_json(const nlohmann::json& j, const std::string& what);

nlohmann::json kernel_to_json(const Kernel& kernel);
Kernel kernel_from_json(const nlohmann::json& j);

nlohmann::json term_to_json(const AnalyticTerm& term);
AnalyticTerm term_from_json(const nlohmann::json& j);

nlohmann::json family_to_json(const ExpansionFamily& family);
ExpansionFamily family_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const DiagnosticsReport& report);

// Builds a family from a CLI-style spec {"provenance": tag, ...params}.
ExpansionFamily build_family_from_spec(const nlohmann::json& spec,
                                       const QuadratureConfig& cfg = {},
                                       unsigned threads = 1);

// Same spec with every omitted default materialized, for echoing into
// output files.
nlohmann::json resolve_family_spec(const nlohmann::json& spec);

}  // namespace gpseries
