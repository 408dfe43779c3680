#pragma once

namespace gpseries {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gpseries
