#pragma once

#include <stdexcept>
#include <string>

namespace gpseries {

// Thrown when an iteration or quadrature fails to reach its contract
// (Newton stall, panel budget exhausted, negative frame coefficient, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown for malformed run specifications and serialized documents.
class SpecError : public std::runtime_error {
 public:
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gpseries
