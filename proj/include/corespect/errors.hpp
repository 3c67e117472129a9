#pragma once

#include <stdexcept>
#include <string>

namespace corespect {

// Error taxonomy mirrors the CLI exit codes: config errors exit 2, data
// errors exit 3, internal invariant violations exit 4.

struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct data_error : std::runtime_error {
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct invariant_error : std::runtime_error {
  explicit invariant_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace corespect
