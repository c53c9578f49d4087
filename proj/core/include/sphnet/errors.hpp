#pragma once

#include <stdexcept>
#include <string>

namespace sphnet {

// Invalid static configuration (layouts, paths, unknown elements, ...).
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Runtime contract violation (shape mismatch, non-symmetric input, ...).
struct contract_error : std::runtime_error {
  explicit contract_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite value encountered where finite numbers are required (NaN loss).
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file (bad magic, truncated payload, unparsable text).
struct format_error : std::runtime_error {
  explicit format_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sphnet
