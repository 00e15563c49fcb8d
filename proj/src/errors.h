#pragma once

#include <stdexcept>
#include <string>

namespace urec {

// Error taxonomy maps onto the CLI exit-code contract:
// 1 = usage/config, 2 = data/artifact, 3 = numerical failure.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace urec
