#pragma once

#include <stdexcept>
#include <string>

namespace cfrecs {

// Bad input data, schema mismatches, malformed files. CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite losses or other numeric breakdown. CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cfrecs
