#pragma once

#include <stdexcept>
#include <string>

namespace symindex {

// Bad arguments, malformed configs, dimension mismatches. CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric failures (non-convergent quadrature, non-integrable kernels, overflow guards,
// step-size violations). CLI maps this to exit code 2.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class QuadratureError : public NumericError {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : NumericError(what), achieved_error_(achieved_error) {}
  double achieved_error() const { return achieved_error_; }

 private:
  double achieved_error_;
};

class IntegrabilityError : public NumericError {
 public:
  explicit IntegrabilityError(const std::string& what) : NumericError(what) {}
};

}  // namespace symindex
