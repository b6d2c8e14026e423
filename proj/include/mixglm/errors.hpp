#ifndef MIXGLM_ERRORS_HPP
#define MIXGLM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mixglm {

// No sign change on the supplied interval.
class BracketError : public std::runtime_error {
 public:
  explicit BracketError(const std::string& what) : std::runtime_error(what) {}
};

// Adaptive quadrature exhausted its panel budget. Carries the best estimate
// reached so far together with the error bound at that point.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}
  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

// The linear estimator has vanishing asymptotic overlap for every choice of
// preprocessing function (the defining integral is zero). Carries that value.
class IneffectiveLinearError : public std::runtime_error {
 public:
  IneffectiveLinearError(const std::string& what, double integral_value)
      : std::runtime_error(what), integral_value_(integral_value) {}
  double integral_value() const noexcept { return integral_value_; }

 private:
  double integral_value_;
};

// Aspect ratio below the spectral threshold for the requested quantity.
class SubcriticalError : public std::runtime_error {
 public:
  explicit SubcriticalError(const std::string& what) : std::runtime_error(what) {}
};

// GAMP iterates blew up (or a state-evolution scale collapsed).
class InstabilityError : public std::runtime_error {
 public:
  explicit InstabilityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mixglm

#endif  // MIXGLM_ERRORS_HPP
