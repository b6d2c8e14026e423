#ifndef MIXGLM_NUMERICS_HPP
#define MIXGLM_NUMERICS_HPP

#include <functional>
#include <vector>

#include "mixglm/errors.hpp"

namespace mixglm {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

// Tolerances shared by every deterministic theory computation.
struct QuadratureSpec {
  int hermite_order = 80;       // nodes for Gaussian expectations
  double y_tail_sigmas = 12.0;  // truncation of observation-support integrals
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  double root_tol = 1e-10;      // absolute tolerance on root arguments

  void validate() const;  // throws std::invalid_argument on bad fields
};

// Probabilists' Gauss-Hermite rule: nodes g_j and weights w_j such that
// sum_j w_j f(g_j) approximates E[f(G)] with G ~ N(0,1). Weights sum to 1.
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached per order; thread-safe.
const HermiteRule& hermite_rule(int order);

// E[f(G)], G ~ N(0,1). Exact for polynomials of degree < 2*order.
// Throws std::domain_error naming the node if f is non-finite at any node.
double gauss_hermite_expect(const std::function<double(double)>& f,
                            const QuadratureSpec& spec = {});

// Adaptive Gauss-Kronrod quadrature of f over [support.lo, support.hi],
// refined until the error bound is below max(abs_tol, rel_tol * |I|).
// Throws QuadratureError (carrying the achieved estimate) on budget blowout.
double integrate_y(const std::function<double(double)>& f, Interval support,
                   const QuadratureSpec& spec = {});

// Root of a strictly monotone f on [lo, hi] with f(lo) f(hi) <= 0, located by
// bisection interleaved with guarded secant steps. Stops once the bracket is
// narrower than tol. Throws BracketError if the interval has no sign change.
double find_root_monotone(const std::function<double(double)>& f, double lo,
                          double hi, double tol = 1e-10);

// Starting from hi = lo * (1 + 1e-6), doubles the bracket width until f
// changes sign or max_doublings is hit (then throws BracketError).
double expand_bracket(const std::function<double(double)>& f, double lo,
                      int max_doublings = 60);

// Scaled complementary error function exp(x^2) erfc(x), stable for large x.
double erfcx(double x);

}  // namespace mixglm

#endif  // MIXGLM_NUMERICS_HPP
