#ifndef MIXGLM_PREPROCESSORS_HPP
#define MIXGLM_PREPROCESSORS_HPP

#include <functional>
#include <string>

#include "mixglm/scalar_models.hpp"

namespace mixglm {

// Scalar preprocessing map applied to the observations, either on the linear
// path (L) or inside the spectral matrix (T), together with its extremes
// over the observation support. For spectral use the extremes gate every
// lambda bracket, so sup_on_support must be finite and positive.
struct Preprocessor {
  std::function<double(double)> map;
  double sup_on_support = 0.0;
  double inf_on_support = 0.0;
  bool lipschitz = true;
  std::string name;

  double operator()(double y) const { return map(y); }

  // Throws std::invalid_argument if the spectral-side requirements fail
  // (finite inf, positive finite sup, map not identically zero on a grid).
  void validate_spectral(const LinkModel& model, const QuadratureSpec& spec = {}) const;
};

// L*(y) = m1(y)/m0(y), the overlap-maximizing linear preprocessing function.
// Throws IneffectiveLinearError when every linear estimator has vanishing
// overlap (the defining integral is zero, e.g. phase retrieval).
Preprocessor optimal_linear(const LinkModel& model, const QuadratureSpec& spec = {});

// T_i*(y) for signal in {1, 2}: the overlap-maximizing spectral map
//   T_1* = 1 - 1/(alpha m2/m0 + 1-alpha),  T_2* = 1 - 1/((1-alpha) m2/m0 + alpha).
// Requires alpha in (1/2, 1).
Preprocessor optimal_spectral(const LinkModel& model, double alpha, int signal,
                              const QuadratureSpec& spec = {});

// Literature baselines, truncated exactly as used in the experiments.
Preprocessor baseline_ycs();  // min(y^2, 10)
Preprocessor baseline_lal();  // max(1 - 1/y^2, -10)

// Constant map (diagnostics; makes the spectral matrix a plain Wishart).
Preprocessor constant_preprocessor(double c);

// User map with declared extremes, validated by grid scan over the support.
Preprocessor custom_preprocessor(std::function<double(double)> map, double sup,
                                 double inf, bool lipschitz, std::string name,
                                 const LinkModel& model,
                                 const QuadratureSpec& spec = {});

// Same map scaled by c > 0. Overlap predictions are invariant under this.
Preprocessor scaled(const Preprocessor& p, double c);

}  // namespace mixglm

#endif  // MIXGLM_PREPROCESSORS_HPP
