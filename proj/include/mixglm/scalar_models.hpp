#ifndef MIXGLM_SCALAR_MODELS_HPP
#define MIXGLM_SCALAR_MODELS_HPP

#include <functional>
#include <string>

#include "mixglm/numerics.hpp"
#include "mixglm/rng.hpp"

namespace mixglm {

enum class LinkKind { MixedLinearRegression, MixedPhaseRetrieval, Custom };

// User-supplied conditional law p(y|g). Either `density` or all three moment
// functions must be present; the theory engine consumes only m0, m1, m2 and
// derives everything else from them.
struct CustomLink {
  std::function<double(double /*g*/, Rng&)> sampler;
  std::function<double(double /*y*/, double /*g*/)> density;  // may be empty
  std::function<double(double /*y*/)> m0;                     // may be empty
  std::function<double(double /*y*/)> m1;
  std::function<double(double /*y*/)> m2;
  Interval support{-std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity()};
  double y_scale = 1.0;  // std-dev proxy of Y, used for tail truncation
};

// The scalar observation channel Y = q(G, eps), G ~ N(0,1): conditional law,
// sampler, and the Gaussian moment functions m_k(y) = E[G^k p(y|G)].
class LinkModel {
 public:
  static LinkModel mixed_linear_regression(double sigma);
  static LinkModel mixed_phase_retrieval(double sigma);
  static LinkModel custom(CustomLink link);

  LinkKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  bool closed_form_moments() const { return closed_form_moments_; }
  std::string name() const;

  // Conceptual support of Y (may be unbounded).
  Interval support() const { return support_; }
  // Support truncated at tail_sigmas standard deviations of Y; every
  // observation-side integral in the theory engine runs over this interval.
  Interval integration_interval(double tail_sigmas) const;

  double sample_y(double g, Rng& rng) const;

  bool has_density() const;
  // p(y|g); throws std::domain_error for a degenerate (sigma = 0) channel.
  double cond_density(double y, double g) const;

  // m_k(y) = E[G^k p(y|G)], k in {0,1,2}. Closed forms for the built-in
  // models, Gauss-Hermite fallback otherwise.
  double moment_m(int k, double y, const QuadratureSpec& spec = {}) const;

  // m2(y)/m0(y), evaluated in a cancellation-free way for the built-ins.
  double ratio_delta(double y, const QuadratureSpec& spec = {}) const;

 private:
  LinkModel() = default;

  LinkKind kind_ = LinkKind::Custom;
  double sigma_ = 0.0;
  bool closed_form_moments_ = false;
  Interval support_{};
  double y_scale_ = 1.0;
  CustomLink custom_{};
};

}  // namespace mixglm

#endif  // MIXGLM_SCALAR_MODELS_HPP
