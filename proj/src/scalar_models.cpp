#include "mixglm/scalar_models.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mixglm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925;

double normal_pdf(double y, double variance) {
  return std::exp(-0.5 * y * y / variance) / std::sqrt(kTwoPi * variance);
}

}  // namespace

LinkModel LinkModel::mixed_linear_regression(double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  LinkModel m;
  m.kind_ = LinkKind::MixedLinearRegression;
  m.sigma_ = sigma;
  m.closed_form_moments_ = true;
  m.support_ = {-kInf, kInf};
  m.y_scale_ = std::sqrt(1.0 + sigma * sigma);
  return m;
}

LinkModel LinkModel::mixed_phase_retrieval(double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  LinkModel m;
  m.kind_ = LinkKind::MixedPhaseRetrieval;
  m.sigma_ = sigma;
  m.closed_form_moments_ = true;
  // With noise the channel output can go negative; noiseless |g| cannot.
  m.support_ = (sigma > 0.0) ? Interval{-kInf, kInf} : Interval{0.0, kInf};
  m.y_scale_ = std::sqrt(1.0 + sigma * sigma);
  return m;
}

LinkModel LinkModel::custom(CustomLink link) {
  const bool has_moments = link.m0 && link.m1 && link.m2;
  if (!link.density && !has_moments)
    throw std::invalid_argument(
        "custom link must provide a density or all of m0, m1, m2");
  if (!(link.y_scale > 0.0)) throw std::invalid_argument("y_scale must be > 0");
  LinkModel m;
  m.kind_ = LinkKind::Custom;
  m.sigma_ = 0.0;
  m.closed_form_moments_ = has_moments;
  m.support_ = link.support;
  m.y_scale_ = link.y_scale;
  m.custom_ = std::move(link);
  return m;
}

std::string LinkModel::name() const {
  switch (kind_) {
    case LinkKind::MixedLinearRegression: return "mlr";
    case LinkKind::MixedPhaseRetrieval: return "pr";
    default: return "custom";
  }
}

Interval LinkModel::integration_interval(double tail_sigmas) const {
  if (!(tail_sigmas > 0.0)) throw std::invalid_argument("tail_sigmas must be > 0");
  const double half_width = tail_sigmas * y_scale_;
  Interval out{std::max(support_.lo, -half_width), std::min(support_.hi, half_width)};
  if (!(out.hi > out.lo)) throw std::invalid_argument("empty integration interval");
  return out;
}

double LinkModel::sample_y(double g, Rng& rng) const {
  switch (kind_) {
    case LinkKind::MixedLinearRegression:
      return sigma_ > 0.0 ? g + sigma_ * rng.gaussian() : g;
    case LinkKind::MixedPhaseRetrieval:
      return sigma_ > 0.0 ? std::abs(g) + sigma_ * rng.gaussian() : std::abs(g);
    default:
      if (!custom_.sampler) throw std::domain_error("custom link has no sampler");
      return custom_.sampler(g, rng);
  }
}

bool LinkModel::has_density() const {
  if (kind_ == LinkKind::Custom) return static_cast<bool>(custom_.density);
  return sigma_ > 0.0;
}

double LinkModel::cond_density(double y, double g) const {
  switch (kind_) {
    case LinkKind::MixedLinearRegression:
      if (sigma_ == 0.0)
        throw std::domain_error("cond_density: degenerate noiseless channel");
      return normal_pdf(y - g, sigma_ * sigma_);
    case LinkKind::MixedPhaseRetrieval:
      if (sigma_ == 0.0)
        throw std::domain_error("cond_density: degenerate noiseless channel");
      return normal_pdf(y - std::abs(g), sigma_ * sigma_);
    default:
      if (!custom_.density) throw std::domain_error("custom link has no density");
      return custom_.density(y, g);
  }
}

double LinkModel::moment_m(int k, double y, const QuadratureSpec& spec) const {
  if (k < 0 || k > 2)
    throw std::invalid_argument("moment_m: k must be in {0, 1, 2}");

  const double s2 = 1.0 + sigma_ * sigma_;
  switch (kind_) {
    case LinkKind::MixedLinearRegression: {
      const double m0 = normal_pdf(y, s2);
      if (k == 0) return m0;
      if (k == 1) return m0 * y / s2;
      return m0 * (y * y + sigma_ * sigma_ + std::pow(sigma_, 4)) / (s2 * s2);
    }
    case LinkKind::MixedPhaseRetrieval: {
      if (k == 1) return 0.0;  // odd Gaussian moment against an even channel
      if (sigma_ == 0.0) {
        if (y < 0.0) return 0.0;
        const double m0 = 2.0 * normal_pdf(y, 1.0);  // folded standard normal
        return k == 0 ? m0 : m0 * y * y;
      }
      const double z = y / std::sqrt(2.0 * sigma_ * sigma_ * s2);
      const double m0 = normal_pdf(y, s2) * (1.0 + std::erf(z));
      if (k == 0) return m0;
      const double quad = (y * y + sigma_ * sigma_ + std::pow(sigma_, 4)) / (s2 * s2);
      const double half_line =
          sigma_ * y * std::exp(-0.5 * y * y / (sigma_ * sigma_)) /
          (3.14159265358979323846 * s2 * s2);
      return m0 * quad + half_line;
    }
    default: {
      if (closed_form_moments_) {
        if (k == 0) return custom_.m0(y);
        if (k == 1) return custom_.m1(y);
        return custom_.m2(y);
      }
      // Adaptive panels instead of a fixed Hermite rule: user densities may
      // be narrow or kinked in g (the modulus link is), which a fixed-node
      // rule cannot resolve to the accuracy the moment layer guarantees.
      const double tail = spec.y_tail_sigmas;
      return integrate_y(
          [&](double g) {
            const double p = custom_.density(y, g);
            const double w = normal_pdf(g, 1.0);
            if (k == 0) return w * p;
            if (k == 1) return w * g * p;
            return w * g * g * p;
          },
          {-tail, tail}, spec);
    }
  }
}

double LinkModel::ratio_delta(double y, const QuadratureSpec& spec) const {
  const double s2 = 1.0 + sigma_ * sigma_;
  switch (kind_) {
    case LinkKind::MixedLinearRegression:
      return (y * y + sigma_ * sigma_ + std::pow(sigma_, 4)) / (s2 * s2);
    case LinkKind::MixedPhaseRetrieval: {
      if (sigma_ == 0.0) {
        if (y < 0.0)
          throw std::domain_error("ratio_delta: y outside the noiseless support");
        return y * y;
      }
      const double quad = (y * y + sigma_ * sigma_ + std::pow(sigma_, 4)) / (s2 * s2);
      const double z = y / std::sqrt(2.0 * sigma_ * sigma_ * s2);
      // exp(-z^2) / (1 + erf(z)) = 1 / erfcx(-z); branch so erfcx only sees
      // non-negative arguments and the far-left tail stays finite.
      double ratio;
      if (z >= 0.0) {
        ratio = std::exp(-z * z) / (1.0 + std::erf(z));
      } else {
        ratio = 1.0 / erfcx(-z);
      }
      const double tail = std::sqrt(2.0 / 3.14159265358979323846) * sigma_ * y *
                          ratio / std::pow(s2, 1.5);
      return quad + tail;
    }
    default: {
      const double m0 = moment_m(0, y, spec);
      if (m0 == 0.0) {
        std::ostringstream msg;
        msg << "ratio_delta: m0 vanishes at y = " << y;
        throw std::domain_error(msg.str());
      }
      return moment_m(2, y, spec) / m0;
    }
  }
}

}  // namespace mixglm
