#include "mixglm/preprocessors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mixglm {

namespace {

struct GridExtrema {
  double min_value;
  double max_value;
};

// Coarse scan followed by local refinement around the best cell; good enough
// for the continuous maps in the catalog (design decision: 1e-6 refinement).
GridExtrema scan_extrema(const std::function<double(double)>& f, Interval iv) {
  constexpr int kCoarse = 4096;
  const double step = iv.width() / kCoarse;
  double min_v = std::numeric_limits<double>::infinity();
  double max_v = -min_v;
  double argmin = iv.lo, argmax = iv.lo;
  for (int i = 0; i <= kCoarse; ++i) {
    const double y = iv.lo + i * step;
    const double v = f(y);
    if (v < min_v) { min_v = v; argmin = y; }
    if (v > max_v) { max_v = v; argmax = y; }
  }
  auto refine = [&](double center, double sign) {
    double h = step;
    double best_x = center, best = sign * f(center);
    while (h > 1e-6) {
      for (double x : {best_x - h, best_x - 0.5 * h, best_x + 0.5 * h, best_x + h}) {
        const double xc = std::clamp(x, iv.lo, iv.hi);
        const double v = sign * f(xc);
        if (v > best) { best = v; best_x = xc; }
      }
      h *= 0.5;
    }
    return sign * best;
  };
  return {refine(argmin, -1.0), refine(argmax, +1.0)};
}

}  // namespace

void Preprocessor::validate_spectral(const LinkModel& model,
                                     const QuadratureSpec& spec) const {
  if (!map) throw std::invalid_argument("preprocessor has no map");
  if (!std::isfinite(inf_on_support))
    throw std::invalid_argument("spectral preprocessor must be bounded below");
  if (!(sup_on_support > 0.0) || !std::isfinite(sup_on_support))
    throw std::invalid_argument("spectral preprocessor needs 0 < sup < inf");
  const Interval iv = model.integration_interval(spec.y_tail_sigmas);
  const GridExtrema ex = scan_extrema(map, iv);
  if (ex.max_value > sup_on_support * (1.0 + 1e-9) + 1e-12)
    throw std::invalid_argument("declared sup_on_support is exceeded on the support grid");
  if (ex.min_value < inf_on_support - 1e-9 * std::abs(inf_on_support) - 1e-12)
    throw std::invalid_argument("declared inf_on_support is undercut on the support grid");
  if (std::max(std::abs(ex.min_value), std::abs(ex.max_value)) < 1e-14)
    throw std::invalid_argument("preprocessor is identically zero on the support");
}

Preprocessor optimal_linear(const LinkModel& model, const QuadratureSpec& spec) {
  // Effectiveness gate: the overlap of every linear estimator is controlled by
  // integral of m1^2/m0 over the support; zero means no linear estimator works.
  double effectiveness = 0.0;
  const Interval iv = model.integration_interval(spec.y_tail_sigmas);
  switch (model.kind()) {
    case LinkKind::MixedLinearRegression:
      effectiveness = 1.0 / (1.0 + model.sigma() * model.sigma());
      break;
    case LinkKind::MixedPhaseRetrieval:
      effectiveness = 0.0;  // m1 vanishes identically
      break;
    default:
      effectiveness = integrate_y(
          [&](double y) {
            const double m0 = model.moment_m(0, y, spec);
            const double m1 = model.moment_m(1, y, spec);
            return m0 > 0.0 ? m1 * m1 / m0 : 0.0;
          },
          iv, spec);
      break;
  }
  if (!(effectiveness > 1e-12)) {
    throw IneffectiveLinearError(
        "optimal_linear: linear estimators are ineffective for this model "
        "(integral of m1^2/m0 vanishes)",
        effectiveness);
  }

  Preprocessor p;
  p.name = "optlin";
  p.lipschitz = true;
  if (model.kind() == LinkKind::MixedLinearRegression) {
    const double s2 = 1.0 + model.sigma() * model.sigma();
    p.map = [s2](double y) { return y / s2; };
  } else {
    p.map = [model, spec](double y) {
      const double m0 = model.moment_m(0, y, spec);
      if (m0 == 0.0) return 0.0;
      return model.moment_m(1, y, spec) / m0;
    };
  }
  const GridExtrema ex = scan_extrema(p.map, iv);
  p.inf_on_support = ex.min_value;
  p.sup_on_support = ex.max_value;
  return p;
}

Preprocessor optimal_spectral(const LinkModel& model, double alpha, int signal,
                              const QuadratureSpec& spec) {
  if (!(alpha > 0.5 && alpha < 1.0))
    throw std::invalid_argument("optimal_spectral: alpha must be in (1/2, 1)");
  if (signal != 1 && signal != 2)
    throw std::invalid_argument("optimal_spectral: signal must be 1 or 2");
  const double a = (signal == 1) ? alpha : 1.0 - alpha;

  Preprocessor p;
  p.name = (signal == 1) ? "opt1" : "opt2";
  p.lipschitz = true;
  p.map = [model, a, spec](double y) {
    return 1.0 - 1.0 / (a * model.ratio_delta(y, spec) + (1.0 - a));
  };

  const Interval iv = model.integration_interval(spec.y_tail_sigmas);
  const GridExtrema ex = scan_extrema(p.map, iv);
  // The map is 1 - 1/(a Delta + 1 - a) with Delta >= 0, so it never reaches 1
  // and never drops below 1 - 1/(1-a); the grid value tightens both ends.
  p.sup_on_support = std::min(ex.max_value, 1.0 - 1e-15);
  p.inf_on_support = std::max(ex.min_value, 1.0 - 1.0 / (1.0 - a));
  return p;
}

Preprocessor baseline_ycs() {
  Preprocessor p;
  p.name = "ycs";
  p.lipschitz = true;
  p.map = [](double y) { return std::min(y * y, 10.0); };
  p.sup_on_support = 10.0;
  p.inf_on_support = 0.0;
  return p;
}

Preprocessor baseline_lal() {
  Preprocessor p;
  p.name = "lal";
  p.lipschitz = true;
  p.map = [](double y) {
    if (y == 0.0) return -10.0;  // truncation branch absorbs the singularity
    return std::max(1.0 - 1.0 / (y * y), -10.0);
  };
  p.sup_on_support = 1.0;  // approached as |y| grows, never attained
  p.inf_on_support = -10.0;
  return p;
}

Preprocessor constant_preprocessor(double c) {
  Preprocessor p;
  p.name = "const";
  p.lipschitz = true;
  p.map = [c](double) { return c; };
  p.sup_on_support = c;
  p.inf_on_support = c;
  return p;
}

Preprocessor custom_preprocessor(std::function<double(double)> map, double sup,
                                 double inf, bool lipschitz, std::string name,
                                 const LinkModel& model, const QuadratureSpec& spec) {
  Preprocessor p;
  p.map = std::move(map);
  p.sup_on_support = sup;
  p.inf_on_support = inf;
  p.lipschitz = lipschitz;
  p.name = std::move(name);
  p.validate_spectral(model, spec);
  return p;
}

Preprocessor scaled(const Preprocessor& p, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("scaled: factor must be positive");
  Preprocessor out;
  auto base = p.map;
  out.map = [base, c](double y) { return c * base(y); };
  out.sup_on_support = c * p.sup_on_support;
  out.inf_on_support = c * p.inf_on_support;
  out.lipschitz = p.lipschitz;
  std::ostringstream nm;
  nm << p.name << "*" << c;
  out.name = nm.str();
  return out;
}

}  // namespace mixglm
