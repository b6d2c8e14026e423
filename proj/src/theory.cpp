#include "mixglm/theory.hpp"

#include <cmath>
#include <sstream>

namespace mixglm {

namespace {

constexpr double kPi = 3.14159265358979323846;

double alpha_weight(double alpha, int signal) {
  if (signal != 1 && signal != 2)
    throw std::invalid_argument("signal must be 1 or 2");
  return (signal == 1) ? alpha : 1.0 - alpha;
}

// Expectations over (Y, G) expressed through the moment layer:
//   E[h(Z)]            = int h(T(y)) m0(y) dy
//   E[h(Z) G^2]        = int h(T(y)) m2(y) dy
//   E[h(Z) (G^2 - 1)]  = int h(T(y)) (m2 - m0)(y) dy
//   E[G L(Y) h(Z)]     = int L(y) h(T(y)) m1(y) dy
struct MomentLayer {
  const Preprocessor& T;
  const LinkModel& model;
  const QuadratureSpec& spec;
  Interval iv;

  MomentLayer(const Preprocessor& t, const LinkModel& m, const QuadratureSpec& s)
      : T(t), model(m), spec(s), iv(m.integration_interval(s.y_tail_sigmas)) {}

  double lambda_floor() const {
    // Just above sup Z; every integrand below has a simple pole at lambda = sup Z.
    return T.sup_on_support * (1.0 + 1e-8) + 1e-12;
  }

  void require_above_sup(double lambda, const char* who) const {
    if (!(lambda > T.sup_on_support)) {
      std::ostringstream msg;
      msg << who << ": lambda = " << lambda << " must exceed sup Z = "
          << T.sup_on_support;
      throw std::domain_error(msg.str());
    }
  }

  template <typename H>
  double m0_expect(H h) const {
    return integrate_y([&](double y) { return h(T(y)) * model.moment_m(0, y, spec); },
                       iv, spec);
  }
  template <typename H>
  double m2_expect(H h) const {
    return integrate_y([&](double y) { return h(T(y)) * model.moment_m(2, y, spec); },
                       iv, spec);
  }
  template <typename H>
  double centered_expect(H h) const {  // against m2 - m0
    return integrate_y(
        [&](double y) {
          return h(T(y)) * (model.moment_m(2, y, spec) - model.moment_m(0, y, spec));
        },
        iv, spec);
  }

  double resolvent_sq_m0(double lambda) const {  // E[(Z/(lambda - Z))^2]
    return m0_expect([lambda](double z) {
      const double r = z / (lambda - z);
      return r * r;
    });
  }
  double resolvent_m0(double lambda) const {  // E[Z/(lambda - Z)]
    return m0_expect([lambda](double z) { return z / (lambda - z); });
  }
  double resolvent_centered(double lambda) const {  // E[Z (G^2-1)/(lambda - Z)]
    return centered_expect([lambda](double z) { return z / (lambda - z); });
  }
  double resolvent_sq_centered(double lambda) const {  // E[(Z/(lambda-Z))^2 (G^2-1)]
    return centered_expect([lambda](double z) {
      const double r = z / (lambda - z);
      return r * r;
    });
  }
};

}  // namespace

double phi(double lambda, const Preprocessor& T, const LinkModel& model,
           const QuadratureSpec& spec) {
  MomentLayer mom(T, model, spec);
  mom.require_above_sup(lambda, "phi");
  return lambda * mom.m2_expect([lambda](double z) { return z / (lambda - z); });
}

double psi(double lambda, double Delta, const Preprocessor& T,
           const LinkModel& model, const QuadratureSpec& spec) {
  if (!(Delta > 0.0)) throw std::invalid_argument("psi: Delta must be > 0");
  MomentLayer mom(T, model, spec);
  mom.require_above_sup(lambda, "psi");
  return lambda * (1.0 / Delta + mom.resolvent_m0(lambda));
}

LambdaBar lambda_bar(double Delta, const Preprocessor& T, const LinkModel& model,
                     const QuadratureSpec& spec) {
  if (!(Delta > 0.0)) throw std::invalid_argument("lambda_bar: Delta must be > 0");
  MomentLayer mom(T, model, spec);
  const double lo = mom.lambda_floor();
  auto g = [&](double lam) { return mom.resolvent_sq_m0(lam) - 1.0 / Delta; };
  // psi(.; Delta) increasing on the whole half-line: the minimizer sits at
  // the support edge and there is no interior stationary point.
  if (g(lo) <= 0.0) return {lo, false};
  const double hi = expand_bracket(g, lo);
  return {find_root_monotone(g, lo, hi, spec.root_tol), true};
}

LambdaStar lambda_star(double Delta_i, double delta, const Preprocessor& T,
                       const LinkModel& model, const QuadratureSpec& spec) {
  if (!(Delta_i > 0.0 && delta > 0.0))
    throw std::invalid_argument("lambda_star: ratios must be > 0");
  MomentLayer mom(T, model, spec);

  // The crossing of phi with psi(.; Delta_i) is unique on (lambda_bar(Delta_i), inf)
  // where psi increases and phi decreases; in explicit form it is the root of
  // E[Z (G^2 - 1)/(lambda - Z)] = 1/Delta_i.
  const LambdaBar edge_i = lambda_bar(Delta_i, T, model, spec);
  auto gap = [&](double lam) {
    return mom.resolvent_centered(lam) - 1.0 / Delta_i;
  };

  LambdaStar out{edge_i.value, false, false};
  const double left = edge_i.value;
  if (gap(left) > 0.0) {
    const double hi = expand_bracket(gap, left);
    out.value = find_root_monotone(gap, left, hi, spec.root_tol);
    out.explicit_root = true;
  }

  const LambdaBar edge_full = lambda_bar(delta, T, model, spec);
  out.supercritical =
      out.explicit_root && out.value > edge_full.value * (1.0 + 1e-12);
  return out;
}

EigPrediction predict_eigenvalues(double alpha, double delta, const Preprocessor& T,
                                  const LinkModel& model, const QuadratureSpec& spec) {
  if (!(alpha > 0.5 && alpha < 1.0))
    throw std::invalid_argument("predict_eigenvalues: alpha must be in (1/2, 1)");
  const LambdaBar edge = lambda_bar(delta, T, model, spec);
  const LambdaStar s1 = lambda_star(alpha * delta, delta, T, model, spec);
  const LambdaStar s2 = lambda_star((1.0 - alpha) * delta, delta, T, model, spec);

  // zeta(lambda; delta) = psi(max(lambda, lambda_bar(delta)); delta)
  auto zeta = [&](double lam) {
    return psi(std::max(lam, edge.value), delta, T, model, spec);
  };
  EigPrediction out;
  out.eig1 = zeta(s1.value);
  out.eig2 = zeta(s2.value);
  out.eig3 = zeta(edge.value);
  return out;
}

RhoLin rho_lin(double alpha, double delta, const Preprocessor& L,
               const LinkModel& model, const QuadratureSpec& spec) {
  if (!(alpha > 0.5 && alpha < 1.0))
    throw std::invalid_argument("rho_lin: alpha must be in (1/2, 1)");
  if (!(delta > 0.0)) throw std::invalid_argument("rho_lin: delta must be > 0");
  const Interval iv = model.integration_interval(spec.y_tail_sigmas);
  const double gl = integrate_y(
      [&](double y) { return L(y) * model.moment_m(1, y, spec); }, iv, spec);
  const double l2 = integrate_y(
      [&](double y) {
        const double v = L(y);
        return v * v * model.moment_m(0, y, spec);
      },
      iv, spec);

  RhoLin out;
  out.n_lin = std::sqrt((alpha * alpha + (1.0 - alpha) * (1.0 - alpha)) * gl * gl +
                        l2 / delta);
  out.effective = std::abs(gl) > 1e-10 * std::max(1.0, std::sqrt(l2));
  if (!out.effective || out.n_lin == 0.0) return out;
  out.rho1 = alpha * gl / out.n_lin;
  out.rho2 = (1.0 - alpha) * gl / out.n_lin;
  return out;
}

double rho_spec(double alpha, double delta, const Preprocessor& T,
                const LinkModel& model, int signal, const QuadratureSpec& spec) {
  const double a = alpha_weight(alpha, signal);
  const LambdaStar ls = lambda_star(a * delta, delta, T, model, spec);
  if (!ls.supercritical) return 0.0;

  MomentLayer mom(T, model, spec);
  const double num = 1.0 / delta - mom.resolvent_sq_m0(ls.value);
  const double den = 1.0 / delta + a * mom.resolvent_sq_centered(ls.value);
  const double radicand = num / den;
  if (radicand < -1e-10) {
    std::ostringstream msg;
    msg << "rho_spec: negative radicand " << radicand
        << " beyond quadrature noise at lambda* = " << ls.value;
    throw std::runtime_error(msg.str());
  }
  return radicand > 0.0 ? std::sqrt(radicand) : 0.0;
}

double cross_cov(double alpha, double delta, const Preprocessor& L,
                 const Preprocessor& T, const LinkModel& model, int signal,
                 const QuadratureSpec& spec) {
  const double a = alpha_weight(alpha, signal);
  const LambdaStar ls = lambda_star(a * delta, delta, T, model, spec);
  if (!ls.supercritical) return 0.0;

  const double rs = rho_spec(alpha, delta, T, model, signal, spec);
  const RhoLin rl = rho_lin(alpha, delta, L, model, spec);
  if (rl.n_lin == 0.0) return 0.0;

  const double lam = ls.value;
  const Interval iv = model.integration_interval(spec.y_tail_sigmas);
  const double mixed = integrate_y(
      [&](double y) {
        const double z = T(y);
        return L(y) * z / (lam - z) * model.moment_m(1, y, spec);
      },
      iv, spec);
  return a * rs / rl.n_lin * mixed;
}

ComboCoefficients combo_coefficients(double rho_lin_i, double rho_spec_i,
                                     double cross_cov_i) {
  ComboCoefficients c;
  c.nu = rho_lin_i * rho_spec_i + cross_cov_i;
  if (c.nu * c.nu >= 1.0 - 1e-12)
    throw std::domain_error("combo_coefficients: degenerate correlation (nu^2 >= 1)");
  c.xi = rho_lin_i - rho_spec_i * c.nu;
  c.zeta = rho_spec_i - rho_lin_i * c.nu;
  const double one_minus = 1.0 - c.nu * c.nu;
  const double inner =
      c.xi * c.xi + c.zeta * c.zeta + 2.0 * c.xi * c.zeta * c.nu;
  c.overlap = std::sqrt(std::max(0.0, inner)) / one_minus;
  return c;
}

namespace {

// int (m2 - m0)^2 / m0 dy, evaluated as int m0 (Delta - 1)^2 dy so the tails
// stay finite where m0 underflows.
double centered_chi2(const LinkModel& model, const QuadratureSpec& spec) {
  const Interval iv = model.integration_interval(spec.y_tail_sigmas);
  return integrate_y(
      [&](double y) {
        const double m0 = model.moment_m(0, y, spec);
        if (m0 <= 0.0) return 0.0;
        const double d = model.ratio_delta(y, spec) - 1.0;
        return m0 * d * d;
      },
      iv, spec);
}

}  // namespace

double spectral_threshold(double alpha, int signal, const LinkModel& model,
                          const QuadratureSpec& spec) {
  const double a = alpha_weight(alpha, signal);
  const double integral = centered_chi2(model, spec);
  if (!(integral > 1e-300)) return std::numeric_limits<double>::infinity();
  return 1.0 / (a * a * integral);
}

double beta_star(double alpha, double delta, int signal, const LinkModel& model,
                 const QuadratureSpec& spec) {
  const double a = alpha_weight(alpha, signal);
  const double threshold = spectral_threshold(alpha, signal, model, spec);
  if (!(delta > threshold)) {
    std::ostringstream msg;
    msg << "beta_star: delta = " << delta << " at or below the spectral threshold "
        << threshold << " for signal " << signal;
    throw SubcriticalError(msg.str());
  }

  const Interval iv = model.integration_interval(spec.y_tail_sigmas);
  // (beta - (1-a)) int (m2-m0)^2 / (a m2 + beta m0) dy = 1/(a^2 delta);
  // the left side increases in beta from 0, so the root is bracketed below by
  // 1 - a. Integrand written through Delta = m2/m0 for tail stability.
  auto lhs = [&](double beta) {
    const double integral = integrate_y(
        [&](double y) {
          const double m0 = model.moment_m(0, y, spec);
          if (m0 <= 0.0) return 0.0;
          const double d = model.ratio_delta(y, spec);
          const double diff = d - 1.0;
          return m0 * diff * diff / (a * d + beta);
        },
        iv, spec);
    return (beta - (1.0 - a)) * integral - 1.0 / (a * a * delta);
  };
  const double lo = (1.0 - a) * (1.0 + 1e-9) + 1e-15;
  const double hi = expand_bracket(lhs, lo);
  return find_root_monotone(lhs, lo, hi, spec.root_tol);
}

double closed_form_mlr_fixed_point(double alpha, double delta, double sigma,
                                   int signal, const QuadratureSpec& spec) {
  const double a = alpha_weight(alpha, signal);
  const double s2 = 1.0 + sigma * sigma;
  const double threshold = s2 * s2 / (2.0 * a * a);
  if (!(delta > threshold)) {
    std::ostringstream msg;
    msg << "closed_form_mlr_fixed_point: delta = " << delta
        << " at or below the spectral threshold " << threshold;
    throw SubcriticalError(msg.str());
  }

  // E_G[ ((G^2-1)/(1+sigma^2))^2 / (a (G^2+sigma^2)/(1+sigma^2) + beta) ] in
  // closed form; exp(E) erfc(sqrt(E)) is evaluated as erfcx(sqrt(E)).
  auto expectation = [&](double beta) {
    const double apb = a + beta;
    const double e = (sigma * sigma * a + s2 * beta) / (2.0 * a);
    const double k =
        std::sqrt(kPi * s2 * s2 / (2.0 * a * (sigma * sigma * a + s2 * beta)));
    return -apb / (a * a) + (apb / a) * (apb / a) * k * erfcx(std::sqrt(e));
  };
  auto lhs = [&](double beta) {
    return (beta - (1.0 - a)) * expectation(beta) - 1.0 / (a * a * delta);
  };
  const double lo = (1.0 - a) * (1.0 + 1e-9) + 1e-15;
  const double hi = expand_bracket(lhs, lo);
  return find_root_monotone(lhs, lo, hi, spec.root_tol);
}

double pr_threshold_h(double s, const QuadratureSpec& spec) {
  if (!(s >= 0.0)) throw std::invalid_argument("pr_threshold_h: s must be >= 0");
  // Left tail: 1/(1 + erf(z)) = exp(z^2)/erfcx(-z), cancel the exponential.
  auto integrand = [s](double z) {
    if (z >= 0.0)
      return std::exp(-(2.0 + s) * z * z) * z * z / (1.0 + std::erf(z));
    return std::exp(-(1.0 + s) * z * z) * z * z / erfcx(-z);
  };
  return integrate_y(integrand, {-14.0, 14.0}, spec);
}

double closed_form_pr_threshold(double alpha, double sigma, int signal,
                                const QuadratureSpec& spec) {
  const double a = alpha_weight(alpha, signal);
  const double s2 = 1.0 + sigma * sigma;
  const double h = pr_threshold_h(sigma * sigma, spec);
  const double integral = 2.0 / (s2 * s2) +
                          4.0 * std::pow(sigma, 5) * h / (std::pow(kPi, 1.5) * s2 * s2);
  return 1.0 / (a * a * integral);
}

double stieltjes_inverse_sum(double z, double delta, const Preprocessor& T,
                             const LinkModel& model, const QuadratureSpec& spec) {
  if (z == 0.0)
    throw std::domain_error("stieltjes_inverse_sum: pole at z = 0");
  // 1 + z T(y) must stay away from zero on the support.
  const double pole = -1.0 / z;
  if (pole >= T.inf_on_support - 1e-12 && pole <= T.sup_on_support + 1e-12)
    throw std::domain_error(
        "stieltjes_inverse_sum: 1 + z T(y) vanishes on the support");
  MomentLayer mom(T, model, spec);
  return -1.0 / z + delta * mom.m0_expect([z](double t) { return t / (1.0 + z * t); });
}

TheoryReport predict_report(const LinkModel& model, double alpha, double delta,
                            const Preprocessor& T1, const Preprocessor& T2,
                            const Preprocessor* L, const std::string& preproc_name,
                            const QuadratureSpec& spec) {
  TheoryReport r;
  r.model = model.name();
  r.preproc = preproc_name;
  r.sigma = model.sigma();
  r.alpha = alpha;
  r.delta = delta;

  const LambdaBar edge = lambda_bar(delta, T1, model, spec);
  r.lambda_bar = edge.value;

  const LambdaStar s1 = lambda_star(alpha * delta, delta, T1, model, spec);
  r.lambda_star_1 = s1.value;
  const EigPrediction eig = predict_eigenvalues(alpha, delta, T1, model, spec);
  r.eig1 = eig.eig1;
  r.eig2 = eig.eig2;
  r.eig3 = eig.eig3;

  // Per-signal overlap block: signal i is estimated from the matrix built
  // with its own preprocessing function T_i.
  const LambdaStar s2_own = lambda_star((1.0 - alpha) * delta, delta, T2, model, spec);
  r.lambda_star_2 = s2_own.value;
  r.supercritical_1 = s1.supercritical;
  r.supercritical_2 = s2_own.supercritical;

  r.rho_spec_1 = rho_spec(alpha, delta, T1, model, 1, spec);
  r.rho_spec_2 = rho_spec(alpha, delta, T2, model, 2, spec);

  if (L != nullptr) {
    const RhoLin rl = rho_lin(alpha, delta, *L, model, spec);
    r.rho_lin_1 = rl.rho1;
    r.rho_lin_2 = rl.rho2;
    r.n_lin = rl.n_lin;
    r.lin_effective = rl.effective;
    if (rl.effective) {
      r.cross_cov_1 = cross_cov(alpha, delta, *L, T1, model, 1, spec);
      r.cross_cov_2 = cross_cov(alpha, delta, *L, T2, model, 2, spec);
    }
  }

  const ComboCoefficients c1 = combo_coefficients(r.rho_lin_1, r.rho_spec_1, r.cross_cov_1);
  const ComboCoefficients c2 = combo_coefficients(r.rho_lin_2, r.rho_spec_2, r.cross_cov_2);
  r.nu_1 = c1.nu; r.xi_1 = c1.xi; r.zeta_1 = c1.zeta; r.combo_overlap_1 = c1.overlap;
  r.nu_2 = c2.nu; r.xi_2 = c2.xi; r.zeta_2 = c2.zeta; r.combo_overlap_2 = c2.overlap;

  r.delta_spec_1 = spectral_threshold(alpha, 1, model, spec);
  r.delta_spec_2 = spectral_threshold(alpha, 2, model, spec);
  return r;
}

}  // namespace mixglm
