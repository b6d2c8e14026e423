#include "mixglm/gamp.hpp"

#include <cmath>
#include <sstream>

namespace mixglm {

namespace {

// Expectations of the denoiser F(y) = T(y)/(lambda* - T(y)) against the mixed
// observation law. Marginally the mixed channel output has the law of Y, and
// the only mixed moment needed reduces by conditioning on the label:
//   E[F(Ytilde) (G_i^2 - 1)]   = a   E[F(Y) (G^2 - 1)]
//   E[F(Ytilde)^2 G_i^2]       = a   E[F(Y)^2 G^2] + (1 - a) E[F(Y)^2]
// with a the probability that an observation carries signal i.
struct DenoiserMoments {
  double ef;         // E[F]
  double ef2;        // E[F^2]
  double ef_caught;  // a E[F (G^2 - 1)]
  double ef2_g2;     // a E[F^2 G^2] + (1 - a) E[F^2]
};

DenoiserMoments denoiser_moments(double lambda, double a, const Preprocessor& T,
                                 const LinkModel& model, const QuadratureSpec& spec) {
  const Interval iv = model.integration_interval(spec.y_tail_sigmas);
  auto f_of = [&](double y) {
    const double z = T(y);
    return z / (lambda - z);
  };
  DenoiserMoments m;
  m.ef = integrate_y([&](double y) { return f_of(y) * model.moment_m(0, y, spec); },
                     iv, spec);
  m.ef2 = integrate_y(
      [&](double y) {
        const double f = f_of(y);
        return f * f * model.moment_m(0, y, spec);
      },
      iv, spec);
  const double ef_g2_centered = integrate_y(
      [&](double y) {
        return f_of(y) * (model.moment_m(2, y, spec) - model.moment_m(0, y, spec));
      },
      iv, spec);
  const double ef2_g2_pure = integrate_y(
      [&](double y) {
        const double f = f_of(y);
        return f * f * model.moment_m(2, y, spec);
      },
      iv, spec);
  m.ef_caught = a * ef_g2_centered;
  m.ef2_g2 = a * ef2_g2_pure + (1.0 - a) * m.ef2;
  return m;
}

struct SESetup {
  double a;            // alpha weight of the chosen signal
  double lambda;       // lambda*(delta_choice)
  DenoiserMoments mom;
};

SESetup se_setup(int choice, double alpha, double delta, const Preprocessor& T,
                 const LinkModel& model, const QuadratureSpec& spec) {
  if (choice != 1 && choice != 2)
    throw std::invalid_argument("choice must be 1 or 2");
  if (!(alpha > 0.5 && alpha < 1.0))
    throw std::invalid_argument("alpha must be in (1/2, 1)");
  const double a = (choice == 1) ? alpha : 1.0 - alpha;

  const LambdaStar ls = lambda_star(a * delta, delta, T, model, spec);
  if (!ls.supercritical) {
    std::ostringstream msg;
    msg << "GAMP choice " << choice << " is subcritical at delta = " << delta
        << " (lambda* does not separate from the bulk edge)";
    throw SubcriticalError(msg.str());
  }

  SESetup s{a, ls.value, denoiser_moments(ls.value, a, T, model, spec)};
  // Fixed-point hypotheses of the state evolution.
  if (!(s.mom.ef_caught > 0.0) ||
      !(delta > s.mom.ef2 / (s.mom.ef_caught * s.mom.ef_caught))) {
    std::ostringstream msg;
    msg << "GAMP choice " << choice
        << ": state-evolution fixed-point hypotheses fail (E[F(G^2-1)] = "
        << s.mom.ef_caught << ", E[F^2] = " << s.mom.ef2 << ")";
    throw SubcriticalError(msg.str());
  }
  return s;
}

SEFixedPoint fixed_point_from(const SESetup& s, double delta) {
  SEFixedPoint fp;
  fp.beta_tilde2 = delta * s.mom.ef_caught * s.mom.ef_caught;
  const double denom = fp.beta_tilde2 + s.mom.ef2_g2 - s.mom.ef2;
  fp.chi_tilde = std::sqrt(fp.beta_tilde2 * (fp.beta_tilde2 - s.mom.ef2) / denom);
  fp.sigma2_tilde = fp.beta_tilde2 * s.mom.ef2_g2 / denom;
  return fp;
}

// chi_{.,1} and sigma_{V,1} come from the linear-estimator step.
struct LinearStep {
  double chi1 = 0.0, chi2 = 0.0, sigmaV2 = 0.0;
};

LinearStep linear_step(double alpha, double delta, const Preprocessor* L,
                       const LinkModel& model, const QuadratureSpec& spec) {
  LinearStep out;
  if (L == nullptr) return out;
  const Interval iv = model.integration_interval(spec.y_tail_sigmas);
  const double gl = integrate_y(
      [&](double y) { return (*L)(y)*model.moment_m(1, y, spec); }, iv, spec);
  const double l2 = integrate_y(
      [&](double y) {
        const double v = (*L)(y);
        return v * v * model.moment_m(0, y, spec);
      },
      iv, spec);
  out.chi1 = delta * alpha * gl;
  out.chi2 = delta * (1.0 - alpha) * gl;
  out.sigmaV2 = delta * l2;
  return out;
}

}  // namespace

SEFixedPoint se_fixed_point(int choice, double alpha, double delta,
                            const Preprocessor& T, const LinkModel& model,
                            const QuadratureSpec& spec) {
  return fixed_point_from(se_setup(choice, alpha, delta, T, model, spec), delta);
}

SETrace state_evolution(int choice, double alpha, double delta,
                        const Preprocessor& T, const LinkModel& model, int t_max,
                        const Preprocessor* L, const QuadratureSpec& spec) {
  if (t_max < 1) throw std::invalid_argument("state_evolution: t_max must be >= 1");
  const SESetup s = se_setup(choice, alpha, delta, T, model, spec);

  SETrace trace;
  trace.choice = choice;
  trace.lambda_star = s.lambda;
  trace.ef = s.mom.ef;

  const LinearStep lin = linear_step(alpha, delta, L, model, spec);
  const double sqrt_delta = std::sqrt(delta);

  // t = 1: v^1 is the linear estimator; the U-side restarts from the signal.
  trace.chi1.push_back(lin.chi1);
  trace.chi2.push_back(lin.chi2);
  trace.sigmaV2.push_back(lin.sigmaV2);
  trace.beta.push_back(std::sqrt(lin.chi1 * lin.chi1 + lin.chi2 * lin.chi2 + lin.sigmaV2));
  trace.mu1.push_back(choice == 1 ? 1.0 / sqrt_delta : 0.0);
  trace.mu2.push_back(choice == 2 ? 1.0 / sqrt_delta : 0.0);
  trace.sigmaU2.push_back(0.0);

  double mu = 1.0 / sqrt_delta;  // mu of the chosen signal
  double sigmaU2 = 0.0;
  for (int t = 1; t < t_max; ++t) {
    const double chi = delta * mu * s.mom.ef_caught;
    const double sigmaV2 = delta * (mu * mu * s.mom.ef2_g2 + sigmaU2 * s.mom.ef2);
    const double beta = std::sqrt(chi * chi + sigmaV2);
    if (!(beta > 1e-8))
      throw InstabilityError("state_evolution: beta collapsed below 1e-8");
    mu = chi / (sqrt_delta * beta);
    sigmaU2 = sigmaV2 / (delta * beta * beta);

    trace.chi1.push_back(choice == 1 ? chi : 0.0);
    trace.chi2.push_back(choice == 2 ? chi : 0.0);
    trace.sigmaV2.push_back(sigmaV2);
    trace.beta.push_back(beta);
    trace.mu1.push_back(choice == 1 ? mu : 0.0);
    trace.mu2.push_back(choice == 2 ? mu : 0.0);
    trace.sigmaU2.push_back(sigmaU2);
  }

  const SEFixedPoint fp = fixed_point_from(s, delta);
  trace.chi_tilde = fp.chi_tilde;
  trace.sigma2_tilde = fp.sigma2_tilde;
  trace.beta_tilde2 = fp.beta_tilde2;
  return trace;
}

GampRun run_gamp(const Dataset& ds, const LinkModel& model, const Preprocessor& T,
                 int choice, int t_max, double tol, const Preprocessor* L,
                 bool with_eigvec_corr, const QuadratureSpec& spec) {
  if (t_max < 2) throw std::invalid_argument("run_gamp: t_max must be >= 2");
  const int d = ds.d();
  const double delta = ds.delta_realized;
  const double sqrt_delta = std::sqrt(delta);
  const double sqrt_d = std::sqrt(static_cast<double>(d));

  GampRun run;
  run.se = state_evolution(choice, ds.alpha, delta, T, model, t_max, L, spec);
  const double lam = run.se.lambda_star;
  const double ef = run.se.ef;  // deterministic memory coefficient

  const Eigen::VectorXd f_diag = ds.y.unaryExpr([&](double y) {
    const double z = T(y);
    return z / (lam - z);
  });
  const Eigen::VectorXd t_diag = ds.y.unaryExpr([&](double y) { return T(y); });

  const Eigen::VectorXd x_choice =
      sqrt_d * (choice == 1 ? ds.x1_star : ds.x2_star);
  const Eigen::VectorXd x1_bar = sqrt_d * ds.x1_star;
  const Eigen::VectorXd x2_bar = sqrt_d * ds.x2_star;

  Eigen::VectorXd eigvec;
  if (with_eigvec_corr) {
    const SpectralResult sr = spectral_estimate(ds, T);
    eigvec = (choice == 1) ? sr.v1 : sr.v2;
  }

  // Rescaled design Abar = A / sqrt(d); kept implicit through the 1/sqrt(d)
  // factors so no n x d copy is made.
  auto abar_mul = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return (ds.A * v) / sqrt_d;
  };
  auto abar_t_mul = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return (ds.A.transpose() * u) / sqrt_d;
  };

  auto record = [&](int t, const Eigen::VectorXd& v) {
    GampDiagnostics diag;
    diag.t = t;
    const double beta_t = run.se.beta[t - 1];
    diag.beta2 = beta_t * beta_t;
    diag.chi = (choice == 1) ? run.se.chi1[t - 1] : run.se.chi2[t - 1];
    diag.norm2_over_d = v.squaredNorm() / d;
    diag.corr_x1 = v.dot(x1_bar) / d;
    diag.corr_x2 = v.dot(x2_bar) / d;
    if (with_eigvec_corr && v.norm() > 0.0)
      diag.corr_eigvec = std::abs(v.dot(eigvec)) / v.norm();
    // Residual of the limiting eigen-equation Dbar v / lambda* = (1 + delta E[F]) v.
    const Eigen::VectorXd dv = abar_t_mul(t_diag.cwiseProduct(abar_mul(v)));
    diag.eig_residual = (dv / lam - (1.0 + delta * ef) * v).norm() / sqrt_d;
    run.trace.push_back(diag);
  };

  // t = 1: the linear estimator.
  Eigen::VectorXd v;
  if (L != nullptr) {
    const Eigen::VectorXd ly = ds.y.unaryExpr([&](double y) { return (*L)(y); });
    v = abar_t_mul(ly);
  } else {
    v = Eigen::VectorXd::Zero(d);
  }
  record(1, v);

  // t = 2: restart from the (infeasible) signal initialization. Unrolling
  // the recursion with these denoisers: u^1 = Abar x / sqrt(delta),
  // v^2 = Abar^T F u^1 - sqrt(delta) E[F] x.
  Eigen::VectorXd u_prev = abar_mul(x_choice) / sqrt_delta;
  v = abar_t_mul(f_diag.cwiseProduct(u_prev)) - sqrt_delta * ef * x_choice;
  record(2, v);
  run.iterations = 2;

  for (int t = 2; t < t_max; ++t) {
    const double beta_t = run.se.beta[t - 1];
    if (!(beta_t > 1e-8))
      throw InstabilityError("run_gamp: state-evolution beta collapsed");
    const Eigen::VectorXd u =
        (abar_mul(v) - f_diag.cwiseProduct(u_prev)) / (sqrt_delta * beta_t);
    const Eigen::VectorXd v_next =
        abar_t_mul(f_diag.cwiseProduct(u)) - (sqrt_delta / beta_t) * ef * v;

    const double beta_next = run.se.beta[t];
    if (v_next.squaredNorm() / d > 1e3 * beta_next * beta_next) {
      std::ostringstream msg;
      msg << "run_gamp: iterate norm " << v_next.squaredNorm() / d
          << " blew past 1e3 * beta_t^2 at t = " << t + 1;
      throw InstabilityError(msg.str());
    }

    const double rel_change =
        (v_next - v).norm() / std::max(v.norm(), 1e-300);
    u_prev = u;
    v = v_next;
    record(t + 1, v);
    run.iterations = t + 1;
    if (rel_change < tol) {
      run.converged = true;
      break;
    }
  }

  run.v = v;
  return run;
}

}  // namespace mixglm
