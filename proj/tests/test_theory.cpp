#include <doctest.h>

#include <cmath>

#include "mixglm/rng.hpp"
#include "mixglm/theory.hpp"

using namespace mixglm;

namespace {

const LinkModel& noiseless_mlr() {
  static const LinkModel m = LinkModel::mixed_linear_regression(0.0);
  return m;
}

struct McMean {
  double mean;
  double std_err;
};

// Monte-Carlo mean of f(Y) with Y the noiseless regression channel output.
McMean mc_mean(const std::function<double(double)>& f, int n, std::uint64_t seed) {
  Rng rng(seed);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = f(rng.gaussian());
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

TEST_SUITE_BEGIN("theory");

TEST_CASE("phi: constant preprocessing has the closed form lambda c/(lambda - c)") {
  const Preprocessor t = constant_preprocessor(1.0);
  CHECK(phi(3.0, t, noiseless_mlr()) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK_THROWS_AS(phi(0.5, t, noiseless_mlr()), std::domain_error);
}

TEST_CASE("phi: large-lambda limit is E[Z G^2]") {
  const Preprocessor t1 = optimal_spectral(noiseless_mlr(), 0.6, 1);
  QuadratureSpec spec;
  const Interval iv = noiseless_mlr().integration_interval(spec.y_tail_sigmas);
  const double ezg2 = integrate_y(
      [&](double y) { return t1(y) * noiseless_mlr().moment_m(2, y); }, iv, spec);
  CHECK(phi(1e8, t1, noiseless_mlr()) == doctest::Approx(ezg2).epsilon(1e-7));
}

TEST_CASE("phi is strictly decreasing") {
  const Preprocessor t1 = optimal_spectral(noiseless_mlr(), 0.6, 1);
  CHECK(phi(3.0, t1, noiseless_mlr()) > phi(4.0, t1, noiseless_mlr()));
}

TEST_CASE("psi: constant preprocessing and shape properties") {
  const Preprocessor t = constant_preprocessor(1.0);
  CHECK(psi(3.0, 4.0, t, noiseless_mlr()) == doctest::Approx(2.25).epsilon(1e-9));

  // convexity in lambda (midpoint test) and monotonicity in Delta
  const Preprocessor t1 = optimal_spectral(noiseless_mlr(), 0.6, 1);
  const double a = 1.3, b = 3.0;
  const double mid = psi(0.5 * (a + b), 4.0, t1, noiseless_mlr());
  const double avg = 0.5 * (psi(a, 4.0, t1, noiseless_mlr()) +
                            psi(b, 4.0, t1, noiseless_mlr()));
  CHECK(mid <= avg);
  CHECK(psi(2.0, 8.0, t1, noiseless_mlr()) < psi(2.0, 2.0, t1, noiseless_mlr()));
}

TEST_CASE("lambda_bar: constant preprocessing solves c (1 + sqrt(Delta))") {
  const Preprocessor t = constant_preprocessor(1.0);
  CHECK(lambda_bar(4.0, t, noiseless_mlr()).value == doctest::Approx(3.0).epsilon(1e-9));
  // increasing in Delta
  const double l2 = lambda_bar(2.0, t, noiseless_mlr()).value;
  const double l8 = lambda_bar(8.0, t, noiseless_mlr()).value;
  CHECK(l2 == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-9));
  CHECK(l8 == doctest::Approx(1.0 + std::sqrt(8.0)).epsilon(1e-9));
  CHECK(l8 > l2);
}

TEST_CASE("lambda_bar agrees with a Monte-Carlo solve of its equation") {
  const Preprocessor t1 = optimal_spectral(noiseless_mlr(), 0.6, 1);
  const LambdaBar edge = lambda_bar(4.0, t1, noiseless_mlr());
  REQUIRE(edge.interior);
  // At the quadrature root the MC estimate of E[(Z/(lambda-Z))^2] must sit
  // within three standard errors of 1/delta.
  const McMean mc = mc_mean(
      [&](double y) {
        const double z = t1(y);
        const double r = z / (edge.value - z);
        return r * r;
      },
      10'000'000, 42);
  CHECK(std::abs(mc.mean - 0.25) < 3.0 * mc.std_err);
}

TEST_CASE("lambda_star: supercriticality against the known threshold") {
  const Preprocessor t1 = optimal_spectral(noiseless_mlr(), 0.6, 1);
  // threshold for signal 1 is 1/(2 alpha^2) ~ 1.389
  CHECK(lambda_star(0.6 * 3.0, 3.0, t1, noiseless_mlr()).supercritical);
  CHECK_FALSE(lambda_star(0.6 * 1.0, 1.0, t1, noiseless_mlr()).supercritical);
}

TEST_CASE("lambda_star ordering between the two signals") {
  const Preprocessor t1 = optimal_spectral(noiseless_mlr(), 0.6, 1);
  for (double delta : {4.0, 6.0, 10.0}) {
    const LambdaStar s1 = lambda_star(0.6 * delta, delta, t1, noiseless_mlr());
    const LambdaStar s2 = lambda_star(0.4 * delta, delta, t1, noiseless_mlr());
    CHECK(s1.value > s2.value);
  }
}

TEST_CASE("predict_eigenvalues: ordering chain and degenerate collapse") {
  const Preprocessor t1 = optimal_spectral(noiseless_mlr(), 0.6, 1);
  for (double delta : {0.8, 1.0, 2.0, 4.0, 6.0, 12.0}) {
    const EigPrediction e = predict_eigenvalues(0.6, delta, t1, noiseless_mlr());
    CHECK(e.eig1 >= e.eig2 - 1e-12);
    CHECK(e.eig2 >= e.eig3 - 1e-12);
  }
  // subcritical: all three collapse onto the bulk edge
  const EigPrediction sub = predict_eigenvalues(0.6, 1.0, t1, noiseless_mlr());
  CHECK(sub.eig1 == doctest::Approx(sub.eig3).epsilon(1e-10));
  // strict separation appears exactly when supercritical
  const EigPrediction sup = predict_eigenvalues(0.6, 6.0, t1, noiseless_mlr());
  CHECK(sup.eig1 > sup.eig3 + 0.01);
}

TEST_CASE("predict_eigenvalues: constant preprocessing gives the MP edge") {
  const Preprocessor t = constant_preprocessor(1.0);
  const EigPrediction e = predict_eigenvalues(0.6, 4.0, t, noiseless_mlr());
  // (1 + sqrt(delta))^2 / delta at delta = 4
  CHECK(e.eig3 == doctest::Approx(2.25).epsilon(1e-9));
}

TEST_CASE("rho_lin: limit value, exact ratio, ineffective channel") {
  const Preprocessor lstar = optimal_linear(noiseless_mlr());
  const RhoLin rl = rho_lin(0.6, 1e6, lstar, noiseless_mlr());
  CHECK(rl.effective);
  CHECK(rl.rho1 == doctest::Approx(0.6 / std::sqrt(0.52)).epsilon(1e-3));
  CHECK(rl.rho1 / rl.rho2 == doctest::Approx(1.5).epsilon(1e-12));

  Preprocessor identity;
  identity.map = [](double y) { return y; };
  const RhoLin pr_rl = rho_lin(0.6, 4.0, identity, LinkModel::mixed_phase_retrieval(0.5));
  CHECK_FALSE(pr_rl.effective);
  CHECK(pr_rl.rho1 == 0.0);
  CHECK(pr_rl.rho2 == 0.0);
  CHECK(pr_rl.n_lin > 0.0);
}

TEST_CASE("rho_spec: vanishing at the edge, approaching one, model equivalence") {
  const Preprocessor t1 = optimal_spectral(noiseless_mlr(), 0.6, 1);
  CHECK(rho_spec(0.6, 1.0, t1, noiseless_mlr(), 1) == 0.0);
  // just above threshold the overlap is still close to zero
  const double near = rho_spec(0.6, 1.39, t1, noiseless_mlr(), 1);
  CHECK(near < 0.25);
  CHECK(rho_spec(0.6, 1e6, t1, noiseless_mlr(), 1) > 0.999);

  const LinkModel pr = LinkModel::mixed_phase_retrieval(0.0);
  const Preprocessor t1_pr = optimal_spectral(pr, 0.6, 1);
  for (double delta : {2.0, 4.0, 8.0}) {
    CHECK(std::abs(rho_spec(0.6, delta, t1, noiseless_mlr(), 1) -
                   rho_spec(0.6, delta, t1_pr, pr, 1)) < 1e-8);
  }
}

TEST_CASE("cross_cov: vanishing cases, MC oracle, scale freeness") {
  const LinkModel pr = LinkModel::mixed_phase_retrieval(0.0);
  const Preprocessor t1_pr = optimal_spectral(pr, 0.6, 1);
  Preprocessor identity;
  identity.map = [](double y) { return y; };
  CHECK(cross_cov(0.6, 4.0, identity, t1_pr, pr, 1) == doctest::Approx(0.0).epsilon(1e-12));

  const Preprocessor t1 = optimal_spectral(noiseless_mlr(), 0.6, 1);
  const Preprocessor lstar = optimal_linear(noiseless_mlr());
  const double cc = cross_cov(0.6, 4.0, lstar, t1, noiseless_mlr(), 1);
  CHECK(std::isfinite(cc));
  CHECK(cc != 0.0);

  // MC oracle for the inner expectation E[G L(Y) Z/(lambda* - Z)]
  const LambdaStar ls = lambda_star(2.4, 4.0, t1, noiseless_mlr());
  REQUIRE(ls.supercritical);
  const McMean mc = mc_mean(
      [&](double g) {
        const double z = t1(g);  // noiseless: Y = G
        return g * lstar(g) * z / (ls.value - z);
      },
      10'000'000, 99);
  const RhoLin rl = rho_lin(0.6, 4.0, lstar, noiseless_mlr());
  const double rs = rho_spec(0.6, 4.0, t1, noiseless_mlr(), 1);
  const double scale = 0.6 * rs / rl.n_lin;
  CHECK(std::abs(cc - scale * mc.mean) < 3.0 * scale * mc.std_err);

  // degree-0 homogeneity in L: n_lin rescales along with the expectation
  Preprocessor lscaled;
  lscaled.map = [&, f = lstar.map](double y) { return 3.7 * f(y); };
  const double cc_scaled = cross_cov(0.6, 4.0, lscaled, t1, noiseless_mlr(), 1);
  CHECK(cc_scaled == doctest::Approx(cc).epsilon(1e-9));
}

TEST_CASE("combo_coefficients: limits and the generic fixture") {
  const ComboCoefficients spec_only = combo_coefficients(0.0, 0.7, 0.0);
  CHECK(spec_only.overlap == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(spec_only.xi == doctest::Approx(0.0));

  const ComboCoefficients lin_only = combo_coefficients(-0.5, 0.0, 0.0);
  CHECK(lin_only.overlap == doctest::Approx(0.5).epsilon(1e-14));

  const ComboCoefficients c = combo_coefficients(0.5, 0.6, 0.1);
  // nu = 0.4; overlap^2 = (0.25 + 0.36 - 2*0.5*0.6*0.4)/(1 - 0.16)
  CHECK(c.nu == doctest::Approx(0.4));
  CHECK(c.overlap == doctest::Approx(std::sqrt(0.37 / 0.84)).epsilon(1e-12));
  CHECK(c.overlap >= 0.6);

  CHECK_THROWS_AS(combo_coefficients(0.99, 0.99, 0.02), std::domain_error);
}

TEST_CASE("spectral_threshold closed values and universal bound") {
  CHECK(spectral_threshold(0.6, 1, noiseless_mlr()) ==
        doctest::Approx(1.0 / 0.72).epsilon(1e-8));
  CHECK(spectral_threshold(0.6, 1, LinkModel::mixed_linear_regression(1.0)) ==
        doctest::Approx(4.0 / 0.72).epsilon(1e-8));
  CHECK(spectral_threshold(0.6, 2, noiseless_mlr()) ==
        doctest::Approx(1.0 / 0.32).epsilon(1e-8));

  // universal lower bound 1/(2 alpha_i^2), met with equality at sigma = 0
  for (double sigma : {0.0, 0.4, 1.0}) {
    for (int signal : {1, 2}) {
      const double a = signal == 1 ? 0.6 : 0.4;
      const double bound = 1.0 / (2.0 * a * a);
      CHECK(spectral_threshold(0.6, signal, LinkModel::mixed_linear_regression(sigma)) >=
            bound * (1.0 - 1e-9));
      CHECK(spectral_threshold(0.6, signal, LinkModel::mixed_phase_retrieval(sigma)) >=
            bound * (1.0 - 1e-9));
    }
  }

  // decreasing in alpha for the first signal
  CHECK(spectral_threshold(0.75, 1, noiseless_mlr()) <
        spectral_threshold(0.55, 1, noiseless_mlr()));
}

TEST_CASE("beta_star: domain, large-delta limit, subcritical error") {
  const double b = beta_star(0.6, 4.0, 1, noiseless_mlr());
  CHECK(b > 0.4);

  const double b_inf = beta_star(0.6, 1e8, 1, noiseless_mlr());
  CHECK(b_inf == doctest::Approx(0.4).epsilon(1e-6));

  CHECK_THROWS_AS(beta_star(0.6, 1.0, 1, noiseless_mlr()), SubcriticalError);
}

TEST_CASE("beta_star overlap equals rho_spec of the optimal map") {
  const double b = beta_star(0.6, 4.0, 1, noiseless_mlr());
  const double overlap_fp = 1.0 / std::sqrt(b + 0.6);
  const Preprocessor t1 = optimal_spectral(noiseless_mlr(), 0.6, 1);
  const double rs = rho_spec(0.6, 4.0, t1, noiseless_mlr(), 1);
  CHECK(std::abs(overlap_fp - rs) < 1e-6);
}

TEST_CASE("closed_form_mlr_fixed_point agrees with the generic route") {
  // noiseless reduction
  CHECK(std::abs(closed_form_mlr_fixed_point(0.6, 4.0, 0.0, 1) -
                 beta_star(0.6, 4.0, 1, noiseless_mlr())) < 1e-6);
  // noisy channel above its threshold
  const LinkModel noisy = LinkModel::mixed_linear_regression(1.0);
  CHECK(std::abs(closed_form_mlr_fixed_point(0.6, 8.0, 1.0, 1) -
                 beta_star(0.6, 8.0, 1, noisy)) < 1e-6);
  // domain of the solution
  for (double delta : {2.0, 4.0, 16.0})
    CHECK(closed_form_mlr_fixed_point(0.6, delta, 0.0, 1) > 0.4);
  CHECK_THROWS_AS(closed_form_mlr_fixed_point(0.6, 4.0, 1.0, 1), SubcriticalError);
}

TEST_CASE("closed_form_pr_threshold and h") {
  CHECK(closed_form_pr_threshold(0.6, 0.0, 1) ==
        doctest::Approx(1.0 / 0.72).epsilon(1e-8));
  CHECK(pr_threshold_h(0.0) == doctest::Approx(1.22564).epsilon(1e-4 / 1.22564));
  const double sigma = 0.1;
  const double expansion = (1.0 + 2.0 * sigma * sigma) / 0.72;
  CHECK(std::abs(closed_form_pr_threshold(0.6, sigma, 1) - expansion) / expansion < 1e-3);
  // generic quadrature threshold matches the closed form for the noisy channel
  CHECK(spectral_threshold(0.6, 1, LinkModel::mixed_phase_retrieval(0.8)) ==
        doctest::Approx(closed_form_pr_threshold(0.6, 0.8, 1)).epsilon(1e-7));
}

TEST_CASE("stieltjes_inverse_sum: identity with psi and pinned value") {
  const Preprocessor t = constant_preprocessor(1.0);
  CHECK(stieltjes_inverse_sum(-1.0 / 3.0, 4.0, t, noiseless_mlr()) ==
        doctest::Approx(9.0).epsilon(1e-9));

  const Preprocessor t1 = optimal_spectral(noiseless_mlr(), 0.6, 1);
  const double delta = 4.0;
  const double lam0 = lambda_bar(delta, t1, noiseless_mlr()).value * 1.01;
  for (int k = 0; k < 20; ++k) {
    const double lam = lam0 * (1.0 + 0.35 * k);
    const double via_stieltjes =
        stieltjes_inverse_sum(-1.0 / lam, delta, t1, noiseless_mlr()) / delta;
    CHECK(via_stieltjes ==
          doctest::Approx(psi(lam, delta, t1, noiseless_mlr())).epsilon(1e-10));
  }

  CHECK_THROWS_AS(stieltjes_inverse_sum(0.0, 4.0, t1, noiseless_mlr()),
                  std::domain_error);
  // pole 1 + z T(y) = 0 inside the range of T
  CHECK_THROWS_AS(stieltjes_inverse_sum(-2.0, 4.0, t1, noiseless_mlr()),
                  std::domain_error);
}

TEST_CASE("all spectral predictions are invariant under T -> 2T") {
  const Preprocessor t1 = optimal_spectral(noiseless_mlr(), 0.6, 1);
  const Preprocessor t1x2 = scaled(t1, 2.0);
  const Preprocessor lstar = optimal_linear(noiseless_mlr());

  CHECK(std::abs(rho_spec(0.6, 4.0, t1, noiseless_mlr(), 1) -
                 rho_spec(0.6, 4.0, t1x2, noiseless_mlr(), 1)) < 1e-8);
  CHECK(std::abs(cross_cov(0.6, 4.0, lstar, t1, noiseless_mlr(), 1) -
                 cross_cov(0.6, 4.0, lstar, t1x2, noiseless_mlr(), 1)) < 1e-8);
  const EigPrediction e1 = predict_eigenvalues(0.6, 4.0, t1, noiseless_mlr());
  const EigPrediction e2 = predict_eigenvalues(0.6, 4.0, t1x2, noiseless_mlr());
  CHECK(e2.eig1 == doctest::Approx(2.0 * e1.eig1).epsilon(1e-8));
  CHECK(e2.eig2 == doctest::Approx(2.0 * e1.eig2).epsilon(1e-8));
  CHECK(e2.eig3 == doctest::Approx(2.0 * e1.eig3).epsilon(1e-8));
}

TEST_CASE("noisy phase retrieval dominates noisy regression for spectral estimation") {
  // At sigma = 1.5 the modulus channel's extra information shows up as a much
  // lower threshold and pointwise larger overlap predictions.
  const double sigma = 1.5, alpha = 0.8;
  const LinkModel mlr = LinkModel::mixed_linear_regression(sigma);
  const LinkModel pr = LinkModel::mixed_phase_retrieval(sigma);
  CHECK(spectral_threshold(alpha, 1, pr) < spectral_threshold(alpha, 1, mlr));
  const Preprocessor tm = optimal_spectral(mlr, alpha, 1);
  const Preprocessor tp = optimal_spectral(pr, alpha, 1);
  for (double delta : {4.0, 6.0, 10.0, 16.0}) {
    CHECK(rho_spec(alpha, delta, tp, pr, 1) >=
          rho_spec(alpha, delta, tm, mlr, 1) - 1e-10);
  }
}

TEST_CASE("strict eigenvalue separation appears exactly when supercritical") {
  const Preprocessor t1 = optimal_spectral(noiseless_mlr(), 0.6, 1);
  for (double delta : {0.8, 1.2, 2.0, 5.0}) {
    const LambdaStar s1 = lambda_star(0.6 * delta, delta, t1, noiseless_mlr());
    const EigPrediction e = predict_eigenvalues(0.6, delta, t1, noiseless_mlr());
    CHECK((e.eig1 > e.eig3 + 1e-9) == s1.supercritical);
  }
}

TEST_CASE("predict_report: coherent flags and combiner dominance") {
  const LinkModel model = noiseless_mlr();
  const Preprocessor t1 = optimal_spectral(model, 0.6, 1);
  const Preprocessor t2 = optimal_spectral(model, 0.6, 2);
  const Preprocessor lstar = optimal_linear(model);

  const TheoryReport sup = predict_report(model, 0.6, 4.0, t1, t2, &lstar, "opt");
  CHECK(sup.supercritical_1);
  CHECK(sup.supercritical_2);
  CHECK(sup.rho_spec_1 > 0.0);
  CHECK(sup.eig1 >= sup.eig2);
  CHECK(sup.eig2 >= sup.eig3);
  CHECK(sup.combo_overlap_1 >=
        std::max(std::abs(sup.rho_lin_1), sup.rho_spec_1) - 1e-10);
  CHECK(sup.combo_overlap_2 >=
        std::max(std::abs(sup.rho_lin_2), sup.rho_spec_2) - 1e-10);

  const TheoryReport sub = predict_report(model, 0.6, 1.0, t1, t2, &lstar, "opt");
  CHECK_FALSE(sub.supercritical_1);
  CHECK(sub.rho_spec_1 == 0.0);
  CHECK(sub.combo_overlap_1 == doctest::Approx(std::abs(sub.rho_lin_1)).epsilon(1e-12));

  // rho_spec_i = 0 iff subcritical, across a delta scan
  for (double delta : {0.8, 1.2, 1.6, 2.5, 5.0}) {
    const TheoryReport r = predict_report(model, 0.6, delta, t1, t2, &lstar, "opt");
    CHECK((r.rho_spec_1 > 0.0) == r.supercritical_1);
    CHECK((r.rho_spec_2 > 0.0) == r.supercritical_2);
  }
}

TEST_SUITE_END();
