#include "mixglm/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "mixglm/estimators.hpp"
#include "mixglm/gamp.hpp"
#include "mixglm/rng.hpp"
#include "mixglm/sweep.hpp"

namespace mixglm {

namespace {

// Collects named deviations against a tolerance; the worst one is reported.
class Check {
 public:
  explicit Check(double tol) : tol_(tol) {}

  void deviation(const std::string& label, double dev) {
    if (dev > worst_dev_) {
      worst_dev_ = dev;
      worst_label_ = label;
    }
    if (!(dev <= tol_)) failed_ = true;
  }

  void require(const std::string& label, bool ok) {
    if (!ok) {
      failed_ = true;
      if (extra_failure_.empty()) extra_failure_ = label;
    }
  }

  bool passed() const { return !failed_; }

  std::string detail() const {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "worst dev %.3g (tol %.3g)", worst_dev_, tol_);
    out << buf;
    if (!worst_label_.empty()) out << " at " << worst_label_;
    if (!extra_failure_.empty()) out << "; failed: " << extra_failure_;
    return out.str();
  }

  double tol() const { return tol_; }

 private:
  double tol_;
  double worst_dev_ = 0.0;
  std::string worst_label_;
  std::string extra_failure_;
  bool failed_ = false;
};

struct Criterion {
  int index;
  std::string name;
  double default_tol;
  std::function<Check(double tol, int threads)> run;
};

Check criterion_fig1_desk(double tol, int threads) {
  Check check(tol);
  SweepConfig cfg;
  cfg.model = "mlr";
  cfg.sigma = 0.0;
  cfg.alpha = 0.6;
  cfg.d = 500;
  cfg.trials = 5;
  cfg.delta_grid = {2.0, 3.0, 4.0, 6.0, 8.0};
  cfg.estimators = {EstimatorKind::Linear, EstimatorKind::SpectralOpt,
                    EstimatorKind::Combined};
  cfg.seed_base = 20240600;
  cfg.max_threads = threads;
  const std::vector<SweepRow> rows = sweep(cfg);
  for (const SweepRow& r : rows) {
    std::ostringstream label;
    label << r.estimator << " signal " << r.signal << " delta " << r.delta;
    check.deviation(label.str(), std::abs(r.overlap_mean - r.overlap_pred));
  }
  return check;
}

Check criterion_mlr_pr_equivalence(double tol, int /*threads*/) {
  Check check(tol);
  const LinkModel mlr = LinkModel::mixed_linear_regression(0.0);
  const LinkModel pr = LinkModel::mixed_phase_retrieval(0.0);
  const double alpha = 0.6;

  for (int signal : {1, 2}) {
    const double t_mlr = spectral_threshold(alpha, signal, mlr);
    const double t_pr = spectral_threshold(alpha, signal, pr);
    check.deviation("threshold signal " + std::to_string(signal),
                    std::abs(t_mlr - t_pr));
  }

  for (int signal : {1, 2}) {
    const Preprocessor tm = optimal_spectral(mlr, alpha, signal);
    const Preprocessor tp = optimal_spectral(pr, alpha, signal);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double y = 5.0 * i / 99.0;
      worst = std::max(worst, std::abs(tm(y) - tp(y)));
    }
    check.deviation("T map signal " + std::to_string(signal), worst);
  }

  for (int signal : {1, 2}) {
    const Preprocessor tm = optimal_spectral(mlr, alpha, signal);
    const Preprocessor tp = optimal_spectral(pr, alpha, signal);
    for (double delta : {4.0, 6.0, 8.0}) {
      const double rm = rho_spec(alpha, delta, tm, mlr, signal);
      const double rp = rho_spec(alpha, delta, tp, pr, signal);
      std::ostringstream label;
      label << "rho_spec signal " << signal << " delta " << delta;
      check.deviation(label.str(), std::abs(rm - rp));
    }
  }
  // Fixed-point route as well: the beta* overlaps must coincide.
  const double bm = beta_star(alpha, 4.0, 1, mlr);
  const double bp = beta_star(alpha, 4.0, 1, pr);
  check.deviation("beta* overlap delta 4",
                  std::abs(1.0 / std::sqrt(bm + alpha) - 1.0 / std::sqrt(bp + alpha)));
  return check;
}

Check criterion_eigenvalues(double tol, int /*threads*/) {
  Check check(tol);
  const LinkModel model = LinkModel::mixed_linear_regression(0.0);
  const double alpha = 0.6;
  const Preprocessor t1 = optimal_spectral(model, alpha, 1);
  const int d = 1000;
  const int seeds = 5;

  const EigPrediction pred = predict_eigenvalues(alpha, 6.0, t1, model);
  double m1 = 0.0, m2 = 0.0, m3 = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const Dataset ds = generate_dataset(d, 6.0, alpha, model, 7100 + s);
    const SpectralResult sr = spectral_estimate(ds, t1);
    m1 += sr.lam1;
    m2 += sr.lam2;
    m3 += sr.lam3;
  }
  m1 /= seeds;
  m2 /= seeds;
  m3 /= seeds;
  check.deviation("lam1 delta 6", std::abs(m1 - pred.eig1));
  check.deviation("lam2 delta 6", std::abs(m2 - pred.eig2));
  check.deviation("lam3 delta 6", std::abs(m3 - pred.eig3));

  // Subcritical: no outlier separates, the top of the spectrum is flat.
  double gap = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const Dataset ds = generate_dataset(d, 1.0, alpha, model, 7200 + s);
    const SpectralResult sr = spectral_estimate(ds, t1);
    gap += sr.lam1 - sr.lam3;
  }
  gap /= seeds;
  check.require("subcritical gap lam1 - lam3 < 0.1", gap < 0.1);
  return check;
}

Check criterion_thresholds(double tol, int /*threads*/) {
  Check check(tol);
  const double alpha = 0.6;
  const double noiseless = spectral_threshold(alpha, 1, LinkModel::mixed_linear_regression(0.0));
  check.deviation("noiseless MLR", std::abs(noiseless - 1.0 / (2.0 * alpha * alpha)));

  const double noisy = spectral_threshold(alpha, 1, LinkModel::mixed_linear_regression(1.0));
  check.deviation("MLR sigma 1", std::abs(noisy - 4.0 / (2.0 * alpha * alpha)));

  const double sigma = 0.1;
  const double pr_exact = closed_form_pr_threshold(alpha, sigma, 1);
  const double pr_expansion = (1.0 + 2.0 * sigma * sigma) / (2.0 * alpha * alpha);
  check.require("PR small-sigma expansion within 1e-3 relative",
                std::abs(pr_exact - pr_expansion) / pr_expansion < 1e-3);
  return check;
}

Check criterion_fixed_points(double tol, int /*threads*/) {
  Check check(tol);
  const double alpha = 0.6;
  const double delta = 4.0;

  {  // sigma = 0: both routes solve and agree; overlap matches rho_spec(T1*).
    const LinkModel model = LinkModel::mixed_linear_regression(0.0);
    const double b_gen = beta_star(alpha, delta, 1, model);
    const double b_closed = closed_form_mlr_fixed_point(alpha, delta, 0.0, 1);
    check.deviation("beta* sigma 0", std::abs(b_gen - b_closed));
    const double overlap_fp = 1.0 / std::sqrt(b_gen + alpha);
    const double overlap_spec =
        rho_spec(alpha, delta, optimal_spectral(model, alpha, 1), model, 1);
    check.deviation("overlap sigma 0", std::abs(overlap_fp - overlap_spec));
  }

  {  // sigma = 1 at delta = 4 sits below the threshold (1+sigma^2)^2/(2 alpha^2)
     // = 5.56, so agreement means both routes report subcritical and the
     // spectral overlap is zero.
    const LinkModel model = LinkModel::mixed_linear_regression(1.0);
    bool generic_sub = false, closed_sub = false;
    try {
      beta_star(alpha, delta, 1, model);
    } catch (const SubcriticalError&) {
      generic_sub = true;
    }
    try {
      closed_form_mlr_fixed_point(alpha, delta, 1.0, 1);
    } catch (const SubcriticalError&) {
      closed_sub = true;
    }
    check.require("sigma 1 delta 4: both routes subcritical", generic_sub && closed_sub);
    const double rs = rho_spec(alpha, delta, optimal_spectral(model, alpha, 1), model, 1);
    check.deviation("sigma 1 delta 4 rho_spec vs 0", std::abs(rs));

    // Exercise the noisy numeric path above the threshold as well.
    const double b_gen = beta_star(alpha, 8.0, 1, model);
    const double b_closed = closed_form_mlr_fixed_point(alpha, 8.0, 1.0, 1);
    check.deviation("beta* sigma 1 delta 8", std::abs(b_gen - b_closed));
    const double overlap_fp = 1.0 / std::sqrt(b_gen + alpha);
    const double overlap_spec =
        rho_spec(alpha, 8.0, optimal_spectral(model, alpha, 1), model, 1);
    check.deviation("overlap sigma 1 delta 8", std::abs(overlap_fp - overlap_spec));
  }
  return check;
}

Check criterion_gamp(double tol, int /*threads*/) {
  Check check(tol);
  const LinkModel model = LinkModel::mixed_linear_regression(0.0);
  const double alpha = 0.6;
  const double delta = 6.0;
  const Preprocessor t1 = optimal_spectral(model, alpha, 1);
  const Preprocessor lin = optimal_linear(model);

  const Dataset ds = generate_dataset(1000, delta, alpha, model, 90210);
  const GampRun run = run_gamp(ds, model, t1, /*choice=*/1, /*t_max=*/50,
                               /*tol=*/0.0, &lin, /*with_eigvec_corr=*/true);

  const GampDiagnostics& last = run.trace.back();
  check.require("|corr(v^50, v1)| > 0.99", last.t == 50 && last.corr_eigvec > 0.99);

  for (const GampDiagnostics& diag : run.trace) {
    if (diag.t > 20) break;
    const double rel = std::abs(diag.norm2_over_d - diag.beta2) / diag.beta2;
    check.require("||v^t||^2/d within 5% of beta_t^2 at t=" + std::to_string(diag.t),
                  rel <= 0.05);
  }

  const SEFixedPoint fp = se_fixed_point(1, alpha, delta, t1, model);
  check.require("SE beta~^2 = 1/delta within 1e-8",
                std::abs(fp.beta_tilde2 - 1.0 / delta) <= 1e-8);
  const double rho = rho_spec(alpha, delta, t1, model, 1);
  check.deviation("SE chi~ vs rho_spec/sqrt(delta)",
                  std::abs(fp.chi_tilde - rho / std::sqrt(delta)));
  return check;
}

Check criterion_linear_limits(double tol, int /*threads*/) {
  Check check(tol);
  const double alpha = 0.6;
  const LinkModel mlr = LinkModel::mixed_linear_regression(0.0);
  const RhoLin rl = rho_lin(alpha, 1e6, optimal_linear(mlr), mlr);
  const double limit = alpha / std::sqrt(alpha * alpha + (1.0 - alpha) * (1.0 - alpha));
  check.deviation("rho_lin_1 at delta 1e6", std::abs(rl.rho1 - limit));

  // Phase retrieval: every linear estimator is uninformative; the identity
  // map at d = 1000 must stay at noise level.
  const LinkModel pr = LinkModel::mixed_phase_retrieval(0.0);
  Preprocessor identity;
  identity.map = [](double y) { return y; };
  identity.name = "identity";
  const int d = 1000;
  double mean_overlap = 0.0;
  const int seeds = 5;
  for (int s = 0; s < seeds; ++s) {
    const Dataset ds = generate_dataset(d, 4.0, alpha, pr, 5300 + s);
    mean_overlap += overlap(linear_estimate(ds, identity), ds.x1_star);
  }
  mean_overlap /= seeds;
  check.require("PR linear overlap < 3/sqrt(d)",
                mean_overlap < 3.0 / std::sqrt(static_cast<double>(d)));
  return check;
}

Check criterion_overlap_to_one(double tol, int /*threads*/) {
  Check check(tol);
  const LinkModel model = LinkModel::mixed_linear_regression(0.0);
  const double rho = rho_spec(0.6, 1e4, optimal_spectral(model, 0.6, 1), model, 1);
  check.require("rho_spec_1 at delta 1e4 exceeds 0.99", rho > 0.99);
  std::ostringstream note;
  note << "rho_spec_1(1e4) = " << rho;
  check.deviation(note.str(), 0.0);
  return check;
}

Check criterion_property_suite(double tol, int /*threads*/) {
  Check check(tol);

  const double m2 = gauss_hermite_expect([](double g) { return g * g; });
  const double m4 = gauss_hermite_expect([](double g) { return g * g * g * g; });
  check.require("E[G^2] = 1 within 1e-10", std::abs(m2 - 1.0) <= 1e-10);
  check.require("E[G^4] = 3 within 1e-10", std::abs(m4 - 3.0) <= 1e-10);

  QuadratureSpec spec;
  for (const double sigma : {0.3, 1.0}) {
    for (const bool is_pr : {false, true}) {
      const LinkModel model = is_pr ? LinkModel::mixed_phase_retrieval(sigma)
                                    : LinkModel::mixed_linear_regression(sigma);
      const Interval iv = model.integration_interval(spec.y_tail_sigmas);
      const double i0 = integrate_y(
          [&](double y) { return model.moment_m(0, y); }, iv, spec);
      const double i2 = integrate_y(
          [&](double y) { return model.moment_m(2, y); }, iv, spec);
      std::ostringstream label;
      label << (is_pr ? "pr" : "mlr") << " sigma " << sigma;
      check.require("int m0 = 1 for " + label.str(), std::abs(i0 - 1.0) <= 1e-8);
      check.require("int m2 = 1 for " + label.str(), std::abs(i2 - 1.0) <= 1e-8);
    }
  }

  {  // Scale invariance of all spectral predictions under T -> 2T.
    const LinkModel model = LinkModel::mixed_linear_regression(0.0);
    const double alpha = 0.6, delta = 4.0;
    const Preprocessor t1 = optimal_spectral(model, alpha, 1);
    const Preprocessor t1x2 = scaled(t1, 2.0);
    const Preprocessor lin = optimal_linear(model);
    check.deviation("rho_spec under 2T",
                    std::abs(rho_spec(alpha, delta, t1, model, 1) -
                             rho_spec(alpha, delta, t1x2, model, 1)));
    check.deviation("cross_cov under 2T",
                    std::abs(cross_cov(alpha, delta, lin, t1, model, 1) -
                             cross_cov(alpha, delta, lin, t1x2, model, 1)));
    const EigPrediction e1 = predict_eigenvalues(alpha, delta, t1, model);
    const EigPrediction e2 = predict_eigenvalues(alpha, delta, t1x2, model);
    check.deviation("eig homogeneity under 2T",
                    std::abs(e2.eig1 - 2.0 * e1.eig1) +
                        std::abs(e2.eig3 - 2.0 * e1.eig3));
  }

  {  // Combiner dominance on random (valid-covariance) fixtures.
    Rng rng(1234);
    for (int k = 0; k < 20; ++k) {
      const double rl = 0.9 * rng.uniform();
      const double rs = 0.9 * rng.uniform();
      const double slack = std::sqrt((1.0 - rl * rl) * (1.0 - rs * rs));
      const double cc = (2.0 * rng.uniform() - 1.0) * 0.95 * slack;
      const ComboCoefficients c = combo_coefficients(rl, rs, cc);
      check.require("combiner dominance on fixture " + std::to_string(k),
                    c.overlap >= std::max(std::abs(rl), rs) - 1e-10);
    }
  }

  const double h0 = pr_threshold_h(0.0);
  check.require("h(0) = 1.22564 within 1e-4", std::abs(h0 - 1.22564) <= 1e-4);
  return check;
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "figure-1 desk-scale reproduction", 0.05, criterion_fig1_desk},
      {2, "MLR/PR noiseless equivalence", 1e-8, criterion_mlr_pr_equivalence},
      {3, "eigenvalue limits", 0.05, criterion_eigenvalues},
      {4, "threshold formulas", 1e-8, criterion_thresholds},
      {5, "fixed-point cross-validation", 1e-6, criterion_fixed_points},
      {6, "GAMP verification", 1e-6, criterion_gamp},
      {7, "linear-estimator limits", 1e-3, criterion_linear_limits},
      {8, "spectral overlap approaches one", 1e-6, criterion_overlap_to_one},
      {9, "property suite", 1e-8, criterion_property_suite},
  };
  return list;
}

}  // namespace

int acceptance_criteria_count() { return static_cast<int>(criteria().size()); }

std::string acceptance_criterion_name(int index) {
  for (const Criterion& c : criteria())
    if (c.index == index) return c.name;
  throw std::out_of_range("acceptance_criterion_name: unknown index");
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  std::vector<CriterionResult> results;
  for (const Criterion& c : criteria()) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), c.index) ==
            options.only.end())
      continue;
    double tol = c.default_tol;
    if (auto it = options.tolerance_override.find(c.index);
        it != options.tolerance_override.end())
      tol = it->second;

    CriterionResult result;
    result.index = c.index;
    result.name = c.name;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Check check = c.run(tol, options.max_threads);
      result.passed = check.passed();
      result.detail = check.detail();
    } catch (const std::exception& e) {
      result.passed = false;
      result.detail = std::string("exception: ") + e.what();
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(result);
  }
  return results;
}

}  // namespace mixglm
