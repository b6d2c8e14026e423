#include "mixglm/sweep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <thread>

#include "mixglm/estimators.hpp"

namespace mixglm {

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Linear: return "lin";
    case EstimatorKind::SpectralOpt: return "spec_opt";
    case EstimatorKind::SpectralYcs: return "spec_ycs";
    case EstimatorKind::SpectralLal: return "spec_lal";
    case EstimatorKind::Combined: return "comb";
  }
  return "?";
}

void SweepConfig::validate() const {
  if (model != "mlr" && model != "pr")
    throw std::invalid_argument("sweep: model must be 'mlr' or 'pr'");
  if (!(sigma >= 0.0)) throw std::invalid_argument("sweep: sigma must be >= 0");
  if (!(alpha > 0.5 && alpha < 1.0))
    throw std::invalid_argument("sweep: alpha must be in (1/2, 1)");
  if (d < 3) throw std::invalid_argument("sweep: d must be >= 3");
  if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
  if (delta_grid.empty()) throw std::invalid_argument("sweep: empty delta grid");
  for (size_t i = 0; i + 1 < delta_grid.size(); ++i)
    if (!(delta_grid[i] < delta_grid[i + 1]))
      throw std::invalid_argument("sweep: delta_grid must be strictly increasing");
  if (estimators.empty()) throw std::invalid_argument("sweep: no estimators selected");
}

LinkModel SweepConfig::make_model() const {
  return model == "mlr" ? LinkModel::mixed_linear_regression(sigma)
                        : LinkModel::mixed_phase_retrieval(sigma);
}

namespace {

struct GridPointTheory {
  Preprocessor t1, t2;         // per-signal spectral maps for spec_opt
  Preprocessor ycs, lal;
  bool has_lin = false;
  Preprocessor lin;
  TheoryReport opt;            // report with T1*/T2*
  double rho_ycs_1 = 0.0, rho_ycs_2 = 0.0;
  double rho_lal_1 = 0.0, rho_lal_2 = 0.0;
};

GridPointTheory make_theory(const SweepConfig& cfg, const LinkModel& model,
                            double delta, bool need_ycs, bool need_lal) {
  GridPointTheory th;
  th.t1 = optimal_spectral(model, cfg.alpha, 1, cfg.quad);
  th.t2 = optimal_spectral(model, cfg.alpha, 2, cfg.quad);
  try {
    th.lin = optimal_linear(model, cfg.quad);
    th.has_lin = true;
  } catch (const IneffectiveLinearError&) {
    th.has_lin = false;
  }
  th.opt = predict_report(model, cfg.alpha, delta, th.t1, th.t2,
                          th.has_lin ? &th.lin : nullptr, "opt", cfg.quad);
  if (need_ycs) {
    th.ycs = baseline_ycs();
    th.rho_ycs_1 = rho_spec(cfg.alpha, delta, th.ycs, model, 1, cfg.quad);
    th.rho_ycs_2 = rho_spec(cfg.alpha, delta, th.ycs, model, 2, cfg.quad);
  }
  if (need_lal) {
    th.lal = baseline_lal();
    th.rho_lal_1 = rho_spec(cfg.alpha, delta, th.lal, model, 1, cfg.quad);
    th.rho_lal_2 = rho_spec(cfg.alpha, delta, th.lal, model, 2, cfg.quad);
  }
  return th;
}

// overlap[estimator][signal-1] for one synthetic dataset
using TrialOverlaps = std::map<EstimatorKind, std::array<double, 2>>;

TrialOverlaps run_trial(const SweepConfig& cfg, const LinkModel& model,
                        const GridPointTheory& th, double delta,
                        std::uint64_t seed) {
  const Dataset ds = generate_dataset(cfg.d, delta, cfg.alpha, model, seed);
  const double sqrt_d = std::sqrt(static_cast<double>(cfg.d));

  const bool want_lin =
      std::count(cfg.estimators.begin(), cfg.estimators.end(), EstimatorKind::Linear) > 0;
  const bool want_comb =
      std::count(cfg.estimators.begin(), cfg.estimators.end(), EstimatorKind::Combined) > 0;
  const bool want_opt =
      std::count(cfg.estimators.begin(), cfg.estimators.end(), EstimatorKind::SpectralOpt) > 0;

  TrialOverlaps out;

  Eigen::VectorXd x_lin;
  if ((want_lin || want_comb) && th.has_lin) x_lin = linear_estimate(ds, th.lin);
  if (want_lin) {
    const double o1 = th.has_lin ? overlap(x_lin, ds.x1_star) : 0.0;
    const double o2 = th.has_lin ? overlap(x_lin, ds.x2_star) : 0.0;
    out[EstimatorKind::Linear] = {o1, o2};
  }

  if (want_opt || want_comb) {
    const SpectralResult s1 = spectral_estimate(ds, th.t1);
    const SpectralResult s2 = spectral_estimate(ds, th.t2);
    if (want_opt)
      out[EstimatorKind::SpectralOpt] = {overlap(s1.v1, ds.x1_star),
                                         overlap(s2.v2, ds.x2_star)};
    if (want_comb) {
      std::array<double, 2> combo{0.0, 0.0};
      Eigen::VectorXd x_lin_scaled;
      const bool lin_ok = th.has_lin && x_lin.norm() > 0.0;
      if (lin_ok) x_lin_scaled = sqrt_d * x_lin / x_lin.norm();
      for (int signal = 1; signal <= 2; ++signal) {
        const Eigen::VectorXd& v = (signal == 1) ? s1.v1 : s2.v2;
        const Eigen::VectorXd& x_star = (signal == 1) ? ds.x1_star : ds.x2_star;
        const double rl = (signal == 1) ? th.opt.rho_lin_1 : th.opt.rho_lin_2;
        const double rs = (signal == 1) ? th.opt.rho_spec_1 : th.opt.rho_spec_2;
        const double cc = (signal == 1) ? th.opt.cross_cov_1 : th.opt.cross_cov_2;
        const int sign = calibrate_sign(v, x_star);
        const Eigen::VectorXd x_spec = sign * sqrt_d * v;
        ComboCoefficients coeffs;
        if (lin_ok) {
          coeffs = combo_coefficients(rl, rs, cc);
        } else {
          coeffs.nu = 0.0;
          coeffs.xi = 0.0;
          coeffs.zeta = 1.0;  // combiner degenerates to the spectral estimator
        }
        const Eigen::VectorXd x_comb = combined_estimate(
            lin_ok ? x_lin_scaled : Eigen::VectorXd::Zero(cfg.d).eval(), x_spec,
            coeffs);
        combo[signal - 1] = overlap(x_comb, x_star);
      }
      out[EstimatorKind::Combined] = combo;
    }
  }

  if (std::count(cfg.estimators.begin(), cfg.estimators.end(),
                 EstimatorKind::SpectralYcs) > 0) {
    const SpectralResult s = spectral_estimate(ds, th.ycs);
    out[EstimatorKind::SpectralYcs] = {overlap(s.v1, ds.x1_star),
                                       overlap(s.v2, ds.x2_star)};
  }
  if (std::count(cfg.estimators.begin(), cfg.estimators.end(),
                 EstimatorKind::SpectralLal) > 0) {
    const SpectralResult s = spectral_estimate(ds, th.lal);
    out[EstimatorKind::SpectralLal] = {overlap(s.v1, ds.x1_star),
                                       overlap(s.v2, ds.x2_star)};
  }
  return out;
}

double predicted_overlap(const GridPointTheory& th, EstimatorKind kind, int signal) {
  switch (kind) {
    case EstimatorKind::Linear:
      return std::abs(signal == 1 ? th.opt.rho_lin_1 : th.opt.rho_lin_2);
    case EstimatorKind::SpectralOpt:
      return signal == 1 ? th.opt.rho_spec_1 : th.opt.rho_spec_2;
    case EstimatorKind::SpectralYcs:
      return signal == 1 ? th.rho_ycs_1 : th.rho_ycs_2;
    case EstimatorKind::SpectralLal:
      return signal == 1 ? th.rho_lal_1 : th.rho_lal_2;
    case EstimatorKind::Combined:
      return signal == 1 ? th.opt.combo_overlap_1 : th.opt.combo_overlap_2;
  }
  return 0.0;
}

}  // namespace

std::vector<SweepRow> sweep(const SweepConfig& config) {
  config.validate();
  const LinkModel model = config.make_model();
  const bool need_ycs = std::count(config.estimators.begin(), config.estimators.end(),
                                   EstimatorKind::SpectralYcs) > 0;
  const bool need_lal = std::count(config.estimators.begin(), config.estimators.end(),
                                   EstimatorKind::SpectralLal) > 0;

  unsigned threads = config.max_threads > 0
                         ? static_cast<unsigned>(config.max_threads)
                         : std::max(1u, std::thread::hardware_concurrency());

  std::vector<SweepRow> rows;
  for (double delta : config.delta_grid) {
    const GridPointTheory th = make_theory(config, model, delta, need_ycs, need_lal);

    std::vector<TrialOverlaps> results(config.trials);
    for (int base = 0; base < config.trials; base += static_cast<int>(threads)) {
      const int batch = std::min<int>(threads, config.trials - base);
      std::vector<std::future<TrialOverlaps>> futures;
      futures.reserve(batch);
      for (int k = 0; k < batch; ++k) {
        const std::uint64_t seed = config.seed_base + static_cast<std::uint64_t>(base + k);
        futures.push_back(std::async(std::launch::async, [&, seed] {
          return run_trial(config, model, th, delta, seed);
        }));
      }
      for (int k = 0; k < batch; ++k) results[base + k] = futures[k].get();
    }

    for (EstimatorKind kind : config.estimators) {
      for (int signal = 1; signal <= 2; ++signal) {
        double mean = 0.0;
        for (const auto& r : results) mean += r.at(kind)[signal - 1];
        mean /= config.trials;
        double var = 0.0;
        for (const auto& r : results) {
          const double dev = r.at(kind)[signal - 1] - mean;
          var += dev * dev;
        }
        const double sd = config.trials > 1 ? std::sqrt(var / (config.trials - 1)) : 0.0;

        SweepRow row;
        row.model = config.model;
        row.sigma = config.sigma;
        row.alpha = config.alpha;
        row.d = config.d;
        row.delta = delta;
        row.estimator = estimator_name(kind);
        row.signal = signal;
        row.overlap_mean = mean;
        row.overlap_std = sd;
        row.overlap_pred = predicted_overlap(th, kind, signal);
        row.trials = config.trials;
        row.seed_base = config.seed_base;
        rows.push_back(row);
      }
    }
  }

  if (!config.output_path.empty()) write_sweep_csv(config.output_path, rows);
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "model,sigma,alpha,d,delta,estimator,signal,overlap_mean,overlap_std,"
         "overlap_pred,trials,seed_base\n";
  char buf[512];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g,%d,%.10g,%s,%d,%.10g,%.10g,%.10g,%d,%llu\n",
                  r.model.c_str(), r.sigma, r.alpha, r.d, r.delta,
                  r.estimator.c_str(), r.signal, r.overlap_mean, r.overlap_std,
                  r.overlap_pred, r.trials,
                  static_cast<unsigned long long>(r.seed_base));
    out << buf;
  }
  return out.str();
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream file(path);
  if (!file)
    throw std::runtime_error("write_sweep_csv: cannot open output path: " + path);
  file << sweep_csv(rows);
  if (!file)
    throw std::runtime_error("write_sweep_csv: write failed: " + path);
}

std::vector<SweepConfig> figure_preset(const std::string& name, const std::string& scale) {
  const bool desk = scale == "desk";
  if (!desk && scale != "full")
    throw std::invalid_argument("figure_preset: scale must be 'full' or 'desk'");
  const int d = desk ? 500 : 2000;
  const int trials = desk ? 5 : 10;

  auto base = [&](const std::string& model, double sigma, double alpha,
                  std::vector<double> grid, std::vector<EstimatorKind> est) {
    SweepConfig c;
    c.model = model;
    c.sigma = sigma;
    c.alpha = alpha;
    c.d = d;
    c.trials = trials;
    c.delta_grid = std::move(grid);
    c.estimators = std::move(est);
    return c;
  };
  const std::vector<double> grid{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0};
  const std::vector<EstimatorKind> all{
      EstimatorKind::Linear, EstimatorKind::SpectralOpt, EstimatorKind::SpectralYcs,
      EstimatorKind::SpectralLal, EstimatorKind::Combined};
  const std::vector<EstimatorKind> opt_only{EstimatorKind::SpectralOpt};

  if (name == "fig1") {
    // Noiseless mixed linear regression, all estimators, both signals.
    return {base("mlr", 0.0, 0.6, grid, all)};
  }
  if (name == "fig2") {
    // Optimal spectral estimator for two mixing weights.
    return {base("mlr", 0.0, 0.6, grid, opt_only), base("mlr", 0.0, 0.8, grid, opt_only)};
  }
  if (name == "fig3") {
    // Regression vs phase retrieval at two noise levels, first signal.
    return {base("mlr", 0.8, 0.8, grid, opt_only), base("mlr", 1.5, 0.8, grid, opt_only),
            base("pr", 0.8, 0.8, grid, opt_only), base("pr", 1.5, 0.8, grid, opt_only)};
  }
  if (name == "fig4") {
    // Regression vs phase retrieval at sigma = 1.5, both signals.
    return {base("mlr", 1.5, 0.6, grid, opt_only), base("pr", 1.5, 0.6, grid, opt_only)};
  }
  throw std::invalid_argument("figure_preset: unknown preset '" + name + "'");
}

}  // namespace mixglm
