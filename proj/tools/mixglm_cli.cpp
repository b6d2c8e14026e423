// Command-line surface: asymptotic predictions, simulation sweeps, eigenvalue
// comparisons, GAMP verification runs, and the end-to-end verification suite.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "mixglm/acceptance.hpp"
#include "mixglm/estimators.hpp"
#include "mixglm/gamp.hpp"
#include "mixglm/sweep.hpp"

namespace {

using nlohmann::json;

mixglm::LinkModel make_model(const std::string& model, double sigma) {
  if (model == "mlr") return mixglm::LinkModel::mixed_linear_regression(sigma);
  if (model == "pr") return mixglm::LinkModel::mixed_phase_retrieval(sigma);
  throw CLI::ValidationError("model must be 'mlr' or 'pr'");
}

// Single spectral map by name; "opt" resolves per signal elsewhere.
mixglm::Preprocessor make_single_preproc(const std::string& name,
                                         const mixglm::LinkModel& model,
                                         double alpha) {
  if (name == "opt1") return mixglm::optimal_spectral(model, alpha, 1);
  if (name == "opt2") return mixglm::optimal_spectral(model, alpha, 2);
  if (name == "ycs") return mixglm::baseline_ycs();
  if (name == "lal") return mixglm::baseline_lal();
  throw CLI::ValidationError("unknown preprocessing function '" + name + "'");
}

void emit(const std::string& path, const std::string& payload) {
  if (path.empty() || path == "-") {
    std::cout << payload;
    return;
  }
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot open output path: " + path);
  file << payload;
}

int cmd_predict(const std::string& model_name, double sigma, double alpha,
                double delta, const std::string& preproc, const std::string& out) {
  const mixglm::LinkModel model = make_model(model_name, sigma);

  mixglm::Preprocessor t1, t2;
  if (preproc == "opt") {
    t1 = mixglm::optimal_spectral(model, alpha, 1);
    t2 = mixglm::optimal_spectral(model, alpha, 2);
  } else {
    t1 = make_single_preproc(preproc, model, alpha);
    t2 = t1;
  }

  mixglm::Preprocessor lin;
  bool has_lin = true;
  try {
    lin = mixglm::optimal_linear(model);
  } catch (const mixglm::IneffectiveLinearError&) {
    has_lin = false;
  }

  const mixglm::TheoryReport r = mixglm::predict_report(
      model, alpha, delta, t1, t2, has_lin ? &lin : nullptr, preproc);

  json j;
  j["model"] = r.model;
  j["preproc"] = r.preproc;
  j["sigma"] = r.sigma;
  j["alpha"] = r.alpha;
  j["delta"] = r.delta;
  j["lambda_bar"] = r.lambda_bar;
  j["lambda_star_1"] = r.lambda_star_1;
  j["lambda_star_2"] = r.lambda_star_2;
  j["supercritical_1"] = r.supercritical_1;
  j["supercritical_2"] = r.supercritical_2;
  j["eig1"] = r.eig1;
  j["eig2"] = r.eig2;
  j["eig3"] = r.eig3;
  j["rho_lin_1"] = r.rho_lin_1;
  j["rho_lin_2"] = r.rho_lin_2;
  j["n_lin"] = r.n_lin;
  j["lin_effective"] = r.lin_effective;
  j["rho_spec_1"] = r.rho_spec_1;
  j["rho_spec_2"] = r.rho_spec_2;
  j["cross_cov_1"] = r.cross_cov_1;
  j["cross_cov_2"] = r.cross_cov_2;
  j["nu_1"] = r.nu_1;
  j["xi_1"] = r.xi_1;
  j["zeta_1"] = r.zeta_1;
  j["nu_2"] = r.nu_2;
  j["xi_2"] = r.xi_2;
  j["zeta_2"] = r.zeta_2;
  j["combo_overlap_1"] = r.combo_overlap_1;
  j["combo_overlap_2"] = r.combo_overlap_2;
  j["delta_spec_1"] = r.delta_spec_1;
  j["delta_spec_2"] = r.delta_spec_2;
  emit(out, j.dump(2) + "\n");
  return 0;
}

int cmd_eigs(const std::string& model_name, double sigma, double alpha, double delta,
             const std::string& preproc, int d, int seeds, std::uint64_t seed_base,
             const std::string& dump_path, const std::string& out) {
  const mixglm::LinkModel model = make_model(model_name, sigma);
  const mixglm::Preprocessor t = make_single_preproc(preproc, model, alpha);
  const mixglm::EigPrediction pred = mixglm::predict_eigenvalues(alpha, delta, t, model);

  std::ostringstream csv;
  csv << "seed,lam1,lam2,lam3,pred1,pred2,pred3\n";
  char buf[256];
  for (int s = 0; s < seeds; ++s) {
    const mixglm::Dataset ds =
        mixglm::generate_dataset(d, delta, alpha, model, seed_base + s);
    if (s == 0 && !dump_path.empty())
      mixglm::write_dataset_csv(dump_path, ds, model_name);
    const mixglm::SpectralResult sr = mixglm::spectral_estimate(ds, t);
    std::snprintf(buf, sizeof(buf), "%llu,%.8g,%.8g,%.8g,%.8g,%.8g,%.8g\n",
                  static_cast<unsigned long long>(seed_base + s), sr.lam1, sr.lam2,
                  sr.lam3, pred.eig1, pred.eig2, pred.eig3);
    csv << buf;
  }
  emit(out, csv.str());
  return 0;
}

int cmd_gamp_verify(const std::string& model_name, double sigma, double alpha,
                    double delta, int choice, int d, int t_max, double tol,
                    std::uint64_t seed, const std::string& out) {
  const mixglm::LinkModel model = make_model(model_name, sigma);
  const mixglm::Preprocessor t = mixglm::optimal_spectral(model, alpha, choice);
  mixglm::Preprocessor lin;
  const mixglm::Preprocessor* lin_ptr = nullptr;
  try {
    lin = mixglm::optimal_linear(model);
    lin_ptr = &lin;
  } catch (const mixglm::IneffectiveLinearError&) {
  }

  const mixglm::Dataset ds = mixglm::generate_dataset(d, delta, alpha, model, seed);
  const mixglm::GampRun run =
      mixglm::run_gamp(ds, model, t, choice, t_max, tol, lin_ptr, true);

  std::ostringstream csv;
  csv << "t,beta_t2,chi1_t,empirical_norm2_over_d,empirical_corr_x1,corr_with_eigvec\n";
  char buf[256];
  for (const mixglm::GampDiagnostics& diag : run.trace) {
    const double chi1 = run.se.chi1[diag.t - 1];
    std::snprintf(buf, sizeof(buf), "%d,%.8g,%.8g,%.8g,%.8g,%.8g\n", diag.t,
                  diag.beta2, chi1, diag.norm2_over_d, diag.corr_x1,
                  diag.corr_eigvec);
    csv << buf;
  }
  emit(out, csv.str());
  return 0;
}

int cmd_verify(const std::vector<std::string>& tolerance_overrides,
               const std::vector<int>& only) {
  mixglm::AcceptanceOptions options;
  options.only = only;
  for (const std::string& ov : tolerance_overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("tolerance override must look like INDEX=VALUE");
    options.tolerance_override[std::stoi(ov.substr(0, eq))] =
        std::stod(ov.substr(eq + 1));
  }

  const std::vector<mixglm::CriterionResult> results = mixglm::run_acceptance(options);
  bool all_passed = true;
  for (const mixglm::CriterionResult& r : results) {
    std::printf("[%s] criterion %d: %s (%.1fs) - %s\n", r.passed ? "PASS" : "FAIL",
                r.index, r.name.c_str(), r.seconds, r.detail.c_str());
    all_passed = all_passed && r.passed;
  }
  std::printf("%s\n", all_passed ? "all criteria passed" : "FAILURES present");
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimation in two-component mixed generalized linear models: "
               "asymptotic predictions, simulations, and verification."};
  // Usage: mixglm --config run.ini <subcommand>; keys live in a [subcommand]
  // section (or use dotted keys such as predict.delta=4).
  app.set_config("--config", "", "Read options from a key=value file");
  app.require_subcommand(1);

  std::string model = "mlr", preproc = "opt", out;
  double sigma = 0.0, alpha = 0.6, delta = 4.0;

  auto add_model_opts = [&](CLI::App* cmd) {
    cmd->add_option("--model", model, "Observation model: mlr | pr")
        ->check(CLI::IsMember({"mlr", "pr"}));
    cmd->add_option("--sigma", sigma, "Noise standard deviation")->check(CLI::NonNegativeNumber);
    cmd->add_option("--alpha", alpha, "Mixing weight in (1/2, 1)");
    cmd->add_option("--out", out, "Output file ('-' for stdout)");
  };

  // predict
  auto* predict = app.add_subcommand("predict", "Asymptotic theory report as JSON");
  add_model_opts(predict);
  predict->add_option("--delta", delta, "Aspect ratio n/d");
  predict->add_option("--preproc", preproc, "opt | opt1 | opt2 | ycs | lal")
      ->check(CLI::IsMember({"opt", "opt1", "opt2", "ycs", "lal"}));

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Simulation sweep over a delta grid (CSV)");
  std::string preset, scale = "full", estimators_arg = "lin,spec_opt,spec_ycs,spec_lal,comb";
  std::vector<double> grid;
  int d = 2000, trials = 10;
  std::uint64_t seed = 1;
  add_model_opts(sweep_cmd);
  sweep_cmd->add_option("--preset", preset, "fig1 | fig2 | fig3 | fig4 (overrides model options)");
  sweep_cmd->add_option("--scale", scale, "full | desk (desk: d=500, 5 trials)")
      ->check(CLI::IsMember({"full", "desk"}));
  sweep_cmd->add_option("--delta-grid", grid, "Aspect ratios (strictly increasing)");
  sweep_cmd->add_option("--d", d, "Signal dimension");
  sweep_cmd->add_option("--trials", trials, "Independent trials per grid point");
  sweep_cmd->add_option("--seed", seed, "Base seed (trial i uses seed + i)");
  sweep_cmd->add_option("--estimators", estimators_arg,
                        "Comma-separated subset of lin,spec_opt,spec_ycs,spec_lal,comb");

  // eigs
  auto* eigs = app.add_subcommand("eigs", "Empirical vs predicted top-3 eigenvalues (CSV)");
  int eig_d = 1000, eig_seeds = 5;
  std::uint64_t eig_seed_base = 100;
  std::string dump_path;
  add_model_opts(eigs);
  eigs->add_option("--delta", delta, "Aspect ratio n/d");
  eigs->add_option("--preproc", preproc, "opt1 | opt2 | ycs | lal");
  eigs->add_option("--d", eig_d, "Signal dimension");
  eigs->add_option("--seeds", eig_seeds, "Number of seeds");
  eigs->add_option("--seed", eig_seed_base, "Base seed");
  eigs->add_option("--dump-dataset", dump_path,
                   "Write the first seed's (y, eta) table with its config header");

  // gamp-verify
  auto* gamp = app.add_subcommand("gamp-verify", "GAMP vs state-evolution diagnostics (CSV)");
  int choice = 1, gamp_d = 1000, t_max = 50;
  double gamp_tol = 0.0;
  std::uint64_t gamp_seed = 90210;
  add_model_opts(gamp);
  gamp->add_option("--delta", delta, "Aspect ratio n/d");
  gamp->add_option("--choice", choice, "Signal the iteration locks onto: 1 | 2")
      ->check(CLI::Range(1, 2));
  gamp->add_option("--d", gamp_d, "Signal dimension");
  gamp->add_option("--t-max", t_max, "Iteration budget");
  gamp->add_option("--tol", gamp_tol, "Relative-change stopping tolerance (0: run t-max)");
  gamp->add_option("--seed", gamp_seed, "Dataset seed");

  // verify
  auto* verify = app.add_subcommand("verify", "Run the acceptance criteria end to end");
  std::vector<std::string> tol_overrides;
  std::vector<int> only;
  verify->add_option("--tolerance", tol_overrides,
                     "Override a criterion tolerance, INDEX=VALUE (testing hook)");
  verify->add_option("--only", only, "Run only these criterion indices");

  CLI11_PARSE(app, argc, argv);

  try {
    if (predict->parsed()) return cmd_predict(model, sigma, alpha, delta, preproc, out);
    if (eigs->parsed())
      return cmd_eigs(model, sigma, alpha, delta, preproc == "opt" ? "opt1" : preproc,
                      eig_d, eig_seeds, eig_seed_base, dump_path, out);
    if (gamp->parsed())
      return cmd_gamp_verify(model, sigma, alpha, delta, choice, gamp_d, t_max,
                             gamp_tol, gamp_seed, out);
    if (verify->parsed()) return cmd_verify(tol_overrides, only);

    if (sweep_cmd->parsed()) {
      std::vector<mixglm::SweepConfig> configs;
      if (!preset.empty()) {
        configs = mixglm::figure_preset(preset, scale);
      } else {
        mixglm::SweepConfig cfg;
        cfg.model = model;
        cfg.sigma = sigma;
        cfg.alpha = alpha;
        cfg.d = d;
        cfg.trials = trials;
        cfg.delta_grid = grid;
        cfg.seed_base = seed;
        cfg.estimators.clear();
        std::stringstream ss(estimators_arg);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (item == "lin") cfg.estimators.push_back(mixglm::EstimatorKind::Linear);
          else if (item == "spec_opt") cfg.estimators.push_back(mixglm::EstimatorKind::SpectralOpt);
          else if (item == "spec_ycs") cfg.estimators.push_back(mixglm::EstimatorKind::SpectralYcs);
          else if (item == "spec_lal") cfg.estimators.push_back(mixglm::EstimatorKind::SpectralLal);
          else if (item == "comb") cfg.estimators.push_back(mixglm::EstimatorKind::Combined);
          else throw CLI::ValidationError("unknown estimator '" + item + "'");
        }
        configs.push_back(cfg);
      }
      std::vector<mixglm::SweepRow> rows;
      for (const mixglm::SweepConfig& cfg : configs) {
        const std::vector<mixglm::SweepRow> part = mixglm::sweep(cfg);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      emit(out, mixglm::sweep_csv(rows));
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
