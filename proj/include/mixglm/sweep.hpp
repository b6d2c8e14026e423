#ifndef MIXGLM_SWEEP_HPP
#define MIXGLM_SWEEP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mixglm/theory.hpp"

namespace mixglm {

enum class EstimatorKind { Linear, SpectralOpt, SpectralYcs, SpectralLal, Combined };

std::string estimator_name(EstimatorKind kind);

// One batch experiment: a grid of aspect ratios, a set of estimators, and a
// number of independent trials per grid point. Seeds are seed_base + trial,
// so a config reproduces bit-identically.
struct SweepConfig {
  std::string model = "mlr";  // mlr | pr
  double sigma = 0.0;
  double alpha = 0.6;
  int d = 2000;
  std::vector<double> delta_grid;
  int trials = 10;
  std::vector<EstimatorKind> estimators = {
      EstimatorKind::Linear, EstimatorKind::SpectralOpt, EstimatorKind::SpectralYcs,
      EstimatorKind::SpectralLal, EstimatorKind::Combined};
  std::uint64_t seed_base = 1;
  std::string output_path;  // empty -> no file written
  QuadratureSpec quad;
  int max_threads = 0;  // 0 -> hardware concurrency

  void validate() const;
  LinkModel make_model() const;
};

struct SweepRow {
  std::string model;
  double sigma = 0.0;
  double alpha = 0.0;
  int d = 0;
  double delta = 0.0;
  std::string estimator;
  int signal = 0;
  double overlap_mean = 0.0;
  double overlap_std = 0.0;
  double overlap_pred = 0.0;
  int trials = 0;
  std::uint64_t seed_base = 0;
};

// Runs the experiment grid; trials execute concurrently, rows come out in
// grid order. Writes CSV to config.output_path when set.
std::vector<SweepRow> sweep(const SweepConfig& config);

// Stable schema: model,sigma,alpha,d,delta,estimator,signal,overlap_mean,
// overlap_std,overlap_pred,trials,seed_base
std::string sweep_csv(const std::vector<SweepRow>& rows);
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

// Named presets reproducing the experiment figures; scale = "full" keeps
// d = 2000 / 10 trials, scale = "desk" maps to d = 500 / 5 trials.
std::vector<SweepConfig> figure_preset(const std::string& name, const std::string& scale);

}  // namespace mixglm

#endif  // MIXGLM_SWEEP_HPP
