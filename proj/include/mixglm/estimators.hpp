#ifndef MIXGLM_ESTIMATORS_HPP
#define MIXGLM_ESTIMATORS_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "mixglm/preprocessors.hpp"
#include "mixglm/scalar_models.hpp"
#include "mixglm/theory.hpp"

namespace mixglm {

// One synthetic instance of the mixed GLM: Gaussian design, unit-sphere
// signals, Bernoulli(alpha) latent labels, observations through the link.
// Fully reproducible from the seed.
struct Dataset {
  Eigen::MatrixXd A;        // n x d, rows ~ N(0, I_d)
  Eigen::VectorXd y;        // observations
  Eigen::VectorXi eta;      // 1 -> first signal, 0 -> second
  Eigen::VectorXd x1_star;  // unit norm
  Eigen::VectorXd x2_star;  // unit norm
  double alpha = 0.0;
  double delta_realized = 0.0;  // n / d
  std::uint64_t seed = 0;

  int n() const { return static_cast<int>(A.rows()); }
  int d() const { return static_cast<int>(A.cols()); }
};

Dataset generate_dataset(int d, double delta, double alpha, const LinkModel& model,
                         std::uint64_t seed);

// x_lin = (1/n) A^T L(y)
Eigen::VectorXd linear_estimate(const Dataset& ds, const Preprocessor& L);

struct SpectralResult {
  Eigen::VectorXd v1, v2;  // top two unit eigenvectors of D
  double lam1 = 0.0, lam2 = 0.0, lam3 = 0.0;
};

// Full symmetric eigendecomposition of D = (1/n) A^T diag(T(y)) A. Eigenvector
// signs are normalized so the first coordinate of meaningful size is positive.
SpectralResult spectral_estimate(const Dataset& ds, const Preprocessor& T);

// Sign of <v, reference>; ground-truth calibration used in simulations.
int calibrate_sign(const Eigen::VectorXd& v, const Eigen::VectorXd& reference);

// Blind calibration: flips v so that sign(<v, x_lin>) matches the sign of the
// predicted correlation between the two estimators.
int calibrate_sign_blind(const Eigen::VectorXd& v, const Eigen::VectorXd& x_lin,
                         double predicted_corr);

// Componentwise Bayes combination (xi x_lin + zeta x_spec) / (1 - nu^2);
// inputs are expected on the sqrt(d)-sphere.
Eigen::VectorXd combined_estimate(const Eigen::VectorXd& x_lin,
                                  const Eigen::VectorXd& x_spec,
                                  const ComboCoefficients& coeffs);

// |<v, x>| / (||v|| ||x||); zero when either vector vanishes.
double overlap(const Eigen::VectorXd& v, const Eigen::VectorXd& x);

// Full single-dataset pipeline: linear, per-signal spectral, and combined
// estimators with ground-truth sign calibration and measured overlaps.
struct EstimationResult {
  Eigen::VectorXd x_lin;            // raw linear estimator (may be zero)
  Eigen::VectorXd v1, v2;           // calibrated unit eigenvectors
  double lam1 = 0.0, lam2 = 0.0, lam3 = 0.0;  // top-3 eigenvalues (signal-1 matrix)
  Eigen::VectorXd x_comb_1, x_comb_2;
  double overlap_lin_1 = 0.0, overlap_lin_2 = 0.0;
  double overlap_spec_1 = 0.0, overlap_spec_2 = 0.0;
  double overlap_comb_1 = 0.0, overlap_comb_2 = 0.0;
  int sign_1 = 1, sign_2 = 1;
};

// L may be null (no effective linear estimator); T2 may be null to reuse the
// T1 matrix for the second signal (its v2), otherwise v2 comes from the T2
// matrix. Combination weights are taken from the report.
EstimationResult estimate_all(const Dataset& ds, const Preprocessor* L,
                              const Preprocessor& T1, const Preprocessor* T2,
                              const TheoryReport& report);

// Compact dump of one dataset: a config header plus one (y, eta) row per
// observation. The design matrix is regenerable from the seed and not stored.
void write_dataset_csv(const std::string& path, const Dataset& ds,
                       const std::string& model_name);

}  // namespace mixglm

#endif  // MIXGLM_ESTIMATORS_HPP
