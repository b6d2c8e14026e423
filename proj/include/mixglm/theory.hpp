#ifndef MIXGLM_THEORY_HPP
#define MIXGLM_THEORY_HPP

#include <string>

#include "mixglm/preprocessors.hpp"
#include "mixglm/scalar_models.hpp"

namespace mixglm {

// Deterministic asymptotic predictions for the two-component mixed GLM with
// aspect ratio delta and mixing weight alpha. Z denotes T(Y) throughout, and
// the per-signal effective ratios are delta_1 = alpha delta and
// delta_2 = (1 - alpha) delta.

// phi(lambda) = lambda E[Z G^2 / (lambda - Z)], defined for lambda > sup Z.
double phi(double lambda, const Preprocessor& T, const LinkModel& model,
           const QuadratureSpec& spec = {});

// psi(lambda; Delta) = lambda (1/Delta + E[Z / (lambda - Z)]).
double psi(double lambda, double Delta, const Preprocessor& T,
           const LinkModel& model, const QuadratureSpec& spec = {});

struct LambdaBar {
  double value;
  // False when psi(.; Delta) is increasing on the whole half-line, so the
  // minimizer sits at the support edge rather than at an interior root of
  // E[(Z/(lambda - Z))^2] = 1/Delta.
  bool interior;
};
LambdaBar lambda_bar(double Delta, const Preprocessor& T, const LinkModel& model,
                     const QuadratureSpec& spec = {});

struct LambdaStar {
  double value;
  bool explicit_root;   // E[Z (G^2 - 1)/(lambda - Z)] = 1/Delta_i had a root
  bool supercritical;   // lambda* exceeds lambda_bar(delta): outlier separates
};
// Solves zeta(lambda; Delta_i) = phi(lambda); Delta_i must be alpha*delta or
// (1-alpha)*delta. The supercritical flag compares against the full-ratio
// bulk edge lambda_bar(delta).
LambdaStar lambda_star(double Delta_i, double delta, const Preprocessor& T,
                       const LinkModel& model, const QuadratureSpec& spec = {});

struct EigPrediction {
  double eig1, eig2, eig3;  // limits of the top three eigenvalues of D
};
EigPrediction predict_eigenvalues(double alpha, double delta, const Preprocessor& T,
                                  const LinkModel& model,
                                  const QuadratureSpec& spec = {});

struct RhoLin {
  double rho1 = 0.0, rho2 = 0.0;
  double n_lin = 0.0;       // normalized length of the linear estimator
  bool effective = false;   // E[G L(Y)] != 0
};
RhoLin rho_lin(double alpha, double delta, const Preprocessor& L,
               const LinkModel& model, const QuadratureSpec& spec = {});

// Limiting overlap of the i-th spectral eigenvector with its signal; zero in
// the subcritical regime.
double rho_spec(double alpha, double delta, const Preprocessor& T,
                const LinkModel& model, int signal, const QuadratureSpec& spec = {});

// Covariance E[W_lin W_i_spec] between the noise parts of the linear and
// spectral estimators; zero when the spectral side is subcritical.
double cross_cov(double alpha, double delta, const Preprocessor& L,
                 const Preprocessor& T, const LinkModel& model, int signal,
                 const QuadratureSpec& spec = {});

struct ComboCoefficients {
  double nu = 0.0;       // correlation between the two (rescaled) estimators
  double xi = 0.0;       // weight on the linear estimator
  double zeta = 0.0;     // weight on the spectral estimator
  double overlap = 0.0;  // overlap of the Bayes-optimal combination
};
// Coefficients of the conditional-expectation combiner and its overlap.
// Throws std::domain_error if nu^2 >= 1 (degenerate correlation).
ComboCoefficients combo_coefficients(double rho_lin_i, double rho_spec_i,
                                     double cross_cov_i);

// Minimal aspect ratio at which some spectral preprocessing function attains
// positive overlap with signal i; +inf if the defining integral vanishes.
double spectral_threshold(double alpha, int signal, const LinkModel& model,
                          const QuadratureSpec& spec = {});

// beta_i* solving the optimal-overlap fixed point; the optimal overlap is
// 1/sqrt(beta* + alpha_i). Throws SubcriticalError at or below the threshold.
double beta_star(double alpha, double delta, int signal, const LinkModel& model,
                 const QuadratureSpec& spec = {});

// Same fixed point through the closed-form (erfcx-based) expectation for
// mixed linear regression with Gaussian noise of deviation sigma.
double closed_form_mlr_fixed_point(double alpha, double delta, double sigma,
                                   int signal, const QuadratureSpec& spec = {});

// Spectral threshold for mixed phase retrieval via the closed form in h(s).
double closed_form_pr_threshold(double alpha, double sigma, int signal,
                                const QuadratureSpec& spec = {});

// h(s) = integral of exp(-(2+s) z^2) z^2 / (1 + erf(z)) over the real line.
double pr_threshold_h(double s, const QuadratureSpec& spec = {});

// Inverse Stieltjes transform of the free additive convolution of the two
// component spectral laws: -1/z + delta E[Z/(1 + z Z)]. Satisfies
// (1/delta) s^{-1}(-1/lambda) = psi(lambda; delta).
double stieltjes_inverse_sum(double z, double delta, const Preprocessor& T,
                             const LinkModel& model, const QuadratureSpec& spec = {});

// Everything the CLI reports for one (model, alpha, delta) configuration.
// The eigenvalue block refers to the spectral matrix built with T1 (for the
// per-signal optimal maps these are two different matrices; rho_spec_i and
// the derived fields always use the matrix of their own signal).
struct TheoryReport {
  std::string model;
  std::string preproc;
  double sigma = 0.0;
  double alpha = 0.0;
  double delta = 0.0;

  double lambda_bar = 0.0;
  double lambda_star_1 = 0.0, lambda_star_2 = 0.0;
  bool supercritical_1 = false, supercritical_2 = false;
  double eig1 = 0.0, eig2 = 0.0, eig3 = 0.0;

  double rho_lin_1 = 0.0, rho_lin_2 = 0.0, n_lin = 0.0;
  bool lin_effective = false;
  double rho_spec_1 = 0.0, rho_spec_2 = 0.0;
  double cross_cov_1 = 0.0, cross_cov_2 = 0.0;
  double nu_1 = 0.0, xi_1 = 0.0, zeta_1 = 0.0;
  double nu_2 = 0.0, xi_2 = 0.0, zeta_2 = 0.0;
  double combo_overlap_1 = 0.0, combo_overlap_2 = 0.0;
  double delta_spec_1 = 0.0, delta_spec_2 = 0.0;
};

// Assembles the full report. T2 may equal T1 (single-matrix estimators such
// as the YCS/LAL baselines); L may be null when no linear estimator exists.
TheoryReport predict_report(const LinkModel& model, double alpha, double delta,
                            const Preprocessor& T1, const Preprocessor& T2,
                            const Preprocessor* L, const std::string& preproc_name,
                            const QuadratureSpec& spec = {});

}  // namespace mixglm

#endif  // MIXGLM_THEORY_HPP
