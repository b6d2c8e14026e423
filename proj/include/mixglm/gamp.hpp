#ifndef MIXGLM_GAMP_HPP
#define MIXGLM_GAMP_HPP

#include <vector>

#include "mixglm/estimators.hpp"

namespace mixglm {

// Scalar state-evolution trace of the GAMP verification iteration. Entry [t-1]
// of each array holds the parameters at iteration t (t starts at 1, the
// linear-estimator step). beta_t^2 = chi1_t^2 + chi2_t^2 + sigmaV2_t.
struct SETrace {
  int choice = 1;
  double lambda_star = 0.0;
  double ef = 0.0;  // E[F(Y)], the deterministic memory coefficient source
  std::vector<double> mu1, mu2, sigmaU2;
  std::vector<double> chi1, chi2, sigmaV2, beta;
  // Closed-form fixed point of the recursion.
  double chi_tilde = 0.0;
  double sigma2_tilde = 0.0;
  double beta_tilde2 = 0.0;
};

struct SEFixedPoint {
  double chi_tilde = 0.0;
  double sigma2_tilde = 0.0;
  double beta_tilde2 = 0.0;
};

// Runs the scalar recursion for t_max iterations. choice selects which signal
// the iteration locks onto (the denoiser divides by lambda*(delta_i) of that
// signal). L is the linear preprocessing function used by the first step; by
// default the optimal one (or the zero map when no linear estimator exists).
// Throws SubcriticalError when the fixed-point hypotheses fail.
SETrace state_evolution(int choice, double alpha, double delta,
                        const Preprocessor& T, const LinkModel& model, int t_max,
                        const Preprocessor* L = nullptr,
                        const QuadratureSpec& spec = {});

// Closed-form fixed point, no iteration.
SEFixedPoint se_fixed_point(int choice, double alpha, double delta,
                            const Preprocessor& T, const LinkModel& model,
                            const QuadratureSpec& spec = {});

struct GampDiagnostics {
  int t = 0;
  double beta2 = 0.0;            // state-evolution beta_t^2
  double chi = 0.0;              // state-evolution chi_{choice,t}
  double norm2_over_d = 0.0;     // ||v^t||^2 / d
  double corr_x1 = 0.0;          // <v^t, sqrt(d) x1*> / d
  double corr_x2 = 0.0;          // <v^t, sqrt(d) x2*> / d
  double corr_eigvec = 0.0;      // |cos angle(v^t, eigenvector of D)|
  double eig_residual = 0.0;     // ||(Dbar/lambda* - (1 + delta E[F]) I) v^t|| / sqrt(d)
};

struct GampRun {
  Eigen::VectorXd v;  // final iterate (length d)
  std::vector<GampDiagnostics> trace;
  int iterations = 0;
  bool converged = false;
  SETrace se;
};

// Finite-dimensional GAMP with deterministic memory coefficients, run on the
// rescaled design A/sqrt(d) against sqrt(d)-normalized signals. Used purely
// as a verification harness: the t = 1 step is the linear estimator and the
// iteration acts as a power method for the top eigenvector selected by
// `choice`. with_eigvec_corr controls whether the (expensive) reference
// eigendecomposition is computed for the diagnostics.
GampRun run_gamp(const Dataset& ds, const LinkModel& model, const Preprocessor& T,
                 int choice, int t_max, double tol, const Preprocessor* L = nullptr,
                 bool with_eigvec_corr = true, const QuadratureSpec& spec = {});

}  // namespace mixglm

#endif  // MIXGLM_GAMP_HPP
