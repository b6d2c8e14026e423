#include "mixglm/estimators.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mixglm/rng.hpp"

namespace mixglm {

Dataset generate_dataset(int d, double delta, double alpha, const LinkModel& model,
                         std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("generate_dataset: d must be >= 2");
  if (!(delta > 0.0)) throw std::invalid_argument("generate_dataset: delta must be > 0");
  if (!(alpha > 0.5 && alpha < 1.0))
    throw std::invalid_argument("generate_dataset: alpha must be in (1/2, 1)");
  const int n = static_cast<int>(std::llround(delta * d));
  if (n < 2) {
    std::ostringstream msg;
    msg << "generate_dataset: n = round(delta d) = " << n << " is below 2";
    throw std::invalid_argument(msg.str());
  }

  Rng rng(seed);
  Dataset ds;
  ds.alpha = alpha;
  ds.delta_realized = static_cast<double>(n) / d;
  ds.seed = seed;

  auto draw_sphere = [&](Eigen::VectorXd& x) {
    x.resize(d);
    for (int i = 0; i < d; ++i) x[i] = rng.gaussian();
    x /= x.norm();
  };
  draw_sphere(ds.x1_star);
  draw_sphere(ds.x2_star);

  // Labels drawn before the design so a rejection re-draw (4-sigma check on
  // the label mean) leaves the rest of the stream untouched.
  ds.eta.resize(n);
  const double band = 4.0 * std::sqrt(alpha * (1.0 - alpha) / n);
  for (int attempt = 0; attempt < 64; ++attempt) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
      ds.eta[i] = rng.bernoulli(alpha) ? 1 : 0;
      mean += ds.eta[i];
    }
    mean /= n;
    if (std::abs(mean - alpha) <= band) break;
  }

  ds.A.resize(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) ds.A(i, j) = rng.gaussian();

  ds.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd& x = ds.eta[i] ? ds.x1_star : ds.x2_star;
    const double g = ds.A.row(i).dot(x);
    ds.y[i] = model.sample_y(g, rng);
  }
  return ds;
}

Eigen::VectorXd linear_estimate(const Dataset& ds, const Preprocessor& L) {
  Eigen::VectorXd ly = ds.y.unaryExpr([&](double y) { return L(y); });
  return (ds.A.transpose() * ly) / ds.n();
}

SpectralResult spectral_estimate(const Dataset& ds, const Preprocessor& T) {
  const int d = ds.d();
  if (d < 3) throw std::invalid_argument("spectral_estimate: needs d >= 3");
  Eigen::VectorXd ty = ds.y.unaryExpr([&](double y) { return T(y); });
  Eigen::MatrixXd D = ds.A.transpose() * ty.asDiagonal() * ds.A / ds.n();
  D = 0.5 * (D + D.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(D);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("spectral_estimate: eigensolver did not converge");

  SpectralResult out;
  out.lam1 = solver.eigenvalues()[d - 1];
  out.lam2 = solver.eigenvalues()[d - 2];
  out.lam3 = solver.eigenvalues()[d - 3];
  out.v1 = solver.eigenvectors().col(d - 1);
  out.v2 = solver.eigenvectors().col(d - 2);

  // Deterministic orientation: first coordinate of meaningful size positive.
  auto orient = [](Eigen::VectorXd& v) {
    for (int i = 0; i < v.size(); ++i) {
      if (std::abs(v[i]) > 1e-12) {
        if (v[i] < 0.0) v = -v;
        return;
      }
    }
  };
  orient(out.v1);
  orient(out.v2);
  return out;
}

int calibrate_sign(const Eigen::VectorXd& v, const Eigen::VectorXd& reference) {
  return v.dot(reference) >= 0.0 ? 1 : -1;
}

int calibrate_sign_blind(const Eigen::VectorXd& v, const Eigen::VectorXd& x_lin,
                         double predicted_corr) {
  const double empirical = v.dot(x_lin);
  const int s_pred = predicted_corr >= 0.0 ? 1 : -1;
  const int s_emp = empirical >= 0.0 ? 1 : -1;
  return s_pred * s_emp;
}

Eigen::VectorXd combined_estimate(const Eigen::VectorXd& x_lin,
                                  const Eigen::VectorXd& x_spec,
                                  const ComboCoefficients& coeffs) {
  if (x_lin.size() != x_spec.size())
    throw std::invalid_argument("combined_estimate: size mismatch");
  const double denom = 1.0 - coeffs.nu * coeffs.nu;
  if (!(denom > 0.0))
    throw std::domain_error("combined_estimate: degenerate correlation");
  return (coeffs.xi * x_lin + coeffs.zeta * x_spec) / denom;
}

double overlap(const Eigen::VectorXd& v, const Eigen::VectorXd& x) {
  const double nv = v.norm();
  const double nx = x.norm();
  if (nv == 0.0 || nx == 0.0) return 0.0;
  return std::abs(v.dot(x)) / (nv * nx);
}

EstimationResult estimate_all(const Dataset& ds, const Preprocessor* L,
                              const Preprocessor& T1, const Preprocessor* T2,
                              const TheoryReport& report) {
  const int d = ds.d();
  const double sqrt_d = std::sqrt(static_cast<double>(d));

  EstimationResult out;
  const bool lin_ok = L != nullptr && report.lin_effective;
  out.x_lin = lin_ok ? linear_estimate(ds, *L) : Eigen::VectorXd::Zero(d).eval();
  out.overlap_lin_1 = overlap(out.x_lin, ds.x1_star);
  out.overlap_lin_2 = overlap(out.x_lin, ds.x2_star);

  const SpectralResult s1 = spectral_estimate(ds, T1);
  out.lam1 = s1.lam1;
  out.lam2 = s1.lam2;
  out.lam3 = s1.lam3;
  const SpectralResult s2 = (T2 != nullptr) ? spectral_estimate(ds, *T2) : s1;

  out.sign_1 = calibrate_sign(s1.v1, ds.x1_star);
  out.sign_2 = calibrate_sign(s2.v2, ds.x2_star);
  out.v1 = out.sign_1 * s1.v1;
  out.v2 = out.sign_2 * s2.v2;
  out.overlap_spec_1 = overlap(out.v1, ds.x1_star);
  out.overlap_spec_2 = overlap(out.v2, ds.x2_star);

  Eigen::VectorXd x_lin_scaled;
  const bool lin_nonzero = lin_ok && out.x_lin.norm() > 0.0;
  if (lin_nonzero) x_lin_scaled = sqrt_d * out.x_lin / out.x_lin.norm();
  for (int signal = 1; signal <= 2; ++signal) {
    const Eigen::VectorXd x_spec = sqrt_d * (signal == 1 ? out.v1 : out.v2);
    ComboCoefficients coeffs;
    if (lin_nonzero) {
      coeffs = combo_coefficients(signal == 1 ? report.rho_lin_1 : report.rho_lin_2,
                                  signal == 1 ? report.rho_spec_1 : report.rho_spec_2,
                                  signal == 1 ? report.cross_cov_1 : report.cross_cov_2);
    } else {
      coeffs.zeta = 1.0;  // combiner degenerates to the spectral estimator
    }
    const Eigen::VectorXd x_comb = combined_estimate(
        lin_nonzero ? x_lin_scaled : Eigen::VectorXd::Zero(d).eval(), x_spec, coeffs);
    if (signal == 1) {
      out.x_comb_1 = x_comb;
      out.overlap_comb_1 = overlap(x_comb, ds.x1_star);
    } else {
      out.x_comb_2 = x_comb;
      out.overlap_comb_2 = overlap(x_comb, ds.x2_star);
    }
  }
  return out;
}

void write_dataset_csv(const std::string& path, const Dataset& ds,
                       const std::string& model_name) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error("write_dataset_csv: cannot open " + path);
  file << "# model=" << model_name << " d=" << ds.d() << " n=" << ds.n()
       << " alpha=" << ds.alpha << " delta=" << ds.delta_realized
       << " seed=" << ds.seed << "\n";
  file << "y,eta\n";
  char buf[64];
  for (int i = 0; i < ds.n(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%d\n", ds.y[i], ds.eta[i]);
    file << buf;
  }
  if (!file) throw std::runtime_error("write_dataset_csv: write failed: " + path);
}

}  // namespace mixglm
