#include "mixglm/numerics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>
#include <sstream>

namespace mixglm {

void QuadratureSpec::validate() const {
  if (hermite_order < 20) throw std::invalid_argument("hermite_order must be >= 20");
  if (!(y_tail_sigmas > 0.0)) throw std::invalid_argument("y_tail_sigmas must be > 0");
  if (!(abs_tol > 0.0 && abs_tol < 1.0)) throw std::invalid_argument("abs_tol must be in (0,1)");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("rel_tol must be in (0,1)");
  if (!(root_tol > 0.0)) throw std::invalid_argument("root_tol must be > 0");
}

namespace {

// Golub-Welsch for the probabilists' Hermite polynomials: the Jacobi matrix
// is tridiagonal with zero diagonal and off-diagonal sqrt(k). Eigenvalues are
// the nodes; squared first eigenvector components are the weights (the weight
// function is the standard normal density, so they sum to 1).
HermiteRule build_hermite_rule(int order) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd subdiag(order - 1);
  for (int k = 1; k < order; ++k) subdiag[k - 1] = std::sqrt(static_cast<double>(k));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, subdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermite_rule: tridiagonal eigensolver failed");

  HermiteRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int j = 0; j < order; ++j) {
    rule.nodes[j] = solver.eigenvalues()[j];
    const double v0 = solver.eigenvectors()(0, j);
    rule.weights[j] = v0 * v0;
  }
  return rule;
}

}  // namespace

const HermiteRule& hermite_rule(int order) {
  static std::map<int, HermiteRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_hermite_rule(order)).first;
  return it->second;
}

double gauss_hermite_expect(const std::function<double(double)>& f,
                            const QuadratureSpec& spec) {
  spec.validate();
  const HermiteRule& rule = hermite_rule(spec.hermite_order);
  double sum = 0.0;
  for (size_t j = 0; j < rule.nodes.size(); ++j) {
    const double fj = f(rule.nodes[j]);
    if (!std::isfinite(fj)) {
      std::ostringstream msg;
      msg << "gauss_hermite_expect: integrand is not finite at node g = " << rule.nodes[j];
      throw std::domain_error(msg.str());
    }
    sum += rule.weights[j] * fj;
  }
  return sum;
}

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
  double integral;
  double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double fv[15];
  const double fc = f(center);
  double result_gauss = kWg[3] * fc;
  double result_kronrod = kWgk[7] * fc;
  double resabs = std::abs(result_kronrod);
  fv[14] = fc;

  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv[j] = f1;
    fv[7 + j] = f2;
    result_kronrod += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) result_gauss += kWg[j / 2] * (f1 + f2);
  }

  const double mean = 0.5 * result_kronrod;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[7 + j] - mean));

  PanelResult out;
  out.integral = result_kronrod * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((result_kronrod - result_gauss) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / eps50)
    err = std::max(err, eps50 * resabs);
  out.error = err;
  return out;
}

struct Segment {
  double a, b, integral, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

}  // namespace

double integrate_y(const std::function<double(double)>& f, Interval support,
                   const QuadratureSpec& spec) {
  spec.validate();
  if (!(support.hi > support.lo)) return 0.0;

  constexpr int kMaxSegments = 4096;
  // Seed with several panels so a feature much narrower than the interval
  // cannot slip between the nodes of a single rule and fake convergence.
  constexpr int kInitialSegments = 16;

  std::priority_queue<Segment> segments;
  double total_integral = 0.0;
  double total_error = 0.0;
  const double step = support.width() / kInitialSegments;
  for (int i = 0; i < kInitialSegments; ++i) {
    const double a = support.lo + i * step;
    const double b = (i + 1 == kInitialSegments) ? support.hi : a + step;
    const PanelResult panel = gk15(f, a, b);
    segments.push({a, b, panel.integral, panel.error});
    total_integral += panel.integral;
    total_error += panel.error;
  }

  while (true) {
    const double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(total_integral));
    if (total_error <= target) break;
    if (static_cast<int>(segments.size()) >= kMaxSegments) {
      std::ostringstream msg;
      msg << "integrate_y: panel budget exhausted, error bound " << total_error
          << " above target " << target << " (estimate " << total_integral << ")";
      throw QuadratureError(msg.str(), total_integral, total_error);
    }
    Segment worst = segments.top();
    segments.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // interval cannot be split further in double precision; accept it
      total_error -= worst.error;
      if (segments.empty()) break;
      continue;
    }
    PanelResult left = gk15(f, worst.a, mid);
    PanelResult right = gk15(f, mid, worst.b);
    total_integral += left.integral + right.integral - worst.integral;
    total_error += left.error + right.error - worst.error;
    segments.push({worst.a, mid, left.integral, left.error});
    segments.push({mid, worst.b, right.integral, right.error});
  }
  return total_integral;
}

double find_root_monotone(const std::function<double(double)>& f, double lo,
                          double hi, double tol) {
  if (!(hi > lo)) throw std::invalid_argument("find_root_monotone: requires hi > lo");
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) {
    std::ostringstream msg;
    msg << "find_root_monotone: no sign change on [" << lo << ", " << hi << "] (f(lo) = "
        << fa << ", f(hi) = " << fb << ")";
    throw BracketError(msg.str());
  }

  for (int it = 0; it < 400 && (b - a) > tol; ++it) {
    double x;
    if (it % 2 == 0 && fb != fa) {
      // secant step, kept strictly inside the bracket
      x = a - fa * (b - a) / (fb - fa);
      const double margin = 0.01 * (b - a);
      if (!(x > a + margin && x < b - margin)) x = 0.5 * (a + b);
    } else {
      x = 0.5 * (a + b);
    }
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (fa * fx < 0.0) {
      b = x;
      fb = fx;
    } else {
      a = x;
      fa = fx;
    }
  }
  return 0.5 * (a + b);
}

double expand_bracket(const std::function<double(double)>& f, double lo,
                      int max_doublings) {
  const double f_lo = f(lo);
  if (f_lo == 0.0) return lo;
  double hi = lo * (1.0 + 1e-6) + 1e-12;
  if (!(hi > lo)) hi = lo + 1e-12;
  for (int k = 0; k < max_doublings; ++k) {
    const double f_hi = f(hi);
    if (f_lo * f_hi <= 0.0) return hi;
    hi = lo + 2.0 * (hi - lo);
    if (!std::isfinite(hi)) break;
  }
  std::ostringstream msg;
  msg << "expand_bracket: no sign change found above lo = " << lo << " after "
      << max_doublings << " doublings";
  throw BracketError(msg.str());
}

double erfcx(double x) {
  constexpr double kSqrtPi = 1.7724538509055160273;
  if (x < 0.0) {
    // erfcx(-x) = 2 exp(x^2) - erfcx(x); overflows for x << 0, as does erfcx itself.
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  if (x < 25.0) return std::exp(x * x) * std::erfc(x);
  // Asymptotic series, truncation error below 1e-13 for x >= 25.
  const double ix2 = 1.0 / (x * x);
  const double series =
      1.0 + ix2 * (-0.5 + ix2 * (0.75 + ix2 * (-1.875 + ix2 * 6.5625)));
  return series / (x * kSqrtPi);
}

}  // namespace mixglm
