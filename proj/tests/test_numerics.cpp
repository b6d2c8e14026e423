#include <doctest.h>

#include <cmath>

#include "mixglm/numerics.hpp"
#include "mixglm/scalar_models.hpp"

using namespace mixglm;

TEST_SUITE_BEGIN("numerics");

TEST_CASE("gauss_hermite_expect reproduces Gaussian moments") {
  CHECK(gauss_hermite_expect([](double g) { return g * g; }) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gauss_hermite_expect([](double g) { return std::pow(g, 4); }) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(gauss_hermite_expect([](double g) { return g; }) == doctest::Approx(0.0).epsilon(1e-12));

  // E[G^{2k}] = (2k-1)!! up to k = 4 already at order 40
  QuadratureSpec spec;
  spec.hermite_order = 40;
  const double m6 = gauss_hermite_expect([](double g) { return std::pow(g, 6); }, spec);
  const double m8 = gauss_hermite_expect([](double g) { return std::pow(g, 8); }, spec);
  CHECK(m6 == doctest::Approx(15.0).epsilon(1e-8));
  CHECK(m8 == doctest::Approx(105.0).epsilon(1e-8));
}

TEST_CASE("gauss_hermite_expect rejects non-finite integrands") {
  CHECK_THROWS_AS(gauss_hermite_expect([](double g) { return 1.0 / (g - g); }),
                  std::domain_error);
}

TEST_CASE("hermite weights sum to one") {
  const HermiteRule& rule = hermite_rule(80);
  double sum = 0.0;
  for (double w : rule.weights) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("integrate_y: normal density normalizes") {
  auto pdf = [](double y) {
    return std::exp(-0.5 * y * y) / std::sqrt(2.0 * 3.14159265358979323846);
  };
  CHECK(integrate_y(pdf, {-10.0, 10.0}) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("integrate_y: moment functions integrate to one") {
  const LinkModel model = LinkModel::mixed_linear_regression(1.0);
  const double half = 10.0 * std::sqrt(2.0);
  const double i0 =
      integrate_y([&](double y) { return model.moment_m(0, y); }, {-half, half});
  const double i2 =
      integrate_y([&](double y) { return model.moment_m(2, y); }, {-half, half});
  CHECK(i0 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(i2 == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("integrate_y is linear") {
  auto f = [](double y) { return std::exp(-y * y); };
  auto g = [](double y) { return std::cos(y) * std::exp(-0.5 * y * y); };
  const Interval iv{-8.0, 8.0};
  const double a = 2.75, b = -1.25;
  const double combined =
      integrate_y([&](double y) { return a * f(y) + b * g(y); }, iv);
  const double split = a * integrate_y(f, iv) + b * integrate_y(g, iv);
  CHECK(combined == doctest::Approx(split).epsilon(1e-10));
}

TEST_CASE("find_root_monotone basics") {
  auto f = [](double x) { return x * x - 2.0; };
  const double root = find_root_monotone(f, 0.0, 2.0, 1e-12);
  CHECK(root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(std::abs(f(root)) <= 10.0 * 1e-9);
}

TEST_CASE("find_root_monotone on a constant-Z bulk-edge equation") {
  // Z = 1 a.s., Delta = 4: E[(Z/(x-Z))^2] = 1/4 has the root x = 1 + sqrt(4).
  auto f = [](double x) { return 1.0 / ((x - 1.0) * (x - 1.0)) - 0.25; };
  const double root = find_root_monotone(f, 1.0 + 1e-9, 10.0, 1e-10);
  CHECK(root == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("find_root_monotone rejects same-sign brackets") {
  auto f = [](double x) { return x * x + 1.0; };
  CHECK_THROWS_AS(find_root_monotone(f, 0.0, 1.0, 1e-10), BracketError);
}

TEST_CASE("expand_bracket finds a sign change by doubling") {
  auto f = [](double x) { return 100.0 - x; };
  const double hi = expand_bracket(f, 1.0);
  CHECK(f(1.0) * f(hi) <= 0.0);
  CHECK_THROWS_AS(expand_bracket([](double) { return 1.0; }, 1.0), BracketError);
}

TEST_CASE("erfcx matches exp(x^2) erfc(x) and its asymptotics") {
  for (double x : {0.0, 0.5, 1.0, 3.0, 10.0, 24.9}) {
    CHECK(erfcx(x) == doctest::Approx(std::exp(x * x) * std::erfc(x)).epsilon(1e-12));
  }
  // continuity across the series switch
  CHECK(erfcx(25.0 + 1e-9) == doctest::Approx(erfcx(25.0 - 1e-9)).epsilon(1e-10));
  // large-argument limit 1/(x sqrt(pi))
  const double x = 1e4;
  CHECK(erfcx(x) == doctest::Approx(1.0 / (x * std::sqrt(3.14159265358979323846))).epsilon(1e-6));
}

TEST_CASE("quadrature spec validation") {
  QuadratureSpec spec;
  spec.hermite_order = 10;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.hermite_order = 80;
  spec.abs_tol = 2.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_SUITE_END();
