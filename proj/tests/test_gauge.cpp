#include <cmath>

#include "doctest.h"
#include "wermer/errors.hpp"
#include "wermer/gauge.hpp"

using namespace wermer;

TEST_CASE("gauge evaluation in log form") {
  const auto g = GaugeFunction::power_log(2, 1.5, 1);
  CHECK(g(0.01) == doctest::Approx(2 * std::pow(0.01, 1.5) * std::log(100.0)));
  CHECK(g.log_at(-1e6) == doctest::Approx(std::log(2.0) - 1.5e6 + std::log(1e6)));
  const auto ll = GaugeFunction::power_loglog(1, 0);
  CHECK(ll(0.5) == doctest::Approx(1.0));
  CHECK(ll(std::exp(-100.0)) == doctest::Approx(std::log(100.0)));
  const auto t = GaugeFunction::table({{0.01, 1e-4}, {0.1, 1e-2}, {1, 1}});
  CHECK(t(0.0316227766) == doctest::Approx(1e-3).epsilon(1e-8));
  CHECK(t.integrable_against_inverse_square());
  CHECK(t.times_power(1)(0.1) == doctest::Approx(1e-3));
}

TEST_CASE("closed-form moduli") {
  for (double r : {0.1, 0.01, 0.3, 1e-6}) {
    const double L = -std::log(r);
    CHECK(std::abs(modulus_from_h(GaugeFunction::power_log(1, 2), r) - (2 * r + r * L)) <= 1e-12);
    const double expect = 2 * std::sqrt(2.0) * std::sqrt(r) + 2 * std::sqrt(r) - 2 * r;
    CHECK(std::abs(modulus_from_h(GaugeFunction::power_log(1, 1.5), r) - expect) <= 1e-12);
  }
  CHECK(modulus_from_h(GaugeFunction::power_log(1, 2), 0.1) == doctest::Approx(0.430259).epsilon(1e-6));
  CHECK_THROWS_AS(modulus_from_h(GaugeFunction::power_log(1, 1), 0.1), DivergentGauge);
  CHECK_THROWS_AS(modulus_from_h(GaugeFunction::power_log(1, 0.5), 0.1), DivergentGauge);
}

TEST_CASE("quadrature agrees with closed forms") {
  // The table gauge takes the numeric path; on exact powers it must match the closed form.
  std::vector<std::pair<double, double>> s;
  for (int i = -60; i <= 0; ++i) s.emplace_back(std::pow(10.0, i / 4.0), std::pow(10.0, 1.5 * i / 4.0));
  const auto tab = GaugeFunction::table(s);
  for (double r : {0.1, 0.02, 1e-5}) {
    const double exact = modulus_from_h(GaugeFunction::power_log(1, 1.5), r);
    CHECK(modulus_from_h(tab, r) == doctest::Approx(exact).epsilon(1e-10));
  }
  // h = s^2 |log s|: psi(r) = int_0^{2r} |log s| ds + r int_r^1 |log s|/s ds.
  const auto hl = GaugeFunction::power_log(1, 2, 1);
  for (double r : {0.1, 0.01}) {
    const double a = 2 * r, L = -std::log(r);
    const double exact = a * (1 - std::log(a)) + r * L * L / 2;
    CHECK(modulus_from_h(hl, r) == doctest::Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("modulus is increasing and dominates its first integral") {
  const auto h = GaugeFunction::power_loglog(1, 2);
  double prev = 0;
  for (double r = 1e-6; r < 0.4; r *= 1.7) {
    const double v = modulus_from_h(h, r);
    CHECK(v > prev);
    prev = v;
    const double first = modulus_from_h(GaugeFunction::power_log(1, 2), r) - r * -std::log(r);  // 2r
    CHECK(v >= first);
  }
}

TEST_CASE("tame gauge") {
  SUBCASE("psi = r log^2(1/r)") {
    const auto psi = GaugeFunction::power_log(1, 1, 2);
    const auto th = tame_gauge(psi);
    const auto c = check_tamed(psi, th);
    CHECK(c.max_theta_ratio <= 1 + 1e-12);
    CHECK(c.decreasing);
    CHECK(c.diverging);
    CHECK(c.max_modulus_ratio < 10);
    CHECK(th.segments().size() >= 2);
  }
  SUBCASE("psi = r^0.9") {
    const auto psi = GaugeFunction::power_log(1, 0.9);
    const auto th = tame_gauge(psi);
    const auto c = check_tamed(psi, th);
    CHECK(c.max_theta_ratio <= 1 + 1e-12);
    CHECK(c.decreasing);
    CHECK(c.diverging);
  }
  SUBCASE("psi = r|log r| is too weak") {
    CHECK_THROWS_AS(tame_gauge(GaugeFunction::power_log(1, 1, 1)), GaugeTooWeak);
  }
}
