#include <cmath>

#include "doctest.h"
#include "wermer/gauge.hpp"
#include "wermer/oracle.hpp"
#include "wermer/schedule.hpp"

using namespace wermer;

namespace {

const RadiusFactor kTenth = RadiusFactor::rational(1, 10);

double rel_err(const LogReal& log_value, const oracle::Rational& exact) {
  const Real256 v = exp(Real256(log_value));
  return abs((v - oracle::to_real(exact)) / oracle::to_real(exact)).convert_to<double>();
}

}  // namespace

TEST_CASE("recurrence values") {
  const auto s = build_schedule({kTenth}, {1}, 2);
  const auto ex = oracle::exact_schedule({{1, 10}}, {1}, 2);
  CHECK(ex.delta[1] == oracle::Rational(1, 160));
  CHECK(ex.eps[1] == oracle::Rational(1, 8));
  CHECK(ex.delta[2] == oracle::Rational(1, 1024000));
  CHECK(ex.eps[2] == oracle::Rational(1, 51200));
  for (int n = 1; n <= 2; ++n) {
    CHECK(rel_err(s.log_delta[n], ex.delta[n]) < 1e-25);
    CHECK(rel_err(s.log_eps[n], ex.eps[n]) < 1e-25);
  }
  const auto s14 = build_schedule({kTenth}, {1, 4}, 2);
  CHECK(rel_err(s14.log_delta[2], oracle::Rational(1, 16384000)) < 1e-25);
  const auto s0 = build_schedule({kTenth}, {1}, 0);
  CHECK(s0.log_delta.size() == 1);
  CHECK(abs(s0.log_delta[0] + log(LogReal(2))) < LogReal(1e-70));
}

TEST_CASE("working precision deltas follow the rationals") {
  const auto s = build_schedule({kTenth}, {1, 4, 4}, 3);
  const auto ex = oracle::exact_schedule({{1, 10}}, {1, 4, 4}, 3);
  const auto d = s.deltas<Real256>();
  const auto e = s.epsilons<Real256>();
  for (int n = 0; n <= 3; ++n) {
    CHECK(abs((d[n] - oracle::to_real(ex.delta[n])) / d[n]) < Real256(1e-70));
    if (n > 0) CHECK(abs((e[n] - oracle::to_real(ex.eps[n])) / e[n]) < Real256(1e-70));
  }
  CHECK(s.deltas<double>()[2] == doctest::Approx(1.0 / 16384000).epsilon(1e-14));
}

TEST_CASE("estimates hold for the recurrence") {
  for (auto m : {std::vector<Multiplicity>{1}, std::vector<Multiplicity>{1, 4, 16, 256, 65536, 7, 3}}) {
    const auto s = build_schedule({kTenth}, m, 6);
    CHECK_FALSE(check_estimates(s).has_value());
  }
  const auto big = build_schedule({kTenth}, {Multiplicity::power_of_two(4096)}, 12);
  CHECK_FALSE(check_estimates(big).has_value());
}

TEST_CASE("overridden deltas are rejected") {
  ScheduleOptions opt;
  opt.delta_log_offset[2] = std::log(1e6);
  try {
    build_schedule({kTenth}, {1, 4}, 2, opt);
    FAIL("expected InvalidSchedule");
  } catch (const InvalidSchedule& e) {
    CHECK(e.step() == 2);
    CHECK(e.invariant() == "est1");
  }
  opt.verify = false;
  const auto s = build_schedule({kTenth}, {1, 4}, 2, opt);
  CHECK(check_estimates(s).has_value());
}

TEST_CASE("radius factor rules") {
  CHECK_THROWS_AS(build_schedule({RadiusFactor::rational(1, 5)}, {1}, 1), InvalidArgument);
  CHECK_THROWS_AS(build_schedule({RadiusFactor::exp_neg(2)}, {1}, 1), InvalidArgument);
  CHECK_NOTHROW(build_schedule({RadiusFactor::exp_neg(3)}, {1}, 3));
  CHECK(RadiusFactor::parse("0.1") == kTenth);
  CHECK(RadiusFactor::parse(" 2/20 ") == kTenth);
  CHECK(RadiusFactor::parse("exp(-8)") == RadiusFactor::exp_neg(8));
  CHECK(RadiusFactor::parse("exp(-7/2)").str() == "exp(-7/2)");
  CHECK(Multiplicity::parse("2^4096").str() == "2^4096");
  CHECK(Multiplicity::parse("2^6").value() == 64);
  CHECK_THROWS_AS(Multiplicity::parse("0"), InvalidArgument);
  CHECK(square_at_most(Multiplicity(4), Multiplicity(16)));
  CHECK_FALSE(square_at_most(Multiplicity(5), Multiplicity(24)));
  CHECK(square_at_most(Multiplicity::power_of_two(40), Multiplicity::power_of_two(80)));
  CHECK_FALSE(square_at_most(Multiplicity::power_of_two(41), Multiplicity::power_of_two(80)));
  CHECK(square_at_most(Multiplicity(std::uint64_t{1} << 32), Multiplicity::power_of_two(64)));
}

TEST_CASE("validate_schedule") {
  const auto s = build_schedule({kTenth}, {1}, 30);
  const auto rep = validate_schedule(s);
  CHECK(rep.tail_converges);
  CHECK(rep.tail_partial.back() == doctest::Approx(std::log(10.0)).epsilon(1e-8));
  for (std::size_t i = 1; i < rep.tail_partial.size(); ++i) CHECK(rep.tail_partial[i] >= rep.tail_partial[i - 1]);
  CHECK_FALSE(rep.super_exponential_m);

  std::vector<RadiusFactor> r{kTenth};
  for (int n = 2; n <= 10; ++n) r.push_back(RadiusFactor::exp_neg(std::int64_t{1} << n));
  const auto div = validate_schedule(build_schedule(r, {1}, 10));
  CHECK_FALSE(div.tail_converges);
  CHECK(div.tail_partial[10] - div.tail_partial[9] == doctest::Approx(1.0));

  const auto sup = validate_schedule(build_schedule({kTenth}, {1, 4, 16, 256, 65536}, 5));
  CHECK(sup.super_exponential_m);
  CHECK(sup.super_exponential_from == 2);
  CHECK(sup.scales_separate);
}

TEST_CASE("capacity drift") {
  const auto s = build_schedule({kTenth}, {1}, 12);
  CHECK(capacity_drift(s, 1) == doctest::Approx(-1.3863).epsilon(1e-4));
  CHECK(capacity_drift(s, 2) == doctest::Approx(-1.7329).epsilon(1e-4));
  CHECK(std::abs(capacity_drift(s, 1) - (-1.3859)) < 1e-3);
  double prev_step = 0;
  for (int n = 0; n <= 12; ++n) {
    const double v = capacity_drift(s, n);
    CHECK(std::abs(v) <= 2.2);
    CHECK(v == doctest::Approx(oracle::drift_from_rationals(1, 10, n)).epsilon(1e-12));
    if (n >= 1) {
      const double step = std::abs(v - capacity_drift(s, n - 1));
      if (n >= 3) CHECK(step <= 0.6 * prev_step);
      prev_step = step;
    }
  }
  CHECK(capacity_drift(s, 12) == doctest::Approx(-std::log(8.0)).epsilon(1e-3));
  CHECK_THROWS_AS(capacity_drift(build_schedule({kTenth}, {1, 4}, 2), 1), NotOrdinary);
}

TEST_CASE("choose_m") {
  const auto theta = GaugeFunction::power_log(1, 0, 1);  // |log x|
  const auto m = choose_m(theta, 3, 3, {kTenth}, 2);
  REQUIRE(m.size() == 2);
  std::vector<double> lr(2, std::log(0.1)), lm;
  for (const auto& x : m) lm.push_back(x.log2());
  CHECK(oracle::recheck_gauge_condition(theta, 3, 3, lr, lm));
  CHECK(square_at_most(m[0], m[1]));
  CHECK(m[0].log2() >= 1);
  // Minimality on the lattice: the previous lattice point fails at n = 1.
  if (m[0].log2() > 1) {
    std::vector<double> smaller{m[0].log2() / 2};
    CHECK_FALSE(oracle::recheck_gauge_condition(theta, 3, 3, {std::log(0.1)}, smaller));
  }
  CHECK_THROWS_AS(choose_m(GaugeFunction::power_log(1, 0), 3, 3, {kTenth}, 1), GaugeTooWeak);
  CHECK(choose_m(theta, 3, 3, {kTenth}, 0).empty());
  const auto deep = choose_m(theta, 3, 3, {kTenth}, 5);
  std::vector<double> lr5(5, std::log(0.1)), lm5;
  for (const auto& x : deep) lm5.push_back(x.log2());
  CHECK(oracle::recheck_gauge_condition(theta, 3, 3, lr5, lm5));
  const auto planned = build_schedule({kTenth}, deep, 5);
  CHECK(validate_schedule(planned).super_exponential_m);
}

TEST_CASE("schedule text round trip") {
  ScheduleOptions opt;
  opt.verify = false;
  opt.delta_log_offset[2] = 3.5;
  const auto s = build_schedule({kTenth, RadiusFactor::exp_neg(4)}, {1, Multiplicity::power_of_two(100)}, 2, opt);
  const std::string text = write_schedule(s);
  CHECK(text.find("2^100") != std::string::npos);
  const auto back = read_schedule(text);
  CHECK(back.depth == 2);
  CHECK(back.r(2) == RadiusFactor::exp_neg(4));
  CHECK(back.m(2) == Multiplicity::power_of_two(100));
  CHECK(write_schedule(back) == text);
  CHECK(back.log_delta[2] == s.log_delta[2]);
}
