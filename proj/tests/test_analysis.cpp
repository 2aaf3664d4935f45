#include <cmath>
#include <random>

#include "doctest.h"
#include "wermer/analysis.hpp"
#include "wermer/oracle.hpp"

using namespace wermer;

namespace {

const RadiusFactor kTenth = RadiusFactor::rational(1, 10);

TowerModel make_tower(std::vector<Multiplicity> m, int depth, std::uint64_t seed = 0) {
  return TowerModel(build_schedule({kTenth}, std::move(m), depth), AnchorSequence(seed), depth);
}

}  // namespace

TEST_CASE("lattice potentials") {
  CHECK(L_potential(1, {0.5, 0}) == 0);
  CHECK(L_potential(2, {0, 0}) == doctest::Approx(std::log(0.5)));
  CHECK(L_potential(4, {0, 0}) == doctest::Approx((std::log(0.25) + 4 * std::log(0.75)) / 5));
  CHECK(lattice_sigma(4).size() == 5);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<Complex<double>> zs;
  for (int i = 0; i < 2000; ++i) zs.push_back(std::polar(std::sqrt(U(rng)), 2 * M_PI * U(rng)));
  double small = 0, all = 0;
  for (int k : {1, 2, 4, 8, 16, 32, 64})
    for (const auto& z : zs) {
      const double v = std::abs(L_potential(k, z));
      all = std::max(all, v);
      if (k <= 2) small = std::max(small, v);
    }
  CHECK(all <= small + 0.5);
}

TEST_CASE("lattice ball masses") {
  CHECK(nu_ball_mass(4, {0, 0}, 0.3) == doctest::Approx(0.2));
  CHECK(nu_ball_mass(1, {0, 0}, 2) == 1);
  CHECK_THROWS_AS(nu_ball_mass(2, {0, 0}, 0), InvalidArgument);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0, 1);
  for (int i = 0; i < 200; ++i) {
    const int k = 1 + static_cast<int>(rng() % 12);
    const Complex<double> z = std::polar(1.1 * std::sqrt(U(rng)), 2 * M_PI * U(rng));
    const double r = 0.02 + 0.6 * U(rng);
    CHECK(nu_ball_mass(k, z, r) == doctest::Approx(oracle::nu_mass_sampled(k, z, r, 20000)).epsilon(2e-3));
    double prev = 0;
    for (double s = 0.01; s < 2.5; s *= 1.3) {
      const double m = nu_ball_mass(k, z, s);
      CHECK(m >= prev);
      prev = m;
    }
  }
  // Linear bound, constant 6.
  for (int i = 0; i < 1000; ++i) {
    const int k = 1 << (rng() % 7);
    const Complex<double> z = std::polar(std::sqrt(U(rng)), 2 * M_PI * U(rng));
    const double r = std::pow(10.0, -3 + 3.5 * U(rng));
    CHECK(nu_ball_mass(k, z, r) <= 6 * r);
  }
}

TEST_CASE("convergence report") {
  const auto t = make_tower({1}, 4);
  const auto rep = convergence_report(t, 4, SlicePlane{}, SliceGrid{20, 0.95}, t.context(4), 4);
  REQUIRE(rep.gap.size() == 4);
  CHECK(rep.gap[0] <= std::log(10.0) + 3);
  for (std::size_t n = 0; n < 4; ++n) CHECK(rep.gap[n] <= rep.bound[n]);
  for (std::size_t n = 1; n < 4; ++n) CHECK(rep.ratio[n] <= 0.75);
  CHECK(rep.bound_holds);
  CHECK(rep.ratios_hold);
  CHECK(rep.partial_sum < 2 * rep.gap[0]);
  CHECK(rep.vgap[0] == 0);  // v_{n+1} = u_n when m = 1
  CHECK(convergence_report(make_tower({1}, 0), 0, SlicePlane{}, SliceGrid{}, PrecisionContext(128), 1).gap.empty());
}

TEST_CASE("harmonic gap") {
  const auto t = make_tower({1, 4}, 2);
  const auto ctx = t.context(2);
  for (int n : {0, 1}) {
    const auto h = harmonic_gap_check(t, n, SlicePlane{}, SliceGrid{50, 0.99}, ctx, 4);
    CHECK(h.holds);
    CHECK(h.bound == doctest::Approx(std::log(10.0) + std::log(2.0)));
  }
  // On the root of P_1 both terms are clipped.
  const double deep = harmonic_gap_at(t, Signature{{0}}, {0.4, 0}, {std::sqrt(0.05), 0}, ctx);
  CHECK(deep == doctest::Approx(std::abs(0.5 * std::log(1.0 / 160) - std::log(0.5))).epsilon(1e-12));
  CHECK(deep == doctest::Approx(1.844).epsilon(1e-3));
  // Far outside: 1/2 |log|1 - eps_1 A_1 / w^2||.
  const double far = harmonic_gap_at(t, Signature{{0}}, {0.4, 0}, {0.9, 0}, ctx);
  CHECK(far == doctest::Approx(0.5 * std::abs(std::log(1 - 0.05 / 0.81))).epsilon(1e-12));
  CHECK(far <= 0.5 * std::log(2.0));
}

TEST_CASE("circle averages") {
  const auto t = make_tower({1, 4}, 2);
  const auto ctx = t.context(2);
  const Direction v;
  CHECK(std::abs(circle_average_T(t, 0, {{0.2, 0}, {0, 0}}, v, 0.25, ctx).T) < 1e-12);
  CHECK(std::abs(circle_average_T(t, 2, {{0.2, 0.1}, {0.1, 0.85}}, v, 0.1, ctx).T) < 1e-6);
  CHECK_THROWS_AS(circle_average_T(t, 1, {{0.2, 0}, {0.5, 0}}, v, 0.6, ctx), DomainExit);
  CHECK_THROWS_AS((circle_average_T(t, 1, {{0.2, 0}, {0, 0}}, Direction{{0.5, 0}, {std::sqrt(0.75), 0}}, 0.1, ctx)),
                  InvalidArgument);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int i = 0; i < 30; ++i) {
    const Point2 p{{0.4 + 0.05 * U(rng), 0.05 * U(rng)}, {0.3 * U(rng), 0.3 * U(rng)}};
    CHECK(circle_average_T(t, 1 + i % 2, p, v, 0.02 + 0.1 * (U(rng) + 1), ctx).T >= -1e-8);
  }
}

TEST_CASE("jensen cross-check") {
  const auto t = make_tower({1, 4}, 2);
  const auto ctx = t.context(2);
  const Direction v;
  // Centre on an atom of the depth-1 measure.
  const double r = 0.05;
  const auto j = jensen_cross_check(t, 1, {{0.4, 0}, {std::sqrt(0.05), 0}}, v, r, ctx);
  CHECK(j.atoms_inside == 1);
  CHECK(j.difference < 1e-6);
  const double conf = 0.00625 / (2 * std::sqrt(0.05));
  CHECK(j.mass_integral == doctest::Approx(0.5 / (r * r) * std::log(r / conf)).epsilon(1e-9));
  // Atom at distance d < r.
  const double d = 0.025;
  const auto j2 = jensen_cross_check(t, 1, {{0.4, 0}, {std::sqrt(0.05) + d, 0}}, v, r, ctx);
  CHECK(j2.atoms_inside == 1);
  CHECK(j2.mass_integral == doctest::Approx(0.5 / (r * r) * std::log(r / d)).epsilon(1e-12));
  CHECK(j2.difference < 1e-6);
  // No atoms within r.
  const auto j3 = jensen_cross_check(t, 2, {{0.4, 0}, {0.6, 0.3}}, v, 0.1, ctx);
  CHECK(j3.atoms_inside == 0);
  CHECK(std::abs(j3.quadrature) < 1e-10);
  CHECK(j3.mass_integral == 0);
  // Circles inside a component.
  const auto j5 = jensen_cross_check(t, 0, {{0.4, 0}, {0.1, 0.1}}, v, 0.1, ctx);
  CHECK(j5.mass_integral == 0);
  CHECK(std::abs(j5.quadrature) < 1e-12);
  const auto j6 = jensen_cross_check(t, 1, {{0.4, 0}, {std::sqrt(0.05), 0}}, v, 0.005, ctx);
  CHECK(j6.atoms_inside == 0);
  CHECK(j6.difference < 1e-6);
  // A circle through a component is rejected.
  CHECK_THROWS_AS(jensen_cross_check(t, 1, {{0.4, 0}, {std::sqrt(0.05) + 0.05, 0}}, v, 0.05, ctx), InvalidArgument);
  // Tilted direction and depth 2.
  const Direction tilt{{0.004, 0.003}, {std::sqrt(1 - 0.000025), 0}};
  const auto j4 = jensen_cross_check(t, 2, {{0.41, 0.01}, {0.2, 0.05}}, tilt, 0.08, ctx);
  CHECK(j4.atoms_inside > 0);
  CHECK(j4.difference < 1e-6);
}

TEST_CASE("interior and band sups") {
  const auto t = make_tower({1}, 1);
  const auto ctx = t.context(1);
  const Direction v;
  const auto s = interior_sup_check(t, 1, v, 0.02, 0.05, 5, ctx, 4);
  CHECK(s.holds);
  CHECK(s.min_T >= -1e-8);
  CHECK_THROWS_AS(interior_sup_check(t, 1, v, 0.06, 0.05, 5, ctx), DomainExit);
}

TEST_CASE("two regimes") {
  const auto t = make_tower({1, 4}, 2);
  const auto ctx = t.context(2);
  const auto rep = two_regime_check(t, 1, SlicePlane{}, 20, ctx, 4);
  CHECK(rep.plateau_quantized);
  CHECK(rep.plateau_samples > 0);
  CHECK(rep.quadratic_samples > 0);
  CHECK(rep.rad_next.hi < rep.rad_int.hi);
  CHECK(rep.rad_int.hi < rep.rad.lo);
  CHECK(rep.C_plateau <= 3);
  for (const auto& p : rep.profiles)
    for (const auto& m : p.masses) CHECK(denominator(Rational(m * 20)) == 1);
  const auto flat = make_tower({1, 1}, 2);
  CHECK_THROWS_AS(two_regime_check(flat, 1, SlicePlane{}, 4, flat.context(2)), ScaleOverlap);
  CHECK_THROWS_AS(two_regime_check(t, 0, SlicePlane{}, 4, ctx), InvalidArgument);
}

TEST_CASE("box dimension") {
  const auto flat = make_tower({1}, 4);
  const auto e = box_dimension_slice(flat, SlicePlane{}, {0, 1, 2, 3, 4}, flat.context(4));
  CHECK(e[0].estimate == 0);
  CHECK(e[0].count == 1);
  for (int n = 1; n <= 4; ++n) CHECK(e[n].count == std::ldexp(1.0, n));
  // Constant r: radii shrink geometrically, so the estimate levels off.
  for (int n = 2; n <= 4; ++n) {
    CHECK(e[n].radius / e[n - 1].radius > 1.0 / 45);
    CHECK(e[n].radius / e[n - 1].radius < 1.0 / 20);
    CHECK(e[n].estimate < std::log(2.0) / std::log(20.0));
  }
  // r_n -> 0: super-exponential radii, estimate decreasing.
  std::vector<RadiusFactor> r;
  for (int n = 1; n <= 5; ++n) r.push_back(RadiusFactor::exp_neg(n + 2));
  const TowerModel decay(build_schedule(r, {1}, 5), AnchorSequence(0), 5);
  const auto d = box_dimension_slice(decay, SlicePlane{}, {1, 2, 3, 4, 5}, decay.context(5), 4);
  for (int n = 1; n < 5; ++n) CHECK(d[n].estimate < d[n - 1].estimate);
  const auto t = make_tower({1, 4, 16}, 3);
  const auto g = box_dimension_slice(t, SlicePlane{}, {1, 2, 3}, t.context(3), 4);
  CHECK(g[0].estimate < g[1].estimate);
  CHECK(g[1].estimate < g[2].estimate);
}
