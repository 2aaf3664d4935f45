#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "wermer/oracle.hpp"
#include "wermer/tower.hpp"

using namespace wermer;

namespace {

const RadiusFactor kTenth = RadiusFactor::rational(1, 10);

TowerModel make_tower(std::vector<Multiplicity> m, int depth, std::uint64_t seed = 0) {
  return TowerModel(build_schedule({kTenth}, std::move(m), depth), AnchorSequence(seed), depth);
}

Complex<Real256> c256(double re, double im = 0) { return {Real256(re), Real256(im)}; }

double anchor_discrepancy(const AnchorSequence& a, int parity, int count) {
  // Equal-area annuli times equal angular sectors.
  const int R = 4, S = 8;
  std::vector<int> cells(R * S, 0);
  for (int i = 0; i < count; ++i) {
    const int n = parity == 0 ? 2 * i + 3 : 2 * i + 2;
    const Complex<double> z = a(n);
    const double area = std::norm(z) / (0.25 * 0.25);
    const int ri = std::min(R - 1, static_cast<int>(area * R));
    double ang = std::arg(z) / (2 * std::numbers::pi);
    if (ang < 0) ang += 1;
    const int si = std::min(S - 1, static_cast<int>(ang * S));
    ++cells[ri * S + si];
  }
  double d = 0;
  for (int c : cells) d = std::max(d, std::abs(double(c) / count - 1.0 / (R * S)));
  return d;
}

}  // namespace

TEST_CASE("sigma grids and signature counts") {
  CHECK(lattice_grid(1).size() == 1);
  CHECK(lattice_grid(4).size() == 5);
  CHECK(lattice_grid(7).size() == 13);
  for (std::uint64_t m : {1, 2, 4, 7, 16, 33}) {
    const auto a = lattice_grid(m);
    const auto b = oracle::lattice(m);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].j == b[i].first);
      CHECK(a[i].k == b[i].second);
    }
  }
  const auto t = make_tower({1, 4, 4}, 3);
  const auto s2 = sigma_grid(t, 2);
  REQUIRE(s2.size() == 5);
  // delta_1 = 1/160, step 3 delta_1 / 4.
  double maxabs = 0;
  for (auto z : s2) maxabs = std::max(maxabs, std::abs(z));
  CHECK(maxabs == doctest::Approx(3.0 / 640));
  CHECK(maxabs <= (1.0 / 160) * (1 - 1.0 / 4) + 1e-15);
  CHECK(sigma_grid(t, 1).size() == 1);
  CHECK(t.signature_count(0) == 1);
  CHECK(t.signature_count(3) == 25);
  CHECK(make_tower({1}, 3).signature_count(3) == 1);
  for (std::uint64_t i = 0; i < 25; ++i) CHECK(t.index_of(t.signature(3, i)) == i);
  CHECK(t.signature(3, 7).str() == "0.1.2");
}

TEST_CASE("sigma grid from delta_0 = 1/2, m = 4") {
  // Sigma_1 with m_1 = 4 is {0, +-3/8, +-3i/8}.
  const auto t = make_tower({4, 1}, 1);
  const auto s = sigma_grid(t, 1);
  REQUIRE(s.size() == 5);
  int at_38 = 0;
  for (auto z : s) at_38 += std::abs(std::abs(z) - 0.375) < 1e-15;
  CHECK(at_38 == 4);
}

TEST_CASE("anchors") {
  const AnchorSequence a(0);
  CHECK(a(1) == Complex<double>(0, 0));
  for (int n = 1; n < 5000; ++n) CHECK(std::abs(a(n)) < 0.25);
  for (int parity : {0, 1}) CHECK(anchor_discrepancy(a, parity, 2048) < anchor_discrepancy(a, parity, 64));
  const AnchorSequence b(42);
  CHECK(b(3) != a(3));
  CHECK(AnchorSequence(42)(9) == b(9));
}

TEST_CASE("point evaluation") {
  const auto t = make_tower({1}, 2);
  const auto ctx = t.context(2);
  CHECK(eval_P(t, Signature{}, {0.3, 0}, {0, 0.8}, ctx) == Complex<double>(0, 0.8));
  const Signature s1{{0}};
  CHECK(std::abs(eval_P(t, s1, {0.4, 0}, {0.3, 0}, ctx) - Complex<double>(0.04, 0)) < 1e-15);
  CHECK(std::abs(eval_P(t, s1, {0.4, 0}, {std::sqrt(0.05), 0}, ctx)) < 1e-15);
  CHECK(eval_dP(t, Signature{}, {0.1, 0}, {0.5, 0.2}, ctx) == Complex<double>(1, 0));
  CHECK(std::abs(eval_dP(t, s1, {0.4, 0}, {0.3, 0}, ctx) - Complex<double>(0.6, 0)) < 1e-15);
}

TEST_CASE("derivative against central differences") {
  const auto t = make_tower({1, 4, 4}, 3);
  const auto k = make_constants<Real256>(t);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-0.6, 0.6);
  const Real256 h("1e-8");
  for (int i = 0; i < 20; ++i) {
    const Signature s = t.signature(3, rng() % 25);
    const Complex<Real256> z = c256(0.4 + U(rng) / 10, U(rng) / 10), w = c256(U(rng), U(rng));
    const auto d = eval_dP(k, s, z, w);
    const auto fd = (eval_P(k, s, z, w + Complex<Real256>(h)) - eval_P(k, s, z, w - Complex<Real256>(h))) /
                    Complex<Real256>(2 * h);
    CHECK(abs(d - fd) <= Real256(1e-12) * (1 + abs(d)));
  }
}

TEST_CASE("degree and monic expansion") {
  for (int depth = 1; depth <= 3; ++depth) {
    const auto t = make_tower({1, 4, 4}, depth, 5);
    const auto k = make_constants<Real256>(t);
    const auto ex = oracle::exact_schedule({{1, 10}}, {1, 4, 4}, depth);
    std::vector<Complex<double>> anchors;
    for (int n = 1; n <= depth; ++n) anchors.push_back(t.anchors()(n));
    const Signature s = t.signature(depth, t.signature_count(depth) - 1);
    std::vector<std::size_t> choice(s.index.begin(), s.index.end());
    const auto poly = oracle::slice_polynomial(ex, {1, 4, 4}, choice, anchors, {0.41, 0.02}, {0, 0}, c256(0));
    REQUIRE(poly.size() == (std::size_t{1} << depth) + 1);
    CHECK(abs(poly.back() - c256(1)) < Real256(1e-70));
    for (double x : {-0.7, 0.1, 0.55}) {
      const Complex<Real256> w = c256(x, x / 3);
      const auto direct = eval_P(k, s, c256(0.41, 0.02), w);
      CHECK(abs(direct - oracle::horner(poly, w)) < Real256(1e-60));
    }
  }
}

TEST_CASE("|A_n| <= 1 on the bidisk") {
  const auto t = make_tower({1, 4, 4, 1, 1}, 5, 9);
  const auto k = make_constants<double>(t, false);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0, 1), A(0, 2 * std::numbers::pi);
  for (int i = 0; i < 5000; ++i) {
    const Complex<double> z = std::polar(0.5 * std::sqrt(U(rng)), A(rng)), w = std::polar(std::sqrt(U(rng)), A(rng));
    for (int n = 1; n <= 5; ++n) CHECK(std::abs(anchor_term(k, n, z, w)) <= 1.0);
  }
}

TEST_CASE("potentials") {
  const auto t = make_tower({1}, 2);
  const auto ctx = t.context(2);
  CHECK(eval_u(t, 0, {0.1, 0}, {0.8, 0}, ctx) == doctest::Approx(std::log(0.8)).epsilon(1e-14));
  CHECK(eval_u(t, 0, {0.1, 0}, {0.1, 0}, ctx) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(eval_u(t, 1, {0.4, 0}, {0.8, 0}, ctx) == doctest::Approx(0.5 * std::log(0.59)).epsilon(1e-14));
  CHECK(eval_u(t, 1, {0.4, 0}, {0.8, 0}, ctx) == doctest::Approx(-0.263816).epsilon(1e-6));
  for (double x : {0.05, 0.3, 0.7})
    CHECK(eval_v(t, 1, {0.4, 0}, {x, 0.1}, ctx) == doctest::Approx(eval_u(t, 0, {0.4, 0}, {x, 0.1}, ctx)));
}

TEST_CASE("v_2 against direct summation") {
  const auto t = make_tower({1, 4}, 2);
  const auto k = make_constants<Real256>(t);
  const Real256 d1 = k.delta[1];
  for (double x : {0.9, 0.2236, 0.25, 0.6}) {
    const Complex<Real256> z = c256(0.4), w = c256(x, 0.003);
    const Complex<Real256> p1 = eval_P(k, Signature{{0}}, z, w);
    Real256 sum = 0;
    for (const auto& sg : k.sigma[2]) sum += log(std::max(abs(p1 - sg), d1 / 4));
    const Real256 expect = sum / 2 / 5;
    CHECK(abs(eval_v(k, 2, z, w) - expect) < Real256(1e-60));
  }
  // At a point where P_1 hits a grid point the clipped value log(delta_1 / m_2) appears.
  const Complex<Real256> z = c256(0.4), w = c256(sqrt(Real256("0.05")).convert_to<double>());
  const Complex<Real256> p1 = eval_P(k, Signature{{0}}, z, w);
  CHECK(abs(p1) < d1 / 4);
}

TEST_CASE("exact and sampled u") {
  const auto t = TowerModel(build_schedule({kTenth}, {4, 4, 4}, 3), AnchorSequence(2), 3);
  REQUIRE(t.signature_count(3) == 125);
  const auto k = make_constants<Real256>(t);
  const Complex<Real256> z = c256(0.2, 0.1), w = c256(0.05, -0.1);
  Real256 mean = 0;
  for (std::uint64_t i = 0; i < 125; ++i) {
    const auto p = eval_P(k, t.signature(3, i), z, w);
    mean += log(std::max(abs(p), k.delta[3])) / 8;
  }
  mean /= 125;
  const Real256 exact = eval_u(k, 3, z, w);
  CHECK(abs(exact - mean) < Real256(1e-60));
  // Average of many independent sampled estimates stays within a few standard errors.
  double acc = 0, se = 0;
  const int reps = 40;
  for (int r = 0; r < reps; ++r) {
    const auto s = eval_u_sampled(k, 3, z, w, 50, 1000 + r);
    acc += s.mean;
    se += s.std_error;
  }
  acc /= reps;
  se /= reps * std::sqrt(double(reps));
  CHECK(std::abs(acc - exact.convert_to<double>()) < 5 * se + 1e-12);
}

TEST_CASE("membership depth") {
  const auto t = make_tower({1}, 2);
  const auto ctx = t.context(2);
  CHECK(membership_depth(t, {0.4, 0}, {0.9, 0}, 2, ctx).depth == -1);
  const auto m = membership_depth(t, {0.4, 0}, {0.223607, 0}, 2, ctx);
  CHECK(m.depth >= 1);
  CHECK(m.certified);
  // A box straddling the boundary of X_1 = {|w^2 - 0.05| < 1/160}.
  const auto k = make_constants<Real128>(t);
  const Real128 edge = sqrt(Real128("0.05") + Real128(1) / 160);
  const auto box = IntervalComplex<Real128>::around({edge, Real128(0)}, Real128("1e-6"));
  const auto r = membership_depth(k, IntervalComplex<Real128>(Complex<Real128>(Real128("0.4"), Real128(0))), box, 2);
  CHECK(r.depth == 0);
  CHECK_FALSE(r.certified);
}

TEST_CASE("nested membership on random points") {
  const auto t = make_tower({1, 4}, 2);
  const auto k = make_constants<Real128>(t);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(-0.3, 0.3);
  int deep = 0;
  for (int i = 0; i < 3000; ++i) {
    const double x = (i % 2 ? 1 : -1) * std::sqrt(0.05) + U(rng) / 20, y = U(rng) / 20;
    const IntervalComplex<Real128> z(Complex<Real128>(Real128("0.4"), Real128(0)));
    const IntervalComplex<Real128> w{Complex<Real128>(Real128(x), Real128(y))};
    const auto m2 = membership_depth(k, z, w, 2);
    const auto m1 = membership_depth(k, z, w, 1);
    if (m2.depth >= 1) CHECK(m1.depth >= 1);
    deep += m2.depth == 2;
  }
  CHECK(deep > 0);
}

TEST_CASE("budget and description") {
  CHECK_THROWS_AS(TowerModel(build_schedule({kTenth}, {1, 4, 4}, 3), AnchorSequence(), 3, 128), BudgetExceeded);
  const auto t = make_tower({1, 4, 4}, 3);
  CHECK_THROWS_AS(make_constants<Real128>(t), BudgetExceeded);
  CHECK_NOTHROW(make_constants<Real256>(t));
  TowerDescription d{"default.schedule", 7, true, 3, 512};
  const auto back = read_tower_description(write_tower_description(d));
  CHECK(back.schedule_ref == "default.schedule");
  CHECK(back.seed == 7);
  CHECK(back.depth == 3);
  CHECK(back.max_bits == 512);
  CHECK(t.hash() == make_tower({1, 4, 4}, 3).hash());
  CHECK(t.hash() != make_tower({1, 4, 4}, 3, 1).hash());
  CHECK_THROWS_AS(read_tower_description("colour=blue\n"), InvalidArgument);
}
