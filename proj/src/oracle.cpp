#include "wermer/oracle.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <boost/multiprecision/eigen.hpp>

#include "wermer/gauge.hpp"

namespace wermer::oracle {

namespace {
using Cx = Complex<Real256>;
using Poly = std::vector<Cx>;

Poly mul(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, Cx(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

Poly sub(Poly a, const Poly& b) {
  if (a.size() < b.size()) a.resize(b.size(), Cx(0));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  return a;
}

Cx cx(Complex<double> z) { return {Real256(z.real()), Real256(z.imag())}; }
}  // namespace

ExactSchedule exact_schedule(const std::vector<std::pair<std::int64_t, std::int64_t>>& r,
                             const std::vector<std::uint64_t>& m, int depth) {
  ExactSchedule s;
  s.delta.push_back(Rational(1, 2));
  s.eps.push_back(Rational(0));
  for (int n = 0; n < depth; ++n) {
    const auto& [p, q] = r[std::min<std::size_t>(n, r.size() - 1)];
    const Rational mm(m[std::min<std::size_t>(n, m.size() - 1)]);
    const Rational d2 = s.delta.back() * s.delta.back();
    s.eps.push_back(d2 / (2 * mm * mm));
    s.delta.push_back(d2 * Rational(p, q) / (4 * mm * mm));
  }
  return s;
}

Real256 to_real(const Rational& q) {
  return Real256(mp::numerator(q).str()) / Real256(mp::denominator(q).str());
}

std::vector<std::pair<int, int>> lattice(std::uint64_t m) {
  std::vector<std::pair<int, int>> out;
  const long long lim = static_cast<long long>((m - 1) * (m - 1));
  const int J = static_cast<int>(m);
  for (int j = -J; j <= J; ++j)
    for (int k = -J; k <= J; ++k)
      if (9LL * (j * j + k * k) <= lim) out.emplace_back(j, k);
  return out;
}

std::vector<Cx> slice_polynomial(const ExactSchedule& sched, const std::vector<std::uint64_t>& m,
                                 const std::vector<std::size_t>& choice, const std::vector<Complex<double>>& anchors,
                                 Complex<double> z0, Complex<double> gamma, Cx alpha) {
  Poly P{Cx(0), Cx(1)};  // w'
  const Cx g = cx(gamma);
  for (std::size_t k = 0; k < choice.size(); ++k) {
    const int n = static_cast<int>(k) + 1;
    const std::uint64_t mk = m[std::min(k, m.size() - 1)];
    const auto [j, l] = lattice(mk).at(choice[k]);
    const Real256 step = 3 * to_real(sched.delta[k]) / Real256(mk);
    const Cx sigma(step * j, step * l);
    // A_n(z0 - g w', w') as a linear polynomial.
    Poly A{cx(z0) - cx(anchors[k]), -g};
    if (n % 2 == 0) A[1] += Cx(Real256(1) / 100);
    Poly d = sub(P, Poly{sigma});
    Poly next = mul(d, d);
    const Real256 e = to_real(sched.eps[k + 1]);
    for (auto& c : A) c *= e;
    P = sub(next, A);
  }
  P[0] -= alpha;
  return P;
}

std::vector<Cx> companion_roots(const std::vector<Cx>& coeffs) {
  const int deg = static_cast<int>(coeffs.size()) - 1;
  using Mat = Eigen::Matrix<Cx, Eigen::Dynamic, Eigen::Dynamic>;
  Mat C = Mat::Zero(deg, deg);
  const Cx lead = coeffs.back();
  for (int i = 1; i < deg; ++i) C(i, i - 1) = Cx(1);
  for (int i = 0; i < deg; ++i) C(i, deg - 1) = -coeffs[i] / lead;
  Eigen::ComplexEigenSolver<Mat> es(C, false);
  std::vector<Cx> roots(es.eigenvalues().data(), es.eigenvalues().data() + deg);
  // A few Newton steps on the original polynomial remove the eigensolver's backward error.
  std::vector<Cx> dcoef;
  for (int i = 1; i <= deg; ++i) dcoef.push_back(coeffs[i] * Real256(i));
  for (auto& z : roots)
    for (int it = 0; it < 8; ++it) z -= horner(coeffs, z) / horner(dcoef, z);
  return roots;
}

Cx horner(const std::vector<Cx>& coeffs, const Cx& w) {
  Cx acc(0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * w + *it;
  return acc;
}

bool recheck_gauge_condition(const GaugeFunction& theta, double A, double C, const std::vector<double>& log_r,
                             const std::vector<double>& log2_m) {
  Real256 lR = 0, lM = 0;
  const Real256 ln2 = log(Real256(2));
  for (std::size_t i = 0; i < log_r.size(); ++i) {
    const Real256 n = Real256(static_cast<double>(i + 1));
    lR += Real256(log_r[i]);
    lM += Real256(log2_m[i]) * ln2;
    const Real256 x = n * log(Real256(A)) + lR - lM;
    const Real256 lhs = Real256(theta.log_at(x.convert_to<double>()));
    const Real256 rhs = n * log(Real256(C) * Real256(A)) - 2 * lR;
    if (!(lhs >= rhs)) return false;
  }
  return true;
}

double drift_from_rationals(std::int64_t p, std::int64_t q, int n) {
  ExactSchedule s = exact_schedule({{p, q}}, {1}, n);
  const Real256 logd = log(to_real(s.delta[static_cast<std::size_t>(n)]));
  Real256 sum = 0;
  for (int k = 1; k <= n; ++k) sum += ldexp(abs(log(Real256(p) / Real256(q))), -k);
  return (ldexp(logd, -n) + sum).convert_to<double>();
}

double nu_mass_sampled(int k, Complex<double> z, double rad, int samples_per_circle) {
  const auto pts = lattice(static_cast<std::uint64_t>(k));
  const double step = 3.0 / k, rho = 1.0 / k;
  long long inside = 0;
  for (const auto& [j, l] : pts) {
    const Complex<double> c(step * j, step * l);
    for (int i = 0; i < samples_per_circle; ++i) {
      const double t = 2 * std::numbers::pi * (i + 0.5) / samples_per_circle;
      if (std::abs(c + rho * std::polar(1.0, t) - z) < rad) ++inside;
    }
  }
  return double(inside) / (double(samples_per_circle) * double(pts.size()));
}

}  // namespace wermer::oracle
