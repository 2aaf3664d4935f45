#include "wermer/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wermer/errors.hpp"

namespace wermer {

namespace {

constexpr double kE = 2.718281828459045;

double loglog(double L) { return std::log(std::log(L)); }

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// log of int_a^b exp(phi(t)) dt over adaptively sized pieces. With b = inf the
// walk stops once pieces fall below exp(-46) of the running total.
template <class Phi>
double log_integral(const Phi& phi, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  double total = -std::numeric_limits<double>::infinity();
  double t = a;
  const bool open = std::isinf(b);
  int pieces = 0;
  while (t < b) {
    const double slope = std::abs(phi(t + 1) - phi(t));
    double len = std::max(1.0, std::min(0.5 / std::max(slope, 1e-300), 0.25 * (std::abs(t) + 1)));
    if (!open) len = std::min(len, b - t);
    const double c = phi(t + len / 2);
    const double v =
        gauss_kronrod<double, 31>::integrate([&](double s) { return std::exp(phi(s) - c); }, t, t + len, 12, 1e-13);
    const double piece = c + std::log(v);
    total = log_add(total, piece);
    t += len;
    if (open && piece < total - 46 && phi(t) < phi(t - len)) break;
    if (++pieces > 200000) throw DivergentGauge("gauge integral does not settle");
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------

GaugeFunction GaugeFunction::power_log(double coef, double power, double log_power) {
  if (!(coef > 0)) throw InvalidArgument("gauge coefficient must be positive");
  GaugeFunction g;
  g.factor_ = log_power == 0 ? Factor::None : Factor::LogPower;
  g.coef_ = coef;
  g.power_ = power;
  g.log_power_ = log_power;
  return g;
}

GaugeFunction GaugeFunction::power_loglog(double coef, double power) {
  if (!(coef > 0)) throw InvalidArgument("gauge coefficient must be positive");
  GaugeFunction g;
  g.factor_ = Factor::LogLog;
  g.coef_ = coef;
  g.power_ = power;
  return g;
}

GaugeFunction GaugeFunction::piecewise(double power, std::vector<Segment> segments) {
  if (segments.empty()) throw InvalidArgument("piecewise gauge needs a segment");
  for (std::size_t i = 1; i < segments.size(); ++i)
    if (!(segments[i].start > segments[i - 1].start)) throw InvalidArgument("segment starts must increase");
  for (const auto& s : segments)
    if (!s.plateau && !(s.start > 1)) throw InvalidArgument("log-log segments need start > 1");
  GaugeFunction g;
  g.factor_ = Factor::Piecewise;
  g.power_ = power;
  g.segments_ = std::move(segments);
  g.r0_ = std::exp(-std::max(0.0, g.segments_.front().start));
  return g;
}

GaugeFunction GaugeFunction::table(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 2) throw InvalidArgument("gauge table needs at least two samples");
  std::sort(samples.begin(), samples.end());
  GaugeFunction g;
  g.factor_ = Factor::Table;
  for (const auto& [r, v] : samples) {
    if (!(r > 0) || !(v > 0)) throw InvalidArgument("gauge table entries must be positive");
    g.samples_.emplace_back(std::log(r), std::log(v));
  }
  for (std::size_t i = 1; i < g.samples_.size(); ++i)
    if (!(g.samples_[i].first > g.samples_[i - 1].first)) throw InvalidArgument("duplicate radius in gauge table");
  g.r0_ = samples.back().first;
  return g;
}

double GaugeFunction::log_factor(double L) const {
  switch (factor_) {
    case Factor::None: return 0;
    case Factor::LogPower: return log_power_ * std::log(L);
    case Factor::LogLog: return std::log(std::log(std::max(kE, L)));
    case Factor::Piecewise: {
      auto it = std::upper_bound(segments_.begin(), segments_.end(), L,
                                 [](double x, const Segment& s) { return x < s.start; });
      if (it == segments_.begin()) return segments_.front().value;
      const Segment& s = *std::prev(it);
      return s.plateau ? s.value : s.value + loglog(L) - loglog(s.start);
    }
    case Factor::Table: break;
  }
  return 0;
}

double GaugeFunction::log_at(double log_r) const {
  if (factor_ == Factor::Table) {
    const auto& s = samples_;
    std::size_t i = 1;
    while (i + 1 < s.size() && s[i].first < log_r) ++i;
    const auto& [x0, y0] = s[i - 1];
    const auto& [x1, y1] = s[i];
    return y0 + (y1 - y0) * (log_r - x0) / (x1 - x0);
  }
  return std::log(coef_) + power_ * log_r + log_factor(-log_r);
}

double GaugeFunction::operator()(double r) const {
  if (!(r > 0)) throw InvalidArgument("gauge argument must be positive");
  return std::exp(log_at(std::log(r)));
}

GaugeFunction GaugeFunction::times_power(double extra) const {
  GaugeFunction g = *this;
  if (factor_ == Factor::Table) {
    for (auto& [lr, lv] : g.samples_) lv += extra * lr;
  } else {
    g.power_ += extra;
  }
  return g;
}

bool GaugeFunction::integrable_against_inverse_square() const {
  switch (factor_) {
    case Factor::None: return power_ > 1;
    case Factor::LogPower: return power_ > 1 || (power_ == 1 && log_power_ < -1);
    case Factor::LogLog:
    case Factor::Piecewise: return power_ > 1;
    case Factor::Table: {
      const auto& s = samples_;
      return (s[1].second - s[0].second) / (s[1].first - s[0].first) > 1;
    }
  }
  return false;
}

std::string GaugeFunction::describe() const {
  std::ostringstream os;
  switch (factor_) {
    case Factor::None: os << coef_ << "*r^" << power_; break;
    case Factor::LogPower: os << coef_ << "*r^" << power_ << "*|log r|^" << log_power_; break;
    case Factor::LogLog: os << coef_ << "*r^" << power_ << "*log(max(e,|log r|))"; break;
    case Factor::Piecewise: os << "r^" << power_ << "*piecewise(" << segments_.size() << " segments)"; break;
    case Factor::Table: os << "table(" << samples_.size() << " samples)"; break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

double modulus_over_r(const GaugeFunction& h, double L) {
  if (!h.integrable_against_inverse_square())
    throw DivergentGauge("int_0 h(s)/s^2 ds diverges for h = " + h.describe());
  // s = exp(-t): int_0^{2r} h/s^2 ds / r = int_{L - log 2}^inf h(e^-t) e^{t+L} dt,
  //              int_r^1 h/s^3 ds        = int_0^L h(e^-t) e^{2t} dt.
  const double t0 = L - std::log(2.0);
  const double near = log_integral([&](double t) { return h.log_at(-t) + t + L; }, t0, std::numeric_limits<double>::infinity());
  const double far = L > 0 ? log_integral([&](double t) { return h.log_at(-t) + 2 * t; }, 0.0, L)
                           : -std::numeric_limits<double>::infinity();
  return log_add(near, far);
}

double modulus_from_h(const GaugeFunction& h, double r) {
  if (!(r > 0 && r < 1)) throw InvalidArgument("modulus_from_h needs 0 < r < 1");
  if (!h.integrable_against_inverse_square())
    throw DivergentGauge("int_0 h(s)/s^2 ds diverges for h = " + h.describe());
  if (h.factor() == GaugeFunction::Factor::None) {
    const double a = h.power(), c = h.coef();
    const double near = c * std::pow(2 * r, a - 1) / (a - 1);
    const double far = a == 2 ? c * r * -std::log(r) : c * r * (1 - std::pow(r, a - 2)) / (a - 2);
    return near + far;
  }
  const double L = -std::log(r);
  return std::exp(modulus_over_r(h, L) - L);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> tame_grid() {
  std::vector<double> L;
  const int n = 240;
  const double lo = 2, hi = 1e4;
  for (int i = 0; i < n; ++i) L.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return L;
}

double log_theta0(const GaugeFunction& psi, double L) { return psi.log_at(-L) + L - std::log(L); }

}  // namespace

GaugeFunction tame_gauge(const GaugeFunction& psi) {
  const std::vector<double> L = tame_grid();
  const std::size_t n = L.size();
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = log_theta0(psi, L[i]);

  // Precondition: theta_0 grows by at least a factor 2 and is nondecreasing in L on the last quarter.
  bool grows = f.back() - f.front() >= std::log(2.0);
  for (std::size_t i = 3 * n / 4; i + 1 < n; ++i) grows = grows && f[i + 1] >= f[i] - 1e-12;
  if (!grows) throw GaugeTooWeak("psi(r)/(r|log r|) does not diverge on the sampled range");

  // theta_1: largest nondecreasing-in-L minorant on the grid.
  for (std::size_t i = n - 1; i-- > 0;) f[i] = std::min(f[i], f[i + 1]);

  // g = log theta_2: plateau until f doubles, then log log L growth until g meets f.
  std::size_t i1 = 0;
  while (i1 < n && !(f[i1] > 0)) ++i1;
  if (i1 == n) throw GaugeTooWeak("theta_0 stays below 1 on the sampled range");
  std::vector<GaugeFunction::Segment> segs;
  double v = f[i1];
  segs.push_back({L[i1], v, true});
  std::size_t i = i1;
  while (true) {
    while (i < n && f[i] < 2 * v) ++i;
    if (i == n) break;
    const double start = L[i];
    segs.push_back({start, v, false});
    ++i;
    while (i < n && v + loglog(L[i]) - loglog(start) < f[i]) ++i;
    if (i == n) break;
    // Leave the growth segment where it reaches f at the previous sample.
    v = f[i - 1];
    const double y = std::exp(std::exp(loglog(start) + (v - segs.back().value)));
    if (y > start) {
      segs.push_back({y, v, true});
    } else {
      segs.back() = {start, v, true};
    }
  }
  if (segs.back().plateau) segs.push_back({std::max(L.back(), segs.back().start * 2), segs.back().value, false});
  return GaugeFunction::piecewise(0, std::move(segs));
}

TameCheck check_tamed(const GaugeFunction& psi, const GaugeFunction& theta2) {
  TameCheck c;
  const GaugeFunction h = theta2.times_power(2);
  double prev = -std::numeric_limits<double>::infinity();
  double first = 0, last = 0;
  const std::vector<double> grid = tame_grid();
  const double L_start = -std::log(theta2.r0());
  bool started = false;
  for (std::size_t k = 0; k < grid.size(); k += 8) {
    const double L = grid[k];
    if (L < L_start) continue;
    const double lt2 = theta2.log_at(-L);
    c.max_theta_ratio = std::max(c.max_theta_ratio, std::exp(lt2 - log_theta0(psi, L)));
    if (lt2 < prev - 1e-12) c.decreasing = false;
    prev = lt2;
    if (!started) first = lt2;
    started = true;
    last = lt2;
    const double ratio = std::exp(modulus_over_r(h, L) - L - psi.log_at(-L));
    c.L.push_back(L);
    c.modulus_ratio.push_back(ratio);
    c.max_modulus_ratio = std::max(c.max_modulus_ratio, ratio);
  }
  c.diverging = last - first >= std::log(2.0) / 2;
  return c;
}

}  // namespace wermer
