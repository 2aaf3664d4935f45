#pragma once

// Adjustable-precision scalars and rectangular interval arithmetic.
//
// Every evaluation routine in the library is a template on the real scalar
// `T`. The runtime precision budget (`PrecisionContext`) selects one of a
// fixed set of MPFR-backed tiers through `with_precision`. `double` works
// with every template as well and is used by tests as a fast cross-check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>

#include <boost/multiprecision/mpfr.hpp>

#include "wermer/errors.hpp"

namespace wermer {

namespace mp = boost::multiprecision;

template <unsigned Digits10>
using MpReal = mp::number<mp::mpfr_float_backend<Digits10>, mp::et_off>;

using Real128 = MpReal<39>;
using Real256 = MpReal<78>;
using Real512 = MpReal<155>;
using Real1024 = MpReal<309>;

/// Scalar used for schedule logarithms.
using LogReal = Real256;

template <class T>
using Complex = std::complex<T>;

template <class T>
inline constexpr int bits_of = std::numeric_limits<T>::digits;

inline constexpr int kMaxTierBits = std::numeric_limits<Real1024>::digits;

struct ParameterSchedule;

/// Requested significand width plus the hard budget it must respect.
class PrecisionContext {
 public:
  explicit PrecisionContext(int bits = 256, int max_bits = 1024) : bits_(bits), max_bits_(max_bits) {
    if (bits < 64) throw InvalidArgument("precision below 64 bits: " + std::to_string(bits));
    if (bits > max_bits)
      throw BudgetExceeded("precision " + std::to_string(bits) + " exceeds budget " + std::to_string(max_bits));
  }
  int bits() const noexcept { return bits_; }
  int max_bits() const noexcept { return max_bits_; }

  PrecisionContext with_bits(int bits) const { return PrecisionContext(bits, max_bits_); }

 private:
  int bits_;
  int max_bits_;
};

/// max(64, ceil(2 log2(1/delta_n)) + 64); throws BudgetExceeded past `max_bits`.
int precision_for_depth(const ParameterSchedule& schedule, int n, int max_bits);

/// Calls `f.template operator()<T>()` with the smallest tier holding `ctx.bits()`.
template <class F>
decltype(auto) with_precision(const PrecisionContext& ctx, F&& f) {
  const int b = ctx.bits();
  if (b <= bits_of<Real128>) return f.template operator()<Real128>();
  if (b <= bits_of<Real256>) return f.template operator()<Real256>();
  if (b <= bits_of<Real512>) return f.template operator()<Real512>();
  if (b <= bits_of<Real1024>) return f.template operator()<Real1024>();
  throw BudgetExceeded("no precision tier holds " + std::to_string(b) + " bits");
}

// ---------------------------------------------------------------------------
// Directed one-ulp steps.

inline double next_down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
inline double next_up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }
inline long double next_down(long double x) {
  return std::nextafter(x, -std::numeric_limits<long double>::infinity());
}
inline long double next_up(long double x) { return std::nextafter(x, std::numeric_limits<long double>::infinity()); }

template <unsigned D>
MpReal<D> next_down(MpReal<D> x) {
  mpfr_nextbelow(x.backend().data());
  return x;
}
template <unsigned D>
MpReal<D> next_up(MpReal<D> x) {
  mpfr_nextabove(x.backend().data());
  return x;
}

template <class T>
T steps_down(T x, int k) {
  for (int i = 0; i < k; ++i) x = next_down(x);
  return x;
}
template <class T>
T steps_up(T x, int k) {
  for (int i = 0; i < k; ++i) x = next_up(x);
  return x;
}

template <class T>
double to_double(const T& x) {
  return static_cast<double>(x);
}

// ---------------------------------------------------------------------------
// Real intervals. Each basic operation rounds to nearest and then steps one
// ulp outward, which encloses the exact result.

template <class T>
struct Interval {
  T lo{};
  T hi{};

  Interval() = default;
  explicit Interval(const T& x) : lo(x), hi(x) {}
  Interval(const T& l, const T& h) : lo(l), hi(h) {
    if (!(l <= h)) throw InvalidArgument("interval bounds out of order");
  }

  bool contains(const T& x) const { return lo <= x && x <= hi; }
  bool contains_zero() const { return lo <= 0 && hi >= 0; }
  T width() const { return next_up(T(hi - lo)); }
  T mid() const { return (lo + hi) / 2; }
};

template <class T>
Interval<T> make_interval_unchecked(T lo, T hi) {
  Interval<T> r;
  r.lo = std::move(lo);
  r.hi = std::move(hi);
  return r;
}

template <class T>
Interval<T> operator+(const Interval<T>& a, const Interval<T>& b) {
  return make_interval_unchecked<T>(next_down(T(a.lo + b.lo)), next_up(T(a.hi + b.hi)));
}
template <class T>
Interval<T> operator-(const Interval<T>& a, const Interval<T>& b) {
  return make_interval_unchecked<T>(next_down(T(a.lo - b.hi)), next_up(T(a.hi - b.lo)));
}
template <class T>
Interval<T> operator-(const Interval<T>& a) {
  return make_interval_unchecked<T>(-a.hi, -a.lo);
}
template <class T>
Interval<T> operator*(const Interval<T>& a, const Interval<T>& b) {
  const T p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  const auto [mn, mx] = std::minmax_element(std::begin(p), std::end(p));
  return make_interval_unchecked<T>(next_down(*mn), next_up(*mx));
}
template <class T>
Interval<T> operator*(const Interval<T>& a, const T& s) {
  return a * Interval<T>(s);
}
template <class T>
Interval<T> sqr(const Interval<T>& a) {
  if (a.lo >= 0) return make_interval_unchecked<T>(next_down(T(a.lo * a.lo)), next_up(T(a.hi * a.hi)));
  if (a.hi <= 0) return make_interval_unchecked<T>(next_down(T(a.hi * a.hi)), next_up(T(a.lo * a.lo)));
  const T m = std::max(T(a.lo * a.lo), T(a.hi * a.hi));
  return make_interval_unchecked<T>(T(0), next_up(m));
}
/// Exact scaling by two.
template <class T>
Interval<T> twice(const Interval<T>& a) {
  return make_interval_unchecked<T>(T(a.lo * 2), T(a.hi * 2));
}
template <class T>
Interval<T> hull(const Interval<T>& a, const Interval<T>& b) {
  return make_interval_unchecked<T>(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

// ---------------------------------------------------------------------------
// Rectangular complex intervals.

template <class T>
struct IntervalComplex {
  Interval<T> re;
  Interval<T> im;

  IntervalComplex() = default;
  IntervalComplex(Interval<T> r, Interval<T> i) : re(std::move(r)), im(std::move(i)) {}
  explicit IntervalComplex(const Complex<T>& z) : re(z.real()), im(z.imag()) {}

  /// Square of half-width `radius` around `center` (outward rounded).
  static IntervalComplex around(const Complex<T>& center, const T& radius) {
    return IntervalComplex(make_interval_unchecked<T>(next_down(T(center.real() - radius)),
                                                      next_up(T(center.real() + radius))),
                           make_interval_unchecked<T>(next_down(T(center.imag() - radius)),
                                                      next_up(T(center.imag() + radius))));
  }

  const T& re_lo() const { return re.lo; }
  const T& re_hi() const { return re.hi; }
  const T& im_lo() const { return im.lo; }
  const T& im_hi() const { return im.hi; }

  Complex<T> mid() const { return {re.mid(), im.mid()}; }
  bool contains(const Complex<T>& z) const { return re.contains(z.real()) && im.contains(z.imag()); }
};

template <class T>
IntervalComplex<T> operator+(const IntervalComplex<T>& a, const IntervalComplex<T>& b) {
  return {a.re + b.re, a.im + b.im};
}
template <class T>
IntervalComplex<T> operator-(const IntervalComplex<T>& a, const IntervalComplex<T>& b) {
  return {a.re - b.re, a.im - b.im};
}
template <class T>
IntervalComplex<T> operator-(const IntervalComplex<T>& a) {
  return {-a.re, -a.im};
}
template <class T>
IntervalComplex<T> operator*(const IntervalComplex<T>& a, const IntervalComplex<T>& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class T>
IntervalComplex<T> operator*(const IntervalComplex<T>& a, const Complex<T>& b) {
  return a * IntervalComplex<T>(b);
}
template <class T>
IntervalComplex<T> operator*(const Complex<T>& b, const IntervalComplex<T>& a) {
  return a * IntervalComplex<T>(b);
}
template <class T>
IntervalComplex<T> operator+(const IntervalComplex<T>& a, const Complex<T>& b) {
  return a + IntervalComplex<T>(b);
}
template <class T>
IntervalComplex<T> operator-(const IntervalComplex<T>& a, const Complex<T>& b) {
  return a - IntervalComplex<T>(b);
}
template <class T>
IntervalComplex<T> sqr(const IntervalComplex<T>& a) {
  return {sqr(a.re) - sqr(a.im), twice(a.re * a.im)};
}
/// Multiplication by i.
template <class T>
IntervalComplex<T> times_i(const IntervalComplex<T>& a) {
  return {-a.im, a.re};
}

/// Enclosure of |z|^2 over the rectangle: lo bounds inf|z|^2, hi bounds sup|z|^2.
template <class T>
Interval<T> norm2(const IntervalComplex<T>& a) {
  return sqr(a.re) + sqr(a.im);
}
template <class T>
bool may_contain_zero(const IntervalComplex<T>& a) {
  return a.re.contains_zero() && a.im.contains_zero();
}
/// `inner` lies strictly inside `outer`.
template <class T>
bool strictly_inside(const IntervalComplex<T>& inner, const IntervalComplex<T>& outer) {
  return outer.re.lo < inner.re.lo && inner.re.hi < outer.re.hi && outer.im.lo < inner.im.lo &&
         inner.im.hi < outer.im.hi;
}
template <class T>
bool disjoint(const IntervalComplex<T>& a, const IntervalComplex<T>& b) {
  return a.re.hi < b.re.lo || b.re.hi < a.re.lo || a.im.hi < b.im.lo || b.im.hi < a.im.lo;
}

/// Upper bound of sup|z| over the rectangle.
template <class T>
T abs_upper(const IntervalComplex<T>& a) {
  using std::sqrt;
  return steps_up(T(sqrt(norm2(a).hi)), 2);
}
/// Lower bound of inf|z| over the rectangle.
template <class T>
T abs_lower(const IntervalComplex<T>& a) {
  using std::sqrt;
  const T m = norm2(a).lo;
  if (m <= 0) return T(0);
  return steps_down(T(sqrt(m)), 2);
}

enum class DiskClass { Inside, Outside, Unknown };

inline const char* to_string(DiskClass c) {
  switch (c) {
    case DiskClass::Inside: return "Inside";
    case DiskClass::Outside: return "Outside";
    default: return "Unknown";
  }
}

/// Inside iff sup|value| < radius is certified, Outside iff inf|value| > radius.
template <class T>
DiskClass classify_disk(const IntervalComplex<T>& value, const T& radius) {
  if (!(radius > 0)) throw InvalidArgument("classify_disk: radius must be positive");
  const Interval<T> r2 = sqr(Interval<T>(radius));
  const Interval<T> m2 = norm2(value);
  if (m2.hi < r2.lo) return DiskClass::Inside;
  if (m2.lo > r2.hi) return DiskClass::Outside;
  return DiskClass::Unknown;
}

namespace detail {

// Principal square root of a point, each component within a few ulps.
template <class T>
std::pair<T, T> principal_sqrt_parts(const T& x, const T& y) {
  using std::abs;
  using std::sqrt;
  const T r = sqrt(T(x * x + y * y));
  if (x >= 0) {
    const T re = sqrt(T((r + x) / 2));
    const T im = re > 0 ? T(y / (2 * re)) : T(0);
    return {re, im};
  }
  const T t = sqrt(T((r - x) / 2));
  const T re = abs(y) / (2 * t);
  return {re, y < 0 ? T(-t) : t};
}

// Enclosure of the principal root over a rectangle that does not meet the
// closed negative real axis. Extremes of Re/Im sit at corners, or at the
// real-axis crossings of the vertical edges.
template <class T>
IntervalComplex<T> principal_sqrt_enclosure(const IntervalComplex<T>& a) {
  constexpr int kGuard = 16;
  T pts[6][2] = {{a.re.lo, a.im.lo}, {a.re.lo, a.im.hi}, {a.re.hi, a.im.lo}, {a.re.hi, a.im.hi},
                 {a.re.lo, T(0)},    {a.re.hi, T(0)}};
  const int count = a.im.contains_zero() ? 6 : 4;
  T re_lo{}, re_hi{}, im_lo{}, im_hi{};
  for (int i = 0; i < count; ++i) {
    auto [re, im] = principal_sqrt_parts(pts[i][0], pts[i][1]);
    if (i == 0) {
      re_lo = re_hi = re;
      im_lo = im_hi = im;
    } else {
      re_lo = std::min(re_lo, re);
      re_hi = std::max(re_hi, re);
      im_lo = std::min(im_lo, im);
      im_hi = std::max(im_hi, im);
    }
  }
  return {make_interval_unchecked<T>(steps_down(re_lo, kGuard), steps_up(re_hi, kGuard)),
          make_interval_unchecked<T>(steps_down(im_lo, kGuard), steps_up(im_hi, kGuard))};
}

}  // namespace detail

/// Two disjoint enclosures of the continuous square-root branches over `x`;
/// the second is the negation of the first.
template <class T>
std::pair<IntervalComplex<T>, IntervalComplex<T>> interval_sqrt_branches(const IntervalComplex<T>& x) {
  if (!(norm2(x).lo > 0)) throw ContainsZero("interval_sqrt_branches: rectangle may contain 0");
  // A rectangle missing 0 meets at most one of the two real half-axes.
  const bool rotate = x.re.lo < 0 && x.im.contains_zero();
  IntervalComplex<T> b;
  if (rotate) {
    b = times_i(detail::principal_sqrt_enclosure(-x));
    if (!(b.im.lo > 0)) throw ContainsZero("interval_sqrt_branches: branches not separated");
  } else {
    b = detail::principal_sqrt_enclosure(x);
    if (!(b.re.lo > 0)) throw ContainsZero("interval_sqrt_branches: branches not separated");
  }
  return {b, -b};
}

}  // namespace wermer
