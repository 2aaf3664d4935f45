#pragma once

// The polynomial tower P_{n,s}: anchors, sigma grids, signatures, pointwise and
// interval evaluation, and the potentials u_n and v_{n+1}.

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "wermer/numeric.hpp"
#include "wermer/schedule.hpp"

namespace wermer {

inline constexpr std::uint64_t kEnumerationCap = 1000000;

struct GridPoint {
  int j = 0;
  int k = 0;
};

/// Pairs (j,k) with 9(j^2 + k^2) <= (m-1)^2, j outer then k, both ascending.
std::vector<GridPoint> lattice_grid(std::uint64_t m);

/// a_n in D(0,1/4): van der Corput radii (base 2 odd, base 3 even) under an
/// area-preserving map, Kronecker angles with seeded phases.
class AnchorSequence {
 public:
  explicit AnchorSequence(std::uint64_t seed = 0, bool origin_first = true);
  Complex<double> operator()(int n) const;
  std::uint64_t seed() const { return seed_; }
  bool origin_first() const { return origin_first_; }

 private:
  std::uint64_t seed_;
  bool origin_first_;
  double phase_[2];
};

struct Signature {
  std::vector<std::uint32_t> index;  // index[k] picks a point of Sigma_{k+1}
  int depth() const { return static_cast<int>(index.size()); }
  std::string str() const;
};

class TowerModel {
 public:
  /// Throws BudgetExceeded when depth needs more than max_bits, and
  /// EnumerationCapExceeded when a sigma grid is too large to list.
  TowerModel(ParameterSchedule schedule, AnchorSequence anchors, int depth, int max_bits = 1024);

  const ParameterSchedule& schedule() const { return schedule_; }
  const AnchorSequence& anchors() const { return anchors_; }
  int depth() const { return depth_; }
  int max_bits() const { return max_bits_; }
  /// precision_for_depth at this tower's budget.
  int bits_for(int n) const { return precision_for_depth(schedule_, n, max_bits_); }
  PrecisionContext context(int n) const { return PrecisionContext(std::max(64, bits_for(n)), max_bits_); }

  const std::vector<GridPoint>& grid(int n) const;
  /// prod_{k<=n} #Sigma_k, saturating at UINT64_MAX.
  std::uint64_t signature_count(int n) const;
  /// Mixed-radix decoding, step 1 most significant.
  Signature signature(int n, std::uint64_t index) const;
  std::uint64_t index_of(const Signature& s) const;

  /// Text record of schedule, seed and depth.
  std::string describe() const;
  std::uint64_t hash() const;

 private:
  ParameterSchedule schedule_;
  AnchorSequence anchors_;
  int depth_;
  int max_bits_;
  std::vector<std::vector<GridPoint>> grids_;  // 1-based
};

struct TowerDescription {
  std::string schedule_ref;
  std::uint64_t seed = 0;
  bool origin_first = true;
  int depth = 0;
  int max_bits = 1024;
};
std::string write_tower_description(const TowerDescription& d);
TowerDescription read_tower_description(std::string_view text);

// ---------------------------------------------------------------------------
// Constants at working precision, with enclosures of the exact values.

template <class T>
struct TowerConstants {
  int depth = 0;
  std::vector<T> delta;                             // 0..depth
  std::vector<T> eps;                               // 0..depth
  std::vector<Interval<T>> delta_iv, eps_iv;        // enclosures of the exact values
  std::vector<T> sub_clip;                          // delta_n / m_{n+1}, 0..depth-1
  std::vector<Interval<T>> sub_clip_iv;
  std::vector<Complex<T>> anchor;                   // 1..depth
  std::vector<std::vector<Complex<T>>> sigma;       // 1..depth
  std::vector<std::vector<IntervalComplex<T>>> sigma_iv;
  Interval<T> hundredth;
  const TowerModel* model = nullptr;
};

namespace detail {
template <class T>
Interval<T> widen(const T& x, int ulps) {
  return make_interval_unchecked<T>(steps_down(x, ulps), steps_up(x, ulps));
}
}  // namespace detail

/// With `enforce_precision` the scalar must carry bits_for(depth) bits.
template <class T>
TowerConstants<T> make_constants(const TowerModel& t, bool enforce_precision = true) {
  if (enforce_precision && bits_of<T> < t.bits_for(t.depth()))
    throw BudgetExceeded("scalar with " + std::to_string(bits_of<T>) + " bits below the " +
                         std::to_string(t.bits_for(t.depth())) + " needed at depth " + std::to_string(t.depth()));
  TowerConstants<T> k;
  k.model = &t;
  k.depth = t.depth();
  const ParameterSchedule& s = t.schedule();
  k.delta = s.deltas<T>();
  k.eps = s.epsilons<T>();
  k.delta.resize(static_cast<std::size_t>(k.depth) + 1);
  k.eps.resize(static_cast<std::size_t>(k.depth) + 1);
  // Relative error of the recurrence roughly doubles per step; the guard covers it.
  for (int n = 0; n <= k.depth; ++n) {
    const int guard = 16 + (8 << n);
    k.delta_iv.push_back(detail::widen(k.delta[n], guard));
    k.eps_iv.push_back(detail::widen(k.eps[n], guard));
  }
  k.anchor.assign(static_cast<std::size_t>(k.depth) + 1, Complex<T>());
  k.sigma.resize(static_cast<std::size_t>(k.depth) + 1);
  k.sigma_iv.resize(static_cast<std::size_t>(k.depth) + 1);
  for (int n = 1; n <= k.depth; ++n) {
    const Complex<double> a = t.anchors()(n);
    k.anchor[n] = Complex<T>(T(a.real()), T(a.imag()));
    const T mm = s.m(n).template as<T>();
    k.sub_clip.push_back(k.delta[n - 1] / mm);
    k.sub_clip_iv.push_back(detail::widen(k.sub_clip.back(), 24 + (8 << n)));
    const T step = 3 * k.delta[n - 1] / mm;
    const int guard = 24 + (8 << n);
    for (const GridPoint& g : t.grid(n)) {
      const Complex<T> sg(step * g.j, step * g.k);
      k.sigma[n].push_back(sg);
      k.sigma_iv[n].emplace_back(detail::widen(sg.real(), guard), detail::widen(sg.imag(), guard));
    }
  }
  k.hundredth = detail::widen(T(T(1) / 100), 1);
  return k;
}

// ---------------------------------------------------------------------------
// Evaluation.

template <class T>
Complex<T> anchor_term(const TowerConstants<T>& k, int n, const Complex<T>& z, const Complex<T>& w) {
  Complex<T> a = z - k.anchor[n];
  if (n % 2 == 0) a += w / T(100);
  return a;
}

template <class T>
IntervalComplex<T> anchor_term(const TowerConstants<T>& k, int n, const IntervalComplex<T>& z,
                               const IntervalComplex<T>& w) {
  IntervalComplex<T> a = z - k.anchor[n];
  if (n % 2 == 0) a = a + IntervalComplex<T>(w.re * k.hundredth, w.im * k.hundredth);
  return a;
}

template <class T>
T norm2(const Complex<T>& z) {
  return z.real() * z.real() + z.imag() * z.imag();
}

/// Recursion P_0 = w, P_{k+1} = (P_k - sigma)^2 - eps A_{k+1}.
template <class T>
Complex<T> eval_P(const TowerConstants<T>& k, const Signature& s, const Complex<T>& z, const Complex<T>& w) {
  Complex<T> p = w;
  for (int n = 1; n <= s.depth(); ++n) {
    const Complex<T> d = p - k.sigma[n][s.index[n - 1]];
    p = d * d - k.eps[n] * anchor_term(k, n, z, w);
  }
  return p;
}

template <class T>
IntervalComplex<T> eval_P(const TowerConstants<T>& k, const Signature& s, const IntervalComplex<T>& z,
                          const IntervalComplex<T>& w) {
  IntervalComplex<T> p = w;
  for (int n = 1; n <= s.depth(); ++n) {
    const IntervalComplex<T> d = p - k.sigma_iv[n][s.index[n - 1]];
    const IntervalComplex<T> a = anchor_term(k, n, z, w);
    p = sqr(d) - IntervalComplex<T>(a.re * k.eps_iv[n], a.im * k.eps_iv[n]);
  }
  return p;
}

/// P and dP/dw' along w' -> (z(w'), w') with dz/dw' = dz_dw. With dz_dw = 0
/// this is the partial w-derivative.
template <class T>
std::pair<Complex<T>, Complex<T>> eval_P_dP(const TowerConstants<T>& k, const Signature& s, const Complex<T>& z,
                                            const Complex<T>& w, const Complex<T>& dz_dw) {
  Complex<T> p = w, dp(T(1), T(0));
  for (int n = 1; n <= s.depth(); ++n) {
    const Complex<T> d = p - k.sigma[n][s.index[n - 1]];
    Complex<T> da = dz_dw;
    if (n % 2 == 0) da += Complex<T>(T(1) / 100, T(0));
    dp = T(2) * d * dp - k.eps[n] * da;
    p = d * d - k.eps[n] * anchor_term(k, n, z, w);
  }
  return {p, dp};
}

template <class T>
std::pair<IntervalComplex<T>, IntervalComplex<T>> eval_P_dP(const TowerConstants<T>& k, const Signature& s,
                                                            const IntervalComplex<T>& z, const IntervalComplex<T>& w,
                                                            const Complex<T>& dz_dw) {
  IntervalComplex<T> p = w;
  IntervalComplex<T> dp(Interval<T>(T(1)), Interval<T>(T(0)));
  const IntervalComplex<T> dz(dz_dw);
  for (int n = 1; n <= s.depth(); ++n) {
    const IntervalComplex<T> d = p - k.sigma_iv[n][s.index[n - 1]];
    IntervalComplex<T> da = dz;
    if (n % 2 == 0) da = da + IntervalComplex<T>(k.hundredth, Interval<T>(T(0)));
    const IntervalComplex<T> dd = d * dp;
    dp = IntervalComplex<T>(twice(dd.re), twice(dd.im)) -
         IntervalComplex<T>(da.re * k.eps_iv[n], da.im * k.eps_iv[n]);
    const IntervalComplex<T> a = anchor_term(k, n, z, w);
    p = sqr(d) - IntervalComplex<T>(a.re * k.eps_iv[n], a.im * k.eps_iv[n]);
  }
  return {p, dp};
}

template <class T>
Complex<T> eval_dP(const TowerConstants<T>& k, const Signature& s, const Complex<T>& z, const Complex<T>& w) {
  return eval_P_dP(k, s, z, w, Complex<T>()).second;
}

/// Calls f(signature_index, P_{n,s}(z,w)) for every s in S_n, in index order.
template <class T, class F>
void for_each_leaf(const TowerConstants<T>& k, int n, const Complex<T>& z, const Complex<T>& w, F&& f) {
  std::vector<Complex<T>> eA(static_cast<std::size_t>(n) + 1);
  for (int l = 1; l <= n; ++l) eA[l] = k.eps[l] * anchor_term(k, l, z, w);
  std::uint64_t idx = 0;
  auto rec = [&](auto&& self, int level, const Complex<T>& p) -> void {
    if (level == n) {
      f(idx++, p);
      return;
    }
    for (const Complex<T>& sg : k.sigma[level + 1]) {
      const Complex<T> d = p - sg;
      self(self, level + 1, Complex<T>(d * d - eA[level + 1]));
    }
  };
  rec(rec, 0, w);
}

inline void check_enumeration(const TowerModel& t, int n) {
  if (n < 0 || n > t.depth()) throw InvalidArgument("depth " + std::to_string(n) + " outside tower");
  if (t.signature_count(n) > kEnumerationCap)
    throw EnumerationCapExceeded("#S_" + std::to_string(n) + " = " + std::to_string(t.signature_count(n)) +
                                 " exceeds the enumeration cap");
}

/// log max(|p|, c) without a square root.
template <class T>
T log_max_abs(const Complex<T>& p, const T& c) {
  using std::log;
  const T m = norm2(p), c2 = c * c;
  return log(m > c2 ? m : c2) / 2;
}

/// u_n(z,w), exact enumeration.
template <class T>
T eval_u(const TowerConstants<T>& k, int n, const Complex<T>& z, const Complex<T>& w) {
  check_enumeration(*k.model, n);
  T sum(0);
  for_each_leaf(k, n, z, w, [&](std::uint64_t, const Complex<T>& p) { sum += log_max_abs(p, k.delta[n]); });
  using std::ldexp;
  return ldexp(sum, -n) / T(k.model->signature_count(n));
}

struct SampledValue {
  double mean = 0;
  double std_error = 0;
  std::uint64_t samples = 0;
};

/// u_n(z,w) by uniform signature sampling.
template <class T>
SampledValue eval_u_sampled(const TowerConstants<T>& k, int n, const Complex<T>& z, const Complex<T>& w,
                            std::uint64_t samples, std::uint64_t seed) {
  if (samples < 2) throw InvalidArgument("sampling needs at least two samples");
  std::mt19937_64 rng(seed);
  const std::uint64_t count = k.model->signature_count(n);
  std::uniform_int_distribution<std::uint64_t> pick(0, count - 1);
  double sum = 0, sum2 = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Signature s = k.model->signature(n, pick(rng));
    const double v = std::ldexp(to_double(log_max_abs(eval_P(k, s, z, w), k.delta[n])), -n);
    sum += v;
    sum2 += v * v;
  }
  SampledValue out;
  out.samples = samples;
  out.mean = sum / double(samples);
  const double var = std::max(0.0, (sum2 - sum * out.mean) / double(samples - 1));
  out.std_error = std::sqrt(var / double(samples));
  return out;
}

/// v_{n1}(z,w) with n1 = n+1 >= 1: average of log max(|P_{n,s} - sigma|, delta_n/m_{n+1}).
template <class T>
T eval_v(const TowerConstants<T>& k, int n1, const Complex<T>& z, const Complex<T>& w) {
  if (n1 < 1) throw InvalidArgument("v_n needs n >= 1");
  const int n = n1 - 1;
  check_enumeration(*k.model, n1);
  T sum(0);
  const T& clip = k.sub_clip[n];
  for_each_leaf(k, n, z, w, [&](std::uint64_t, const Complex<T>& p) {
    for (const Complex<T>& sg : k.sigma[n1]) sum += log_max_abs(Complex<T>(p - sg), clip);
  });
  using std::ldexp;
  return ldexp(sum, -n) / T(k.model->signature_count(n1));
}

/// Inside iff sup|v| < lower end of `radius`, Outside iff inf|v| > upper end.
template <class T>
DiskClass classify_disk(const IntervalComplex<T>& value, const Interval<T>& radius) {
  const Interval<T> m2 = norm2(value);
  if (m2.hi < sqr(Interval<T>(radius.lo)).lo) return DiskClass::Inside;
  if (m2.lo > sqr(Interval<T>(radius.hi)).hi) return DiskClass::Outside;
  return DiskClass::Unknown;
}

struct Membership {
  int depth = -1;  // largest n with certified membership in X_n, -1 outside X_0
  bool certified = true;
};

/// Breadth-first descent over signatures whose sublevel set may contain the box.
template <class T>
Membership membership_depth(const TowerConstants<T>& k, const IntervalComplex<T>& z, const IntervalComplex<T>& w,
                            int n_max) {
  Membership out;
  struct Node {
    Signature sig;
    IntervalComplex<T> p;
  };
  std::vector<Node> frontier{{Signature{}, w}};
  const int top = std::min(n_max, k.depth);
  for (int n = 0; n <= top; ++n) {
    if (n > 0) {
      std::vector<Node> next;
      const IntervalComplex<T> a = anchor_term(k, n, z, w);
      const IntervalComplex<T> ea(a.re * k.eps_iv[n], a.im * k.eps_iv[n]);
      for (const Node& nd : frontier) {
        for (std::uint32_t i = 0; i < k.sigma_iv[n].size(); ++i) {
          Node c{nd.sig, sqr(nd.p - k.sigma_iv[n][i]) - ea};
          c.sig.index.push_back(i);
          next.push_back(std::move(c));
        }
      }
      frontier = std::move(next);
    }
    bool inside = false, unknown = false;
    std::vector<Node> keep;
    for (Node& nd : frontier) {
      const DiskClass c = classify_disk(nd.p, k.delta_iv[n]);
      if (c == DiskClass::Inside) inside = true;
      if (c == DiskClass::Unknown) unknown = true;
      if (c != DiskClass::Outside) keep.push_back(std::move(nd));
    }
    if (!inside) {
      out.certified = !unknown;
      return out;
    }
    out.depth = n;
    frontier = std::move(keep);
  }
  return out;
}

// Convenience entry points at double inputs, dispatched through a precision context.

Complex<double> eval_P(const TowerModel& t, const Signature& s, Complex<double> z, Complex<double> w,
                       const PrecisionContext& ctx);
Complex<double> eval_dP(const TowerModel& t, const Signature& s, Complex<double> z, Complex<double> w,
                        const PrecisionContext& ctx);
double eval_u(const TowerModel& t, int n, Complex<double> z, Complex<double> w, const PrecisionContext& ctx);
double eval_v(const TowerModel& t, int n1, Complex<double> z, Complex<double> w, const PrecisionContext& ctx);
Membership membership_depth(const TowerModel& t, Complex<double> z, Complex<double> w, int n_max,
                            const PrecisionContext& ctx);
/// Sigma_n as doubles (n >= 1).
std::vector<Complex<double>> sigma_grid(const TowerModel& t, int n);

}  // namespace wermer
