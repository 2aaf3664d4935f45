#pragma once

// Radius and multiplicity sequences and the scale constants derived from them.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wermer/numeric.hpp"

namespace wermer {

class GaugeFunction;

/// r_n, either a rational p/q or exp(-p/q).
struct RadiusFactor {
  enum class Form { Rational, ExpNeg };
  Form form = Form::Rational;
  std::int64_t num = 1;
  std::int64_t den = 10;

  static RadiusFactor rational(std::int64_t p, std::int64_t q);
  static RadiusFactor exp_neg(std::int64_t p, std::int64_t q = 1);
  /// "1/10", "0.1" (decimal), "exp(-4)" or "exp(-7/2)".
  static RadiusFactor parse(std::string_view text);

  LogReal log() const;
  double value_double() const;
  std::string str() const;

  template <class T>
  T value() const {
    if (form == Form::Rational) return T(num) / T(den);
    using std::exp;
    return exp(-(T(num) / T(den)));
  }

  bool operator==(const RadiusFactor&) const = default;
};

/// m_n: an exact uint64, or 2^e for exponents past 63.
class Multiplicity {
 public:
  Multiplicity(std::uint64_t value = 1);  // NOLINT: integers convert naturally
  static Multiplicity power_of_two(std::uint64_t exponent);
  /// "7" or "2^4096".
  static Multiplicity parse(std::string_view text);

  bool is_small() const { return small_ != 0; }
  /// Throws RangeError when the value does not fit in 64 bits.
  std::uint64_t value() const;
  LogReal log() const;
  double log2() const;
  std::string str() const;

  template <class T>
  T as() const {
    if (is_small()) return T(small_);
    using std::ldexp;
    return ldexp(T(1), static_cast<int>(exp2_));
  }

  bool operator==(const Multiplicity&) const = default;

 private:
  std::uint64_t small_ = 1;  // 0 when only exp2_ is meaningful
  std::uint64_t exp2_ = 0;
};

/// a*a <= b, exactly.
bool square_at_most(const Multiplicity& a, const Multiplicity& b);

struct ScheduleOptions {
  /// Extra additive offsets on log(delta_n), applied after the recurrence
  /// step that produces delta_n. Used to build deliberately broken towers.
  std::map<int, double> delta_log_offset;
  /// Run check_estimates and throw InvalidSchedule on a violation.
  bool verify = true;
};

/// Scale data up to a fixed depth. Index n of the log vectors refers to
/// step n; r(n), m(n) are 1-based.
struct ParameterSchedule {
  int depth = 0;
  std::vector<RadiusFactor> r_seq;
  std::vector<Multiplicity> m_seq;
  std::map<int, double> delta_log_offset;
  std::vector<LogReal> log_delta;  // 0..depth
  std::vector<LogReal> log_eps;    // 0..depth, entry 0 is unused (0)
  std::vector<LogReal> log_R;      // prod_{k<=n} r_k
  std::vector<LogReal> log_M;      // prod_{k<=n} m_k
  std::vector<LogReal> log_D;      // prod_{k<n} delta_k / m_{k+1}

  const RadiusFactor& r(int n) const { return r_seq.at(static_cast<std::size_t>(n - 1)); }
  const Multiplicity& m(int n) const { return m_seq.at(static_cast<std::size_t>(n - 1)); }
  double delta_offset(int n) const;

  /// delta_n, eps_n at working precision, via the recurrence in T.
  template <class T>
  std::vector<T> deltas() const;
  template <class T>
  std::vector<T> epsilons() const;
};

/// Sequences of length 1 are repeated; longer ones must cover `depth`.
ParameterSchedule build_schedule(const std::vector<RadiusFactor>& r_seq,
                                 const std::vector<Multiplicity>& m_seq, int depth,
                                 const ScheduleOptions& options = {});

struct EstimateViolation {
  int n = 0;
  std::string which;  // "est1" or "est2"
  double margin = 0;  // log-space margin, negative when violated
};

/// First violated step of delta_{n+1} + eps_{n+1} < delta_n^2/m_{n+1}^2
/// (est1) or delta_n < eps_n r_n (est2).
std::optional<EstimateViolation> check_estimates(const ParameterSchedule& s);

struct ScheduleReport {
  std::vector<double> tail_partial;  // partial sums of |log r_k| / 2^k, index n = 0..depth
  bool tail_converges = false;
  double tail_bound = 0;  // bound on the full series
  bool super_exponential_m = false;
  int super_exponential_from = -1;  // first n0 with m_n >= 2, m_{n+1} >= m_n^2 for n >= n0
  bool scales_separate = false;
  int first_overlap = -1;  // first n with overlapping scale brackets
};

ScheduleReport validate_schedule(const ParameterSchedule& s);

/// (1/2^n) log delta_n + sum_{k<=n} |log r_k| / 2^k; needs m == 1 throughout.
double capacity_drift(const ParameterSchedule& s, int n);

/// Smallest multiplicities m_n = 2^(2^k_n), k_n strictly increasing, with
/// theta(A^n R_n / M_n) >= (C A)^n / R_n^2 for n = 1..depth.
std::vector<Multiplicity> choose_m(const GaugeFunction& theta, double A, double C,
                                   const std::vector<RadiusFactor>& r_seq, int depth);

/// Plain text: header comments then one line per step with
/// n, r_n, m_n, log10 delta_n, log10 eps_n.
std::string write_schedule(const ParameterSchedule& s);
ParameterSchedule read_schedule(std::string_view text);

// ---------------------------------------------------------------------------

template <class T>
std::vector<T> ParameterSchedule::deltas() const {
  using std::exp;
  std::vector<T> d(static_cast<std::size_t>(depth) + 1);
  d[0] = T(1) / 2;
  if (double off = delta_offset(0); off != 0) d[0] *= exp(T(off));
  for (int n = 0; n < depth; ++n) {
    const T mm = m(n + 1).template as<T>();
    T next = d[n] * d[n] * r(n + 1).template value<T>() / (4 * mm * mm);
    if (double off = delta_offset(n + 1); off != 0) next *= exp(T(off));
    d[n + 1] = next;
  }
  return d;
}

template <class T>
std::vector<T> ParameterSchedule::epsilons() const {
  const std::vector<T> d = deltas<T>();
  std::vector<T> e(static_cast<std::size_t>(depth) + 1, T(0));
  for (int n = 0; n < depth; ++n) {
    const T mm = m(n + 1).template as<T>();
    e[n + 1] = d[n] * d[n] / (2 * mm * mm);
  }
  return e;
}

}  // namespace wermer
