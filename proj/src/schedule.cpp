#include "wermer/schedule.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "wermer/gauge.hpp"

namespace wermer {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::int64_t parse_int(std::string_view s, const char* what) {
  s = trim(s);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw InvalidArgument(std::string("cannot parse ") + what + ": '" + std::string(s) + "'");
  return v;
}

// "p/q" or "p" as a reduced fraction.
std::pair<std::int64_t, std::int64_t> parse_fraction(std::string_view s) {
  s = trim(s);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::int64_t p = parse_int(s.substr(0, slash), "numerator");
    std::int64_t q = parse_int(s.substr(slash + 1), "denominator");
    if (q <= 0) throw InvalidArgument("fraction denominator must be positive");
    const std::int64_t g = std::gcd(p, q);
    return {p / g, q / g};
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string digits(s.substr(0, dot));
    std::string frac(s.substr(dot + 1));
    if (frac.size() > 17) throw InvalidArgument("too many decimals in '" + std::string(s) + "'");
    std::int64_t q = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) q *= 10;
    std::int64_t p = parse_int(digits + frac, "decimal");
    const std::int64_t g = std::gcd(p, q);
    return {p / g, q / g};
  }
  return {parse_int(s, "integer"), 1};
}

LogReal log_sum(const LogReal& a, const LogReal& b) {
  const LogReal& hi = a > b ? a : b;
  const LogReal& lo = a > b ? b : a;
  return hi + log1p(exp(lo - hi));
}

template <class V>
V expand(const V& seq, int depth, const char* name) {
  if (depth == 0) return {};
  if (seq.empty()) throw InvalidArgument(std::string(name) + " sequence is empty");
  if (seq.size() == 1) return V(static_cast<std::size_t>(depth), seq.front());
  if (seq.size() < static_cast<std::size_t>(depth))
    throw InvalidArgument(std::string(name) + " sequence shorter than depth " + std::to_string(depth));
  return V(seq.begin(), seq.begin() + depth);
}

}  // namespace

// ---------------------------------------------------------------------------

RadiusFactor RadiusFactor::rational(std::int64_t p, std::int64_t q) {
  if (p <= 0 || q <= 0) throw InvalidArgument("radius factor must be positive");
  const std::int64_t g = std::gcd(p, q);
  return {Form::Rational, p / g, q / g};
}

RadiusFactor RadiusFactor::exp_neg(std::int64_t p, std::int64_t q) {
  if (p <= 0 || q <= 0) throw InvalidArgument("exp(-p/q) needs p, q > 0");
  const std::int64_t g = std::gcd(p, q);
  return {Form::ExpNeg, p / g, q / g};
}

RadiusFactor RadiusFactor::parse(std::string_view text) {
  std::string_view s = trim(text);
  if (s.substr(0, 5) == "exp(-" && s.back() == ')') {
    auto [p, q] = parse_fraction(s.substr(5, s.size() - 6));
    return exp_neg(p, q);
  }
  auto [p, q] = parse_fraction(s);
  return rational(p, q);
}

LogReal RadiusFactor::log() const {
  if (form == Form::ExpNeg) return -(LogReal(num) / LogReal(den));
  return mp::log(LogReal(num)) - mp::log(LogReal(den));
}

double RadiusFactor::value_double() const { return value<double>(); }

std::string RadiusFactor::str() const {
  std::string frac = std::to_string(num) + (den == 1 ? "" : "/" + std::to_string(den));
  return form == Form::ExpNeg ? "exp(-" + frac + ")" : frac;
}

// ---------------------------------------------------------------------------

Multiplicity::Multiplicity(std::uint64_t value) : small_(value) {
  if (value == 0) throw InvalidArgument("multiplicity must be at least 1");
}

Multiplicity Multiplicity::power_of_two(std::uint64_t exponent) {
  if (exponent < 64) return Multiplicity(std::uint64_t{1} << exponent);
  Multiplicity m;
  m.small_ = 0;
  m.exp2_ = exponent;
  return m;
}

Multiplicity Multiplicity::parse(std::string_view text) {
  std::string_view s = trim(text);
  if (s.substr(0, 2) == "2^") {
    const std::int64_t e = parse_int(s.substr(2), "exponent");
    if (e < 0) throw InvalidArgument("negative exponent in multiplicity");
    return power_of_two(static_cast<std::uint64_t>(e));
  }
  const std::int64_t v = parse_int(s, "multiplicity");
  if (v < 1) throw InvalidArgument("multiplicity must be at least 1");
  return Multiplicity(static_cast<std::uint64_t>(v));
}

std::uint64_t Multiplicity::value() const {
  if (!is_small()) throw RangeError("multiplicity 2^" + std::to_string(exp2_) + " does not fit in 64 bits");
  return small_;
}

LogReal Multiplicity::log() const {
  if (is_small()) return mp::log(LogReal(small_));
  return LogReal(exp2_) * mp::log(LogReal(2));
}

double Multiplicity::log2() const { return is_small() ? std::log2(static_cast<double>(small_)) : double(exp2_); }

std::string Multiplicity::str() const { return is_small() ? std::to_string(small_) : "2^" + std::to_string(exp2_); }

bool square_at_most(const Multiplicity& a, const Multiplicity& b) {
  using u128 = unsigned __int128;
  if (a.is_small() && b.is_small()) return u128(a.value()) * a.value() <= b.value();
  if (!a.is_small() && b.is_small()) return false;  // a^2 >= 2^128
  if (a.is_small()) {
    const std::uint64_t e = static_cast<std::uint64_t>(b.log2());
    if (e >= 128) return true;
    return u128(a.value()) * a.value() <= (u128(1) << e);
  }
  return 2 * static_cast<std::uint64_t>(a.log2()) <= static_cast<std::uint64_t>(b.log2());
}

// ---------------------------------------------------------------------------

double ParameterSchedule::delta_offset(int n) const {
  auto it = delta_log_offset.find(n);
  return it == delta_log_offset.end() ? 0.0 : it->second;
}

ParameterSchedule build_schedule(const std::vector<RadiusFactor>& r_seq, const std::vector<Multiplicity>& m_seq,
                                 int depth, const ScheduleOptions& options) {
  if (depth < 0) throw InvalidArgument("negative depth");
  ParameterSchedule s;
  s.depth = depth;
  s.r_seq = expand(r_seq, depth, "r");
  s.m_seq = expand(m_seq, depth, "m");
  s.delta_log_offset = options.delta_log_offset;

  const LogReal log_tenth = log(LogReal(1) / 10);
  for (int n = 1; n <= depth; ++n) {
    const LogReal lr = s.r(n).log();
    if (!(lr < 0)) throw InvalidArgument("r_" + std::to_string(n) + " must lie in (0, 1/10]");
    // exp(-p/q) is irrational, so the comparison with log(1/10) is never an exact tie.
    if (lr > log_tenth && !(s.r(n).form == RadiusFactor::Form::Rational && s.r(n).num * 10 == s.r(n).den))
      throw InvalidArgument("r_" + std::to_string(n) + " = " + s.r(n).str() + " exceeds 1/10");
  }

  const std::size_t N = static_cast<std::size_t>(depth) + 1;
  s.log_delta.resize(N);
  s.log_eps.assign(N, LogReal(0));
  s.log_R.assign(N, LogReal(0));
  s.log_M.assign(N, LogReal(0));
  s.log_D.assign(N, LogReal(0));
  const LogReal log2 = log(LogReal(2));
  const LogReal log4 = log(LogReal(4));
  s.log_delta[0] = -log2 + LogReal(s.delta_offset(0));
  for (int n = 0; n < depth; ++n) {
    const std::size_t i = static_cast<std::size_t>(n);
    const LogReal lm = s.m(n + 1).log();
    const LogReal lr = s.r(n + 1).log();
    s.log_delta[i + 1] = 2 * s.log_delta[i] + lr - log4 - 2 * lm + LogReal(s.delta_offset(n + 1));
    s.log_eps[i + 1] = 2 * s.log_delta[i] - log2 - 2 * lm;
    s.log_R[i + 1] = s.log_R[i] + lr;
    s.log_M[i + 1] = s.log_M[i] + lm;
    s.log_D[i + 1] = s.log_D[i] + s.log_delta[i] - lm;
  }

  if (options.verify) {
    if (auto v = check_estimates(s)) {
      std::ostringstream os;
      os << v->which << " fails at step " << v->n << " (log margin " << v->margin << ")";
      throw InvalidSchedule(v->n, v->which, os.str());
    }
  }
  return s;
}

std::optional<EstimateViolation> check_estimates(const ParameterSchedule& s) {
  for (int n = 0; n < s.depth; ++n) {
    const std::size_t i = static_cast<std::size_t>(n);
    const LogReal lhs1 = log_sum(s.log_delta[i + 1], s.log_eps[i + 1]);
    const LogReal rhs1 = 2 * s.log_delta[i] - 2 * s.m(n + 1).log();
    // Slack well above the rounding of 256-bit logs.
    const LogReal tol1 = LogReal(1e-60) * (1 + abs(rhs1));
    if (!(rhs1 - lhs1 > tol1)) return EstimateViolation{n + 1, "est1", (rhs1 - lhs1).convert_to<double>()};
    const LogReal lhs2 = s.log_delta[i + 1];
    const LogReal rhs2 = s.log_eps[i + 1] + s.r(n + 1).log();
    const LogReal tol2 = LogReal(1e-60) * (1 + abs(rhs2));
    if (!(rhs2 - lhs2 > tol2)) return EstimateViolation{n + 1, "est2", (rhs2 - lhs2).convert_to<double>()};
  }
  return std::nullopt;
}

ScheduleReport validate_schedule(const ParameterSchedule& s) {
  ScheduleReport rep;
  const int depth = s.depth;
  rep.tail_partial.assign(static_cast<std::size_t>(depth) + 1, 0.0);
  std::vector<double> term(static_cast<std::size_t>(depth) + 1, 0.0);
  for (int n = 1; n <= depth; ++n) {
    term[n] = std::ldexp(std::abs(s.r(n).log().convert_to<double>()), -n);
    rep.tail_partial[n] = rep.tail_partial[n - 1] + term[n];
  }
  // Ratio test on the second half of the available terms.
  if (depth >= 2) {
    double q = 0;
    for (int n = std::max(2, depth / 2 + 1); n <= depth; ++n) q = std::max(q, term[n] / term[n - 1]);
    rep.tail_converges = q <= 0.9;
    rep.tail_bound = rep.tail_converges ? rep.tail_partial[depth] + term[depth] * q / (1 - q)
                                        : std::numeric_limits<double>::infinity();
  } else {
    rep.tail_converges = depth == 0;
    rep.tail_bound = depth == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }

  // m_n >= 2 and m_{n+1} >= m_n^2 from some index on (at least one pair observed).
  for (int n0 = 1; n0 < depth; ++n0) {
    bool ok = true;
    for (int n = n0; n < depth && ok; ++n) ok = s.m(n).log2() >= 1 && square_at_most(s.m(n), s.m(n + 1));
    if (ok) {
      rep.super_exponential_m = true;
      rep.super_exponential_from = n0;
      break;
    }
  }

  // Bracket for depth-n radii: [3^-n, 3^n] * delta_n / D_n.
  rep.scales_separate = true;
  const LogReal log3 = log(LogReal(3));
  for (int n = 0; n < depth; ++n) {
    const std::size_t i = static_cast<std::size_t>(n);
    const LogReal lo_n = s.log_delta[i] - s.log_D[i] - n * log3;
    const LogReal hi_next = s.log_delta[i + 1] - s.log_D[i + 1] + (n + 1) * log3;
    if (!(hi_next < lo_n)) {
      rep.scales_separate = false;
      rep.first_overlap = n;
      break;
    }
  }
  return rep;
}

double capacity_drift(const ParameterSchedule& s, int n) {
  if (n < 0 || n > s.depth) throw InvalidArgument("capacity_drift: depth out of range");
  for (int k = 1; k <= s.depth; ++k)
    if (!(s.m(k) == Multiplicity(1)))
      throw NotOrdinary("capacity_drift needs m == 1, got m_" + std::to_string(k) + " = " + s.m(k).str());
  LogReal v = ldexp(s.log_delta[static_cast<std::size_t>(n)], -n);
  for (int k = 1; k <= n; ++k) v += ldexp(abs(s.r(k).log()), -k);
  return v.convert_to<double>();
}

std::vector<Multiplicity> choose_m(const GaugeFunction& theta, double A, double C,
                                   const std::vector<RadiusFactor>& r_seq, int depth) {
  if (A < 1) throw InvalidArgument("choose_m: A must be at least 1");
  if (C < 3) throw InvalidArgument("choose_m: C must be at least 3");
  if (depth == 0) return {};
  const std::vector<RadiusFactor> r = expand(r_seq, depth, "r");
  std::vector<Multiplicity> out;
  const double lA = std::log(A), lCA = std::log(C * A), l2 = std::log(2.0);
  const double log_r0 = std::log(theta.r0());
  double log_R = 0, log_M = 0;
  int prev_k = -1;
  for (int n = 1; n <= depth; ++n) {
    log_R += r[n - 1].log().convert_to<double>();
    const double rhs = n * lCA - 2 * log_R;
    bool found = false;
    for (int k = prev_k + 1; k <= 62; ++k) {
      const double lm = std::ldexp(l2, k);  // log 2^(2^k)
      const double x = n * lA + log_R - (log_M + lm);
      if (!(x < log_r0)) continue;
      if (theta.log_at(x) >= rhs) {
        out.push_back(Multiplicity::power_of_two(std::uint64_t{1} << k));
        log_M += lm;
        prev_k = k;
        found = true;
        break;
      }
    }
    if (!found)
      throw GaugeTooWeak("choose_m: no m = 2^(2^k), k <= 62, satisfies the gauge condition at n = " +
                         std::to_string(n));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string write_schedule(const ParameterSchedule& s) {
  std::ostringstream os;
  os << "# schedule depth=" << s.depth << "\n";
  for (const auto& [n, off] : s.delta_log_offset)
    os << "# delta_log_offset " << n << " " << std::setprecision(17) << off << "\n";
  os << "n,r,m,log10_delta,log10_eps\n";
  const LogReal ln10 = log(LogReal(10));
  auto dec = [](const LogReal& v) {
    std::ostringstream o;
    o << std::setprecision(30) << v;
    return o.str();
  };
  for (int n = 0; n <= s.depth; ++n) {
    const std::size_t i = static_cast<std::size_t>(n);
    os << n << "," << (n == 0 ? "-" : s.r(n).str()) << "," << (n == 0 ? "-" : s.m(n).str()) << ","
       << dec(s.log_delta[i] / ln10) << "," << (n == 0 ? "-" : dec(s.log_eps[i] / ln10)) << "\n";
  }
  return os.str();
}

ParameterSchedule read_schedule(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  std::vector<RadiusFactor> r;
  std::vector<Multiplicity> m;
  ScheduleOptions opt;
  opt.verify = false;
  int depth = -1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string key;
      ls >> key;
      if (key == "delta_log_offset") {
        int n = 0;
        double off = 0;
        ls >> n >> off;
        opt.delta_log_offset[n] = off;
      }
      continue;
    }
    if (line.rfind("n,", 0) == 0) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 5) throw InvalidArgument("schedule record needs 5 fields: '" + line + "'");
    const int n = static_cast<int>(parse_int(f[0], "step"));
    if (n != depth + 1) throw InvalidArgument("schedule records out of order at n=" + f[0]);
    depth = n;
    if (n == 0) continue;
    r.push_back(RadiusFactor::parse(f[1]));
    m.push_back(Multiplicity::parse(f[2]));
  }
  if (depth < 0) throw InvalidArgument("empty schedule text");
  ParameterSchedule s = build_schedule(r, m, depth, opt);
  return s;
}

}  // namespace wermer
