#include "wermer/tower.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wermer/io.hpp"

namespace wermer {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double van_der_corput(std::uint64_t i, unsigned base) {
  double v = 0, f = 1.0 / base;
  while (i > 0) {
    v += f * double(i % base);
    i /= base;
    f /= base;
  }
  return v;
}

// Largest grid we are willing to list.
constexpr std::uint64_t kGridCap = 4000000;

}  // namespace

std::vector<GridPoint> lattice_grid(std::uint64_t m) {
  if (m == 0) throw InvalidArgument("lattice_grid: m must be positive");
  // About pi (m-1)^2 / 9 points.
  if (double(m) * double(m) * 0.35 > double(kGridCap))
    throw EnumerationCapExceeded("sigma grid for m = " + std::to_string(m) + " is too large to list");
  std::vector<GridPoint> out;
  const long long lim = static_cast<long long>(m - 1) * static_cast<long long>(m - 1);
  const int J = static_cast<int>((m - 1) / 3);
  for (int j = -J; j <= J; ++j)
    for (int k = -J; k <= J; ++k)
      if (9LL * (1LL * j * j + 1LL * k * k) <= lim) out.push_back({j, k});
  return out;
}

AnchorSequence::AnchorSequence(std::uint64_t seed, bool origin_first) : seed_(seed), origin_first_(origin_first) {
  phase_[0] = double(splitmix64(seed) >> 11) * 0x1.0p-53;
  phase_[1] = double(splitmix64(seed ^ 0x5851f42d4c957f2dULL) >> 11) * 0x1.0p-53;
}

Complex<double> AnchorSequence::operator()(int n) const {
  if (n < 1) throw InvalidArgument("anchors are indexed from 1");
  if (n == 1 && origin_first_) return {0.0, 0.0};
  const int parity = n % 2 == 1 ? 0 : 1;
  const std::uint64_t j = static_cast<std::uint64_t>(parity == 0 ? (n - 1) / 2 : (n - 2) / 2) + 1;
  static constexpr double kStep[2] = {0.6180339887498949, 0.4142135623730951};
  static constexpr unsigned kBase[2] = {2, 3};
  const double rho = 0.25 * std::sqrt(van_der_corput(j, kBase[parity]));
  double turn = phase_[parity] + double(j) * kStep[parity];
  turn -= std::floor(turn);
  return std::polar(rho, 2 * std::numbers::pi * turn);
}

std::string Signature::str() const {
  if (index.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < index.size(); ++i) s += (i ? "." : "") + std::to_string(index[i]);
  return s;
}

TowerModel::TowerModel(ParameterSchedule schedule, AnchorSequence anchors, int depth, int max_bits)
    : schedule_(std::move(schedule)), anchors_(anchors), depth_(depth), max_bits_(max_bits) {
  if (depth < 0 || depth > schedule_.depth)
    throw InvalidArgument("tower depth " + std::to_string(depth) + " outside schedule depth " +
                          std::to_string(schedule_.depth));
  precision_for_depth(schedule_, depth, max_bits);
  grids_.resize(static_cast<std::size_t>(depth) + 1);
  for (int n = 1; n <= depth; ++n) grids_[n] = lattice_grid(schedule_.m(n).value());
}

const std::vector<GridPoint>& TowerModel::grid(int n) const {
  if (n < 1 || n > depth_) throw InvalidArgument("sigma grid index " + std::to_string(n) + " out of range");
  return grids_[static_cast<std::size_t>(n)];
}

std::uint64_t TowerModel::signature_count(int n) const {
  if (n < 0 || n > depth_) throw InvalidArgument("signature depth out of range");
  std::uint64_t c = 1;
  for (int k = 1; k <= n; ++k) {
    const std::uint64_t g = grids_[k].size();
    if (c > std::numeric_limits<std::uint64_t>::max() / g) return std::numeric_limits<std::uint64_t>::max();
    c *= g;
  }
  return c;
}

Signature TowerModel::signature(int n, std::uint64_t index) const {
  if (index >= signature_count(n)) throw InvalidArgument("signature index out of range");
  Signature s;
  s.index.resize(static_cast<std::size_t>(n));
  for (int k = n; k >= 1; --k) {
    const std::uint64_t g = grids_[k].size();
    s.index[k - 1] = static_cast<std::uint32_t>(index % g);
    index /= g;
  }
  return s;
}

std::uint64_t TowerModel::index_of(const Signature& s) const {
  std::uint64_t idx = 0;
  for (int k = 1; k <= s.depth(); ++k) {
    const std::uint64_t g = grid(k).size();
    if (s.index[k - 1] >= g) throw InvalidArgument("signature entry outside its grid");
    idx = idx * g + s.index[k - 1];
  }
  return idx;
}

std::string TowerModel::describe() const {
  std::ostringstream os;
  os << "# tower\n"
     << "seed=" << anchors_.seed() << "\n"
     << "origin_first=" << (anchors_.origin_first() ? 1 : 0) << "\n"
     << "depth=" << depth_ << "\n"
     << "max_bits=" << max_bits_ << "\n"
     << write_schedule(schedule_);
  return os.str();
}

std::uint64_t TowerModel::hash() const { return fnv1a(describe()); }

std::string write_tower_description(const TowerDescription& d) {
  std::ostringstream os;
  os << "schedule=" << d.schedule_ref << "\n"
     << "seed=" << d.seed << "\n"
     << "origin_first=" << (d.origin_first ? 1 : 0) << "\n"
     << "depth=" << d.depth << "\n"
     << "max_bits=" << d.max_bits << "\n";
  return os.str();
}

TowerDescription read_tower_description(std::string_view text) {
  TowerDescription d;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("tower record without '=': " + line);
    const std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    try {
      if (key == "schedule") d.schedule_ref = val;
      else if (key == "seed") d.seed = std::stoull(val);
      else if (key == "origin_first") d.origin_first = std::stoi(val) != 0;
      else if (key == "depth") d.depth = std::stoi(val);
      else if (key == "max_bits") d.max_bits = std::stoi(val);
      else throw InvalidArgument("unknown tower key '" + key + "'");
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad value for tower key '" + key + "': " + val);
    }
  }
  return d;
}

// ---------------------------------------------------------------------------

namespace {
template <class T>
Complex<T> lift(Complex<double> z) {
  return {T(z.real()), T(z.imag())};
}
template <class T>
Complex<double> drop(const Complex<T>& z) {
  return {to_double(z.real()), to_double(z.imag())};
}
}  // namespace

Complex<double> eval_P(const TowerModel& t, const Signature& s, Complex<double> z, Complex<double> w,
                       const PrecisionContext& ctx) {
  return with_precision(ctx, [&]<class T>() {
    const auto k = make_constants<T>(t);
    return drop(eval_P(k, s, lift<T>(z), lift<T>(w)));
  });
}

Complex<double> eval_dP(const TowerModel& t, const Signature& s, Complex<double> z, Complex<double> w,
                        const PrecisionContext& ctx) {
  return with_precision(ctx, [&]<class T>() {
    const auto k = make_constants<T>(t);
    return drop(eval_dP(k, s, lift<T>(z), lift<T>(w)));
  });
}

double eval_u(const TowerModel& t, int n, Complex<double> z, Complex<double> w, const PrecisionContext& ctx) {
  return with_precision(ctx, [&]<class T>() {
    const auto k = make_constants<T>(t);
    return to_double(eval_u(k, n, lift<T>(z), lift<T>(w)));
  });
}

double eval_v(const TowerModel& t, int n1, Complex<double> z, Complex<double> w, const PrecisionContext& ctx) {
  return with_precision(ctx, [&]<class T>() {
    const auto k = make_constants<T>(t);
    return to_double(eval_v(k, n1, lift<T>(z), lift<T>(w)));
  });
}

Membership membership_depth(const TowerModel& t, Complex<double> z, Complex<double> w, int n_max,
                            const PrecisionContext& ctx) {
  return with_precision(ctx, [&]<class T>() {
    const auto k = make_constants<T>(t);
    return membership_depth(k, IntervalComplex<T>(lift<T>(z)), IntervalComplex<T>(lift<T>(w)), n_max);
  });
}

std::vector<Complex<double>> sigma_grid(const TowerModel& t, int n) {
  const auto k = make_constants<Real128>(t, false);
  std::vector<Complex<double>> out;
  for (const auto& s : k.sigma.at(static_cast<std::size_t>(n))) out.push_back(drop(s));
  return out;
}

}  // namespace wermer
