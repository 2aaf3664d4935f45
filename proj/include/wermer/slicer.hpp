#pragma once

// Vertical slices (z, w) = (z0 - gamma w', w'): certified roots of
// P_{n,s} = alpha, component atlas, slice measures, nesting certificates,
// the square-root winding probe and escape rasters.

#include <cstdint>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "wermer/io.hpp"
#include "wermer/parallel.hpp"
#include "wermer/tower.hpp"

namespace wermer {

using Rational = mp::cpp_rational;

struct SlicePlane {
  Complex<double> gamma{0, 0};
  Complex<double> z0{0.4, 0};

  /// |gamma| <= 1/100.
  void check() const;
  /// check() and 0.385 <= |z0| <= 0.495.
  void check_boundary() const;
  std::string str() const;
};

namespace detail {

template <class T>
Complex<T> lift(Complex<double> z) {
  return {T(z.real()), T(z.imag())};
}

template <class T>
Complex<T> csqrt(const Complex<T>& z) {
  auto [re, im] = principal_sqrt_parts(z.real(), z.imag());
  return {re, im};
}

template <class T>
T cabs(const Complex<T>& z) {
  using std::sqrt;
  return sqrt(norm2(z));
}

}  // namespace detail

/// w' -> P_{n,s}(z0 - gamma w', w') - alpha and its derivative.
template <class T>
struct SliceFunction {
  const TowerConstants<T>& k;
  const Signature& s;
  Complex<T> z0, gamma, alpha;

  Complex<T> z_at(const Complex<T>& w) const { return z0 - gamma * w; }

  std::pair<Complex<T>, Complex<T>> operator()(const Complex<T>& w) const {
    auto [p, dp] = eval_P_dP(k, s, z_at(w), w, Complex<T>(-gamma));
    return {p - alpha, dp};
  }
  std::pair<IntervalComplex<T>, IntervalComplex<T>> operator()(const IntervalComplex<T>& w) const {
    const IntervalComplex<T> z = IntervalComplex<T>(z0) - w * gamma;
    auto [p, dp] = eval_P_dP(k, s, z, w, Complex<T>(-gamma));
    return {p - alpha, dp};
  }
};

template <class T>
struct CertifiedRoot {
  Complex<T> w;
  Complex<T> deriv;
  T radius;  // half-width of the Krawczyk box holding exactly this root
  IntervalComplex<T> box;
};

/// Sign-pattern seeds from the backward recursion P_{k-1} = sigma_k +- sqrt(P_k + eps_k A_k),
/// with the w-dependence of A resolved by fixed-point iteration. Pattern bit l-1 picks
/// the sign at level l.
template <class T>
std::vector<Complex<T>> backward_seeds(const TowerConstants<T>& k, const Signature& s, const SlicePlane& plane,
                                       const Complex<T>& alpha) {
  const int n = s.depth();
  const Complex<T> z0 = detail::lift<T>(plane.z0), gamma = detail::lift<T>(plane.gamma);
  std::vector<Complex<T>> seeds;
  using std::ldexp;
  const T tol = ldexp(T(1), -(bits_of<T> - 8));
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<Complex<T>> level(static_cast<std::size_t>(n) + 1);
    Complex<T> w(0);
    for (int it = 0; it < 200; ++it) {
      const Complex<T> z = z0 - gamma * w;
      Complex<T> target = alpha;
      for (int l = n; l >= 1; --l) {
        const Complex<T> g = detail::csqrt(Complex<T>(target + k.eps[l] * anchor_term(k, l, z, w)));
        const Complex<T>& sg = k.sigma[l][s.index[l - 1]];
        const Complex<T> a = sg + g, b = sg - g;
        Complex<T> pick;
        if (it == 0) pick = (mask >> (l - 1)) & 1 ? b : a;
        else pick = norm2(Complex<T>(a - level[l - 1])) <= norm2(Complex<T>(b - level[l - 1])) ? a : b;
        level[l - 1] = pick;
        target = pick;
      }
      const Complex<T> step = target - w;
      w = target;
      if (it > 0 && detail::cabs(step) <= tol) break;
    }
    seeds.push_back(w);
  }
  return seeds;
}

/// Newton on the slice function, then a Krawczyk test on boxes of half-width
/// delta_n/|f'| times 1e-3, 1e-6, 1e-9, 1e-12 and 1e-1 in that order.
template <class T>
std::vector<CertifiedRoot<T>> slice_roots(const TowerConstants<T>& k, const Signature& s, const SlicePlane& plane,
                                          const Complex<T>& alpha) {
  const int n = s.depth();
  if (n > k.depth) throw InvalidArgument("signature deeper than the tower");
  plane.check_boundary();
  if (!(detail::cabs(alpha) < 2 * k.delta[n]))
    throw RangeError("slice_roots: |alpha| must be below 2 delta_" + std::to_string(n));
  const SliceFunction<T> F{k, s, detail::lift<T>(plane.z0), detail::lift<T>(plane.gamma), alpha};
  using std::ldexp;
  const T tol = ldexp(T(1), -(bits_of<T> - 6));
  std::vector<CertifiedRoot<T>> out;
  const auto seeds = backward_seeds(k, s, plane, alpha);
  for (std::size_t r = 0; r < seeds.size(); ++r) {
    Complex<T> w = seeds[r];
    Complex<T> df;
    for (int it = 0; it < 80; ++it) {
      auto [f, d] = F(w);
      df = d;
      if (norm2(d) == 0) break;
      const Complex<T> step = f / d;
      w -= step;
      if (detail::cabs(step) <= tol * (1 + detail::cabs(w))) break;
    }
    df = F(w).second;
    const std::string where = s.str() + "#" + std::to_string(r);
    if (norm2(df) == 0) throw CertificationFailure("vanishing derivative at a slice root", where, 0, "root_isolation");
    const T scale = k.delta[n] / detail::cabs(df);
    const Complex<T> Y = Complex<T>(1) / df;
    bool ok = false;
    double best = -1;
    for (double f : {1e-3, 1e-6, 1e-9, 1e-12, 1e-1}) {
      const T rho = scale * T(f);
      const IntervalComplex<T> B = IntervalComplex<T>::around(w, rho);
      const IntervalComplex<T> fc = F(IntervalComplex<T>(w)).first;
      const IntervalComplex<T> dB = F(B).second;
      const IntervalComplex<T> one(Complex<T>(1));
      const IntervalComplex<T> K = IntervalComplex<T>(w) - fc * Y + (one - dB * Y) * (B - w);
      if (strictly_inside(K, B)) {
        out.push_back({w, df, rho, B});
        ok = true;
        break;
      }
      best = std::max(best, to_double(T((rho - abs_upper(K - w)) / rho)));
    }
    if (!ok) throw CertificationFailure("Krawczyk test failed for a slice root", where, best, "root_isolation");
  }
  for (std::size_t a = 0; a < out.size(); ++a)
    for (std::size_t b = a + 1; b < out.size(); ++b)
      if (!disjoint(out[a].box, out[b].box))
        throw CertificationFailure("isolating boxes overlap", s.str() + "#" + std::to_string(a) + "/" + std::to_string(b),
                                   0, "root_isolation");
  return out;
}

template <class T>
struct Component {
  int depth = 0;
  std::uint64_t sig_index = 0;
  Signature sig;
  int root = 0;
  Complex<T> center;
  T deriv_mag;
  T conf_radius;  // delta_n / |P'(center)|
  T iso_radius;
};

/// 1/sqrt(40) delta_{n-1}/m_n <= |P_{n-1} - sigma_n| < delta_{n-1}/m_n at the
/// centre and eight points at half the conformal radius lying in X_n.
template <class T>
void check_parent_bracket(const TowerConstants<T>& k, const SlicePlane& plane, const Component<T>& c) {
  const int n = c.depth;
  if (n < 1) return;
  Signature parent = c.sig;
  parent.index.pop_back();
  const Complex<T> z0 = detail::lift<T>(plane.z0), gamma = detail::lift<T>(plane.gamma);
  const Complex<T>& sg = k.sigma[n][c.sig.index[n - 1]];
  const T hi = k.sub_clip[n - 1];
  using std::sqrt;
  const T lo = hi / sqrt(T(40));
  for (int j = -1; j < 8; ++j) {
    Complex<T> w = c.center;
    if (j >= 0) {
      using std::cos;
      using std::sin;
      const T ang = T(j) * boost::math::constants::two_pi<T>() / 8;
      w += Complex<T>(cos(ang), sin(ang)) * T(c.conf_radius / 2);
    }
    const Complex<T> z = z0 - gamma * w;
    if (!(norm2(eval_P(k, c.sig, z, w)) < k.delta[n] * k.delta[n])) continue;
    const T q = detail::cabs(Complex<T>(eval_P(k, parent, z, w) - sg));
    if (!(lo <= q && q < hi)) {
      const double margin = to_double(T(std::min(q - lo, hi - q) / hi));
      throw CertificationFailure("parent value outside the sub-clip bracket", c.sig.str() + "#" + std::to_string(c.root),
                                 margin, "xns_bracket");
    }
  }
}

/// One record per (signature, root of P_{n,s} = 0), signature-major.
template <class T>
std::vector<Component<T>> slice_components(const TowerConstants<T>& k, int n, const SlicePlane& plane, int workers,
                                           bool check_bracket = true) {
  check_enumeration(*k.model, n);
  const std::uint64_t count = k.model->signature_count(n);
  auto per_sig = parallel_map<std::vector<Component<T>>>(count, workers, [&](std::size_t i) {
    const Signature s = k.model->signature(n, i);
    std::vector<Component<T>> out;
    const auto roots = slice_roots(k, s, plane, Complex<T>(0));
    for (std::size_t r = 0; r < roots.size(); ++r) {
      Component<T> c;
      c.depth = n;
      c.sig_index = i;
      c.sig = s;
      c.root = static_cast<int>(r);
      c.center = roots[r].w;
      c.deriv_mag = detail::cabs(roots[r].deriv);
      c.conf_radius = k.delta[n] / c.deriv_mag;
      c.iso_radius = roots[r].radius;
      if (check_bracket) check_parent_bracket(k, plane, c);
      out.push_back(std::move(c));
    }
    return out;
  });
  std::vector<Component<T>> all;
  for (auto& v : per_sig)
    for (auto& c : v) all.push_back(std::move(c));
  return all;
}

struct Atom {
  Complex<double> w;
  Rational weight;
  std::uint64_t sig_index = 0;
  int root = 0;
};

struct SliceMeasure {
  int depth = 0;
  std::vector<Atom> atoms;
  Rational total() const;
};

template <class T>
SliceMeasure measure_from_components(const TowerModel& t, int n, const std::vector<Component<T>>& comps) {
  SliceMeasure m;
  m.depth = n;
  const mp::cpp_int denom = (mp::cpp_int(1) << n) * mp::cpp_int(t.signature_count(n));
  for (const auto& c : comps)
    m.atoms.push_back({{to_double(c.center.real()), to_double(c.center.imag())}, Rational(mp::cpp_int(1), denom),
                       c.sig_index, c.root});
  return m;
}

/// Sums atom weights per depth-k component: an atom goes to the nearest centre
/// among components whose signature is a prefix of its own.
template <class T>
std::vector<Rational> aggregate_by_ancestor(const TowerModel& t, const SliceMeasure& m,
                                            const std::vector<Component<T>>& ancestors) {
  std::vector<Rational> mass(ancestors.size());
  for (const Atom& a : m.atoms) {
    const Signature s = t.signature(m.depth, a.sig_index);
    std::size_t best = ancestors.size();
    double bd = 0;
    for (std::size_t i = 0; i < ancestors.size(); ++i) {
      const Signature& p = ancestors[i].sig;
      if (!std::equal(p.index.begin(), p.index.end(), s.index.begin())) continue;
      const double d = std::abs(a.w - Complex<double>(to_double(ancestors[i].center.real()),
                                                      to_double(ancestors[i].center.imag())));
      if (best == ancestors.size() || d < bd) {
        best = i;
        bd = d;
      }
    }
    if (best == ancestors.size()) throw InvalidArgument("atom without an ancestor component");
    mass[best] += a.weight;
  }
  return mass;
}

struct MassProfile {
  Complex<double> p;
  std::vector<double> radii;
  std::vector<Rational> masses;
  std::vector<std::string> regimes;  // plateau | quadratic | - per radius
};

/// mu_n(B(p,r)) by atom counting, B open.
MassProfile mass_profile(const SliceMeasure& m, Complex<double> p, const std::vector<double>& radii);

// ---------------------------------------------------------------------------
// Nesting certificates.

struct NestingEntry {
  std::string signature;
  int root = 0;
  double margin_boundary = 0;      // (inf|P_{n+1}| on the box edge - delta_{n+1}) / delta_{n+1}
  double margin_intermediate = 0;  // (delta_n/m_{n+1} - sup|P_n - sigma|) / (delta_n/m_{n+1})
  double margin_component = 0;     // (delta_n - sup|P_n|) / delta_n
};

struct NestingCertificate {
  int n = 0;
  double K = 4;
  std::vector<NestingEntry> entries;
  double min_margin = 0;
};

namespace detail {

template <class T>
Interval<T> span(const T& a, const T& b) {
  return make_interval_unchecked<T>(next_down(std::min(a, b)), next_up(std::max(a, b)));
}

template <class T>
double rel_margin(const T& bound, const T& value) {
  return to_double(T((bound - value) / bound));
}

}  // namespace detail

/// For each depth-(n+1) component, the square of half-width K * conf_radius
/// around its centre: its edge (32 pieces per side) maps outside
/// D(0, delta_{n+1}), and the whole square maps into the intermediate disk
/// |P_n - sigma| < delta_n/m_{n+1} and into D(0, delta_n).
template <class T>
NestingCertificate nesting_certificate(const TowerConstants<T>& k, int n, const SlicePlane& plane, double K,
                                       int workers) {
  if (n < 0 || n + 1 > k.depth) throw InvalidArgument("nesting certificate needs depth n+1 in the tower");
  if (!(K > 1)) throw InvalidArgument("distortion allowance must exceed 1");
  const auto comps = slice_components(k, n + 1, plane, workers);
  const Complex<T> z0 = detail::lift<T>(plane.z0), gamma = detail::lift<T>(plane.gamma);
  constexpr int kPieces = 32;
  auto entries = parallel_map<NestingEntry>(comps.size(), workers, [&](std::size_t i) {
    const Component<T>& c = comps[i];
    const std::string where = c.sig.str() + "#" + std::to_string(c.root);
    Signature parent = c.sig;
    parent.index.pop_back();
    const T h = T(K) * c.conf_radius;
    const T x0 = c.center.real() - h, x1 = c.center.real() + h;
    const T y0 = c.center.imag() - h, y1 = c.center.imag() + h;
    const SliceFunction<T> Fc{k, c.sig, z0, gamma, Complex<T>(0)};
    NestingEntry e;
    e.signature = c.sig.str();
    e.root = c.root;
    e.margin_boundary = std::numeric_limits<double>::infinity();
    for (int side = 0; side < 4; ++side) {
      for (int j = 0; j < kPieces; ++j) {
        const T a = T(j) / kPieces, b = T(j + 1) / kPieces;
        IntervalComplex<T> seg;
        if (side == 0) seg = {detail::span<T>(x0 + (x1 - x0) * a, x0 + (x1 - x0) * b), detail::span<T>(y0, y0)};
        if (side == 1) seg = {detail::span<T>(x0 + (x1 - x0) * a, x0 + (x1 - x0) * b), detail::span<T>(y1, y1)};
        if (side == 2) seg = {detail::span<T>(x0, x0), detail::span<T>(y0 + (y1 - y0) * a, y0 + (y1 - y0) * b)};
        if (side == 3) seg = {detail::span<T>(x1, x1), detail::span<T>(y0 + (y1 - y0) * a, y0 + (y1 - y0) * b)};
        const IntervalComplex<T> v = Fc(seg).first;
        const double mg = -detail::rel_margin(k.delta_iv[n + 1].hi, abs_lower(v));
        e.margin_boundary = std::min(e.margin_boundary, mg);
        if (classify_disk(v, k.delta_iv[n + 1]) != DiskClass::Outside)
          throw CertificationFailure("box edge meets X_" + std::to_string(n + 1), where, mg, "nesting");
      }
    }
    const IntervalComplex<T> B(detail::span<T>(x0, x1), detail::span<T>(y0, y1));
    const IntervalComplex<T> zB = IntervalComplex<T>(z0) - B * gamma;
    const IntervalComplex<T> pn = eval_P(k, parent, zB, B);
    const IntervalComplex<T> d = pn - k.sigma_iv[n + 1][c.sig.index[n]];
    e.margin_intermediate = detail::rel_margin(k.sub_clip_iv[n].lo, abs_upper(d));
    if (classify_disk(d, k.sub_clip_iv[n]) != DiskClass::Inside)
      throw CertificationFailure("box leaves its intermediate disk", where, e.margin_intermediate, "nesting");
    e.margin_component = detail::rel_margin(k.delta_iv[n].lo, abs_upper(pn));
    if (classify_disk(pn, k.delta_iv[n]) != DiskClass::Inside)
      throw CertificationFailure("box leaves X_" + std::to_string(n), where, e.margin_component, "nesting");
    return e;
  });
  NestingCertificate cert;
  cert.n = n;
  cert.K = K;
  cert.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& e : entries)
    cert.min_margin = std::min({cert.min_margin, e.margin_boundary, e.margin_intermediate, e.margin_component});
  cert.entries = std::move(entries);
  return cert;
}

// ---------------------------------------------------------------------------

struct WindingResult {
  bool obstructed = false;
  int steps = 0;
  bool swapped = false;
  double min_separation = 0;  // smallest distance between the two tracked roots
  double max_step = 0;        // largest move of the tracked root in one step
  double residual = 0;        // Selection: sup |0^2 - eps zeta| = eps r
  std::vector<Complex<double>> path;  // tracked root every 45 degrees
};

/// Follows a root of z^2 = eps zeta0 as zeta0 runs once around |zeta0| = r.
WindingResult winding_probe(double eps, double r, double delta, int steps = 720);

// ---------------------------------------------------------------------------

inline constexpr std::uint16_t kUnknownPixel = 65535;

struct RasterSpec {
  int width = 256;
  int height = 256;
  Complex<double> center{0, 0};
  double half_width = 0.55;
};

struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> pixels;  // depth + 1, 0 outside X_0
};

template <class T>
Raster render_escape(const TowerConstants<T>& k, const SlicePlane& plane, const RasterSpec& spec, int n_max,
                     int workers) {
  if (spec.width < 1 || spec.height < 1 || spec.width > 4096 || spec.height > 4096)
    throw InvalidArgument("raster size must be within 4096 x 4096");
  plane.check();
  const Complex<T> z0 = detail::lift<T>(plane.z0), gamma = detail::lift<T>(plane.gamma);
  Raster out;
  out.width = spec.width;
  out.height = spec.height;
  out.pixels.assign(static_cast<std::size_t>(spec.width) * spec.height, 0);
  parallel_for(static_cast<std::size_t>(spec.height), workers, [&](std::size_t row) {
    for (int col = 0; col < spec.width; ++col) {
      const double x = spec.center.real() + spec.half_width * (2 * (col + 0.5) / spec.width - 1);
      const double y = spec.center.imag() + spec.half_width * (1 - 2 * (double(row) + 0.5) / spec.height);
      const IntervalComplex<T> w{Complex<T>(T(x), T(y))};
      const IntervalComplex<T> z = IntervalComplex<T>(z0) - w * gamma;
      const Membership m = membership_depth(k, z, w, n_max);
      out.pixels[row * spec.width + col] =
          m.certified ? static_cast<std::uint16_t>(m.depth + 1) : kUnknownPixel;
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Double-valued records for reports, dispatched through a precision context.

struct ComponentRow {
  int depth = 0;
  std::uint64_t sig_index = 0;
  std::string signature;
  int root = 0;
  Complex<double> center;
  double deriv_mag = 0;
  double conf_radius = 0;
  double iso_radius = 0;
  std::string center_re, center_im;  // 30 significant digits
};

template <class T>
ComponentRow to_row(const Component<T>& c) {
  ComponentRow r;
  r.depth = c.depth;
  r.sig_index = c.sig_index;
  r.signature = c.sig.str();
  r.root = c.root;
  r.center = {to_double(c.center.real()), to_double(c.center.imag())};
  r.deriv_mag = to_double(c.deriv_mag);
  r.conf_radius = to_double(c.conf_radius);
  r.iso_radius = to_double(c.iso_radius);
  r.center_re = decimal(c.center.real(), 30);
  r.center_im = decimal(c.center.imag(), 30);
  return r;
}

std::vector<ComponentRow> slice_components(const TowerModel& t, int n, const SlicePlane& plane,
                                           const PrecisionContext& ctx, int workers = 1);
/// Roots of P_{n,s} = alpha as rows; conf_radius holds delta_n/|P'|.
std::vector<ComponentRow> slice_roots(const TowerModel& t, const Signature& s, const SlicePlane& plane,
                                      Complex<double> alpha, const PrecisionContext& ctx);
SliceMeasure slice_measure(const TowerModel& t, int n, const SlicePlane& plane, const PrecisionContext& ctx,
                           int workers = 1);
NestingCertificate nesting_certificate(const TowerModel& t, int n, const SlicePlane& plane,
                                       const PrecisionContext& ctx, double K = 4, int workers = 1);
Raster render_escape(const TowerModel& t, const SlicePlane& plane, const RasterSpec& spec, int n_max,
                     const PrecisionContext& ctx, int workers = 1);

std::string components_csv(const std::vector<ComponentRow>& rows, const std::string& config_hash);
std::string measure_csv(const SliceMeasure& m, const std::string& config_hash);
std::string certificate_csv(const NestingCertificate& c, const std::string& config_hash);
std::string raster_pgm(const Raster& r, const std::string& comment);

}  // namespace wermer
