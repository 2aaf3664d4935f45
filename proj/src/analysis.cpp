#include "wermer/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace wermer {

std::vector<Complex<double>> lattice_sigma(int k) {
  if (k < 1) throw InvalidArgument("lattice measures need k >= 1");
  std::vector<Complex<double>> out;
  const double step = 3.0 / k;
  for (const GridPoint& g : lattice_grid(static_cast<std::uint64_t>(k))) out.emplace_back(step * g.j, step * g.k);
  return out;
}

double L_potential(int k, Complex<double> z) {
  const auto sig = lattice_sigma(k);
  const double rho = 1.0 / k;
  double s = 0;
  for (const auto& c : sig) s += std::log(std::max(std::abs(z - c), rho));
  return s / double(sig.size());
}

namespace {

// Fraction of the circle |x - c| = rho inside the open disk D(z, r).
double arc_fraction(Complex<double> c, double rho, Complex<double> z, double r) {
  const double d = std::abs(z - c);
  if (d + rho <= r) return 1;
  if (d >= rho + r || rho >= d + r) return 0;
  const double cs = (d * d + rho * rho - r * r) / (2 * d * rho);
  return std::acos(std::clamp(cs, -1.0, 1.0)) / std::numbers::pi;
}

}  // namespace

double nu_ball_mass(int k, Complex<double> z, double r) {
  if (!(r > 0)) throw InvalidArgument("nu_ball_mass needs r > 0");
  const auto sig = lattice_sigma(k);
  double s = 0;
  for (const auto& c : sig) s += arc_fraction(c, 1.0 / k, z, r);
  return s / double(sig.size());
}

std::vector<Complex<double>> slice_grid_points(const SliceGrid& g) {
  if (g.size < 1) throw InvalidArgument("slice grid needs at least one point per side");
  std::vector<Complex<double>> out;
  for (int i = 0; i < g.size; ++i)
    for (int j = 0; j < g.size; ++j) {
      const double x = g.size == 1 ? 0 : -g.half_width + 2 * g.half_width * j / (g.size - 1);
      const double y = g.size == 1 ? 0 : g.half_width - 2 * g.half_width * i / (g.size - 1);
      if (std::hypot(x, y) < 1) out.emplace_back(x, y);
    }
  return out;
}

namespace {

double abs_log_r(const TowerModel& t, int n) { return std::abs(t.schedule().r(n).log().convert_to<double>()); }

template <class T>
Complex<T> on_slice_z(const SlicePlane& plane, Complex<double> w) {
  const Complex<double> z = plane.z0 - plane.gamma * w;
  return detail::lift<T>(z);
}

}  // namespace

ConvergenceReport convergence_report(const TowerModel& t, int n_max, const SlicePlane& plane, const SliceGrid& grid,
                                     const PrecisionContext& ctx, int workers, double B) {
  plane.check();
  if (n_max > t.depth()) throw InvalidArgument("convergence report deeper than the tower");
  ConvergenceReport rep;
  rep.B = B;
  if (n_max <= 0) return rep;
  for (int n = 0; n <= n_max; ++n) check_enumeration(t, n);
  const auto pts = slice_grid_points(grid);
  struct Row {
    std::vector<double> u, v;
  };
  const auto rows = with_precision(ctx, [&]<class T>() {
    const auto k = make_constants<T>(t);
    return parallel_map<Row>(pts.size(), workers, [&](std::size_t i) {
      const Complex<T> w = detail::lift<T>(pts[i]);
      const Complex<T> z = on_slice_z<T>(plane, pts[i]);
      Row r;
      for (int n = 0; n <= n_max; ++n) r.u.push_back(to_double(eval_u(k, n, z, w)));
      for (int n = 1; n <= n_max; ++n) r.v.push_back(to_double(eval_v(k, n, z, w)));
      return r;
    });
  });
  rep.fitted_B = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < n_max; ++n) {
    double g = 0, vg = 0;
    for (const Row& r : rows) {
      g = std::max(g, std::abs(r.u[n + 1] - r.u[n]));
      vg = std::max(vg, std::abs(r.v[n] - r.u[n]));
    }
    const double lr = abs_log_r(t, n + 1);
    const double scale = std::ldexp(1.0, -n);
    rep.n.push_back(n);
    rep.gap.push_back(g);
    rep.vgap.push_back(vg);
    rep.bound.push_back((lr + B) * scale);
    rep.fitted_B = std::max(rep.fitted_B, g / scale - lr);
    rep.partial_sum += g;
    if (g > rep.bound.back()) rep.bound_holds = false;
    if (n == 0) {
      rep.ratio.push_back(std::numeric_limits<double>::quiet_NaN());
    } else {
      const double q = rep.gap[n - 1] > 0 ? g / rep.gap[n - 1] : 0;
      rep.ratio.push_back(q);
      if (q > rep.max_ratio) rep.ratios_hold = false;
    }
  }
  return rep;
}

namespace {

template <class T>
double harmonic_gap_point(const TowerConstants<T>& k, int n, const Complex<T>& z, const Complex<T>& w,
                          std::uint64_t* only_parent = nullptr, std::uint32_t only_sigma = 0) {
  const Complex<T> eA = k.eps[n + 1] * anchor_term(k, n + 1, z, w);
  const T& dn1 = k.delta[n + 1];
  const T& clip = k.sub_clip[n];
  double best = 0;
  for_each_leaf(k, n, z, w, [&](std::uint64_t idx, const Complex<T>& p) {
    if (only_parent && idx != *only_parent) return;
    for (std::uint32_t j = 0; j < k.sigma[n + 1].size(); ++j) {
      if (only_parent && j != only_sigma) continue;
      const Complex<T> d = p - k.sigma[n + 1][j];
      const Complex<T> p1 = d * d - eA;
      const T gap = log_max_abs(p1, dn1) / 2 - log_max_abs(d, clip);
      using std::abs;
      best = std::max(best, to_double(abs(gap)));
    }
  });
  return best;
}

}  // namespace

HarmonicGap harmonic_gap_check(const TowerModel& t, int n, const SlicePlane& plane, const SliceGrid& grid,
                               const PrecisionContext& ctx, int workers) {
  plane.check();
  if (n < 0 || n + 1 > t.depth()) throw InvalidArgument("harmonic gap needs depth n+1 in the tower");
  check_enumeration(t, n + 1);
  const auto pts = slice_grid_points(grid);
  const auto gaps = with_precision(ctx, [&]<class T>() {
    const auto k = make_constants<T>(t);
    return parallel_map<double>(pts.size(), workers, [&](std::size_t i) {
      return harmonic_gap_point(k, n, on_slice_z<T>(plane, pts[i]), detail::lift<T>(pts[i]));
    });
  });
  HarmonicGap out;
  out.n = n;
  out.bound = abs_log_r(t, n + 1) + std::log(2.0);
  for (std::size_t i = 0; i < gaps.size(); ++i)
    if (gaps[i] > out.max_gap) {
      out.max_gap = gaps[i];
      out.argmax = pts[i];
    }
  out.holds = out.max_gap <= out.bound;
  return out;
}

double harmonic_gap_at(const TowerModel& t, const Signature& s1, Complex<double> z, Complex<double> w,
                       const PrecisionContext& ctx) {
  const int n = s1.depth() - 1;
  if (n < 0) throw InvalidArgument("harmonic gap needs a signature of depth >= 1");
  Signature parent = s1;
  parent.index.pop_back();
  std::uint64_t pidx = t.index_of(parent);
  return with_precision(ctx, [&]<class T>() {
    const auto k = make_constants<T>(t);
    return harmonic_gap_point(k, n, detail::lift<T>(z), detail::lift<T>(w), &pidx, s1.index.back());
  });
}

// ---------------------------------------------------------------------------

void Direction::check() const {
  const double len = std::sqrt(std::norm(z1) + std::norm(z2));
  if (std::abs(len - 1) > 1e-12) throw InvalidArgument("direction must be a unit vector");
  if (std::abs(z1) > std::abs(z2) / 100) throw InvalidArgument("direction must satisfy |zeta_1| <= |zeta_2|/100");
}

double domain_distance(const Point2& p) { return std::min(0.4 - std::abs(p.z), 1 - std::abs(p.w)); }

namespace {

template <class T>
CircleAverage circle_average_impl(const TowerConstants<T>& k, int n, const Point2& p, const Direction& zeta,
                                  double r) {
  zeta.check();
  if (!(r > 0)) throw InvalidArgument("circle radius must be positive");
  // The circle must stay in D(0,1/2) x D.
  if (!(std::abs(p.z) + r * std::abs(zeta.z1) < 0.5) || !(std::abs(p.w) + r * std::abs(zeta.z2) < 1))
    throw DomainExit("circle of radius " + decimal(r) + " leaves D(0,1/2) x D");
  check_enumeration(*k.model, n);
  const T centre = eval_u(k, n, detail::lift<T>(p.z), detail::lift<T>(p.w));
  auto node = [&](int i, int N) {
    const T th = boost::math::constants::two_pi<T>() * i / N;
    using std::cos;
    using std::sin;
    const Complex<T> e(cos(th), sin(th));
    const Complex<T> z = detail::lift<T>(p.z) + detail::lift<T>(zeta.z1) * e * T(r);
    const Complex<T> w = detail::lift<T>(p.w) + detail::lift<T>(zeta.z2) * e * T(r);
    return eval_u(k, n, z, w);
  };
  int N = 256;
  T sum(0);
  for (int i = 0; i < N; ++i) sum += node(i, N);
  T mean = sum / N;
  CircleAverage out;
  const double r2 = r * r;
  for (;;) {
    T add(0);
    for (int i = 1; i < 2 * N; i += 2) add += node(i, 2 * N);
    sum += add;
    N *= 2;
    const T next = sum / N;
    using std::abs;
    const double diff = to_double(T(abs(next - mean)));
    mean = next;
    out.error = diff / r2;
    if (diff <= 1e-13 * std::max(1.0, std::abs(to_double(mean))) || N >= (1 << 16)) break;
  }
  out.nodes = N;
  out.T = to_double(T(mean - centre)) / r2;
  return out;
}

}  // namespace

CircleAverage circle_average_T(const TowerModel& t, int n, const Point2& p, const Direction& zeta, double r,
                               const PrecisionContext& ctx) {
  return with_precision(ctx, [&]<class T>() {
    const auto k = make_constants<T>(t);
    return circle_average_impl(k, n, p, zeta, r);
  });
}

JensenPair jensen_cross_check(const TowerModel& t, int n, const Point2& p, const Direction& zeta, double r,
                              const PrecisionContext& ctx) {
  zeta.check();
  const Complex<double> gamma = -zeta.z1 / zeta.z2;
  const SlicePlane plane{gamma, p.z + gamma * p.w};
  plane.check_boundary();
  return with_precision(ctx, [&]<class T>() {
    const auto k = make_constants<T>(t);
    JensenPair out;
    out.quadrature = circle_average_impl(k, n, p, zeta, r).T;
    const auto comps = slice_components(k, n, plane, 1, false);
    const Complex<T> pw = detail::lift<T>(p.w);
    const T rw = T(r) * T(std::abs(zeta.z2));  // circle radius in the w' coordinate
    const Complex<T> z0 = detail::lift<T>(plane.z0), g = detail::lift<T>(plane.gamma);
    // Each sublevel set must avoid the circle or contain it; in the second
    // case the circle sits in one component, where that term is constant.
    std::vector<int> hits(t.signature_count(n), 0);
    for (int i = 0; i < 256; ++i) {
      const double th = 2 * std::numbers::pi * i / 256;
      const Complex<T> w = pw + detail::lift<T>(std::polar(1.0, th)) * rw;
      const Complex<T> z = z0 - g * w;
      for_each_leaf(k, n, z, w, [&](std::uint64_t idx, const Complex<T>& v) {
        if (!(norm2(v) > k.delta[n] * k.delta[n])) ++hits[idx];
      });
    }
    std::vector<bool> enclosed(hits.size(), false);
    for (std::size_t idx = 0; idx < hits.size(); ++idx) {
      if (hits[idx] == 0) continue;
      const Signature s = k.model->signature(n, idx);
      if (hits[idx] < 256 || !(detail::cabs(eval_P(k, s, Complex<T>(z0 - g * pw), pw)) < k.delta[n]))
        throw InvalidArgument("jensen circle meets the sublevel set of signature " + s.str());
      enclosed[idx] = true;
    }
    for (const auto& c : comps) {
      using std::abs;
      if (enclosed[c.sig_index]) continue;
      const T d = detail::cabs(Complex<T>(c.center - pw));
      if (abs(T(d - rw)) <= T(1.5) * c.conf_radius)
        throw InvalidArgument("jensen circle passes within 1.5 conformal radii of component " + c.sig.str());
    }
    const double weight = 1.0 / (std::ldexp(1.0, n) * double(t.signature_count(n)));
    T total(0);
    std::uint64_t current = std::numeric_limits<std::uint64_t>::max();
    T pval(0);
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const auto& c = comps[i];
      if (enclosed[c.sig_index]) continue;
      if (c.sig_index != current) {
        current = c.sig_index;
        pval = detail::cabs(eval_P(k, c.sig, Complex<T>(z0 - g * pw), pw));
      }
      T d = detail::cabs(Complex<T>(c.center - pw));
      if (pval < k.delta[n]) {
        // p lies in a component of this signature; the nearest root owns it.
        bool nearest = true;
        for (const auto& o : comps)
          if (o.sig_index == c.sig_index && detail::cabs(Complex<T>(o.center - pw)) < d) nearest = false;
        if (nearest) d = pval > 0 ? T(d * k.delta[n] / pval) : c.conf_radius;
      }
      if (d < rw) {
        using std::log;
        total += T(weight) * log(rw / d);
        ++out.atoms_inside;
      }
    }
    out.mass_integral = to_double(total) / (r * r);
    out.difference = std::abs(out.quadrature - out.mass_integral);
    return out;
  });
}

InteriorSup interior_sup_check(const TowerModel& t, int n, const Direction& zeta, double r, double band, int count,
                               const PrecisionContext& ctx, int workers) {
  zeta.check();
  if (!(band > 0) || band >= 0.4) throw InvalidArgument("band width must lie in (0, 0.4)");
  if (!(r < band)) throw DomainExit("circle radius " + decimal(r) + " exceeds the band width " + decimal(band));
  if (count < 2) throw InvalidArgument("interior grid needs count >= 2");
  std::vector<Point2> interior, shell;
  const double zr = 0.4 - band, wr = (1 - band) / std::sqrt(2.0);
  std::vector<Complex<double>> zs, ws;
  for (int i = 0; i < count; ++i) zs.emplace_back(-zr + 2 * zr * i / (count - 1), 0);
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < count; ++j) ws.emplace_back(-wr + 2 * wr * j / (count - 1), wr - 2 * wr * i / (count - 1));
  for (const auto& z : zs)
    for (const auto& w : ws) interior.push_back({z, w});
  const double mid = (r + band) / 2;
  for (int i = 0; i < count; ++i) {
    const Complex<double> zb = std::polar(0.4 - mid, 2 * std::numbers::pi * (i + 0.5) / count);
    for (const auto& w : ws) shell.push_back({zb, w});
  }
  for (const auto& z : zs)
    for (int a = 0; a < count * count; ++a)
      shell.push_back({z, std::polar(1 - mid, 2 * std::numbers::pi * (a + 0.5) / (count * count))});
  for (const auto& p : interior)
    if (domain_distance(p) < band - 1e-12) throw InvalidArgument("interior grid point inside the band");
  for (const auto& p : shell)
    if (!(domain_distance(p) > r && domain_distance(p) < band)) throw InvalidArgument("band grid point outside the band");
  auto eval = [&](const std::vector<Point2>& pts) {
    return with_precision(ctx, [&]<class T>() {
      const auto k = make_constants<T>(t);
      return parallel_map<double>(pts.size(), workers,
                                  [&](std::size_t i) { return circle_average_impl(k, n, pts[i], zeta, r).T; });
    });
  };
  const auto ti = eval(interior), tb = eval(shell);
  InteriorSup out;
  out.interior = *std::max_element(ti.begin(), ti.end());
  out.band = *std::max_element(tb.begin(), tb.end());
  out.min_T = std::min(*std::min_element(ti.begin(), ti.end()), *std::min_element(tb.begin(), tb.end()));
  out.holds = out.interior <= out.band + 1e-4;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

RadiusRange range_of(const std::vector<ComponentRow>& rows) {
  RadiusRange r{std::numeric_limits<double>::infinity(), 0};
  for (const auto& c : rows) {
    r.lo = std::min(r.lo, c.conf_radius);
    r.hi = std::max(r.hi, c.conf_radius);
  }
  return r;
}

}  // namespace

TwoRegimeReport two_regime_check(const TowerModel& t, int n, const SlicePlane& plane, int samples,
                                 const PrecisionContext& ctx, int workers, std::uint64_t seed) {
  if (n < 1 || n + 1 > t.depth()) throw InvalidArgument("two-regime check needs 1 <= n and depth n+1 in the tower");
  const auto outer = slice_components(t, n, plane, ctx, workers);
  const auto inner = slice_components(t, n + 1, plane, ctx, workers);
  const double m1 = t.schedule().m(n + 1).as<double>();
  TwoRegimeReport rep;
  rep.n = n;
  rep.rad = range_of(outer);
  rep.rad_next = range_of(inner);
  rep.rad_int = {rep.rad.lo / m1, rep.rad.hi / m1};
  if (!(rep.rad_next.hi < rep.rad_int.hi && rep.rad_int.hi < rep.rad.lo))
    throw ScaleOverlap("radii at depths " + std::to_string(n) + " and " + std::to_string(n + 1) +
                       " do not separate: rad_next.hi=" + decimal(rep.rad_next.hi) + " rad_int.hi=" +
                       decimal(rep.rad_int.hi) + " rad.lo=" + decimal(rep.rad.lo));
  SliceMeasure mu;
  mu.depth = n + 1;
  const mp::cpp_int denom = (mp::cpp_int(1) << (n + 1)) * mp::cpp_int(t.signature_count(n + 1));
  for (const auto& c : inner) mu.atoms.push_back({c.center, Rational(mp::cpp_int(1), denom), c.sig_index, c.root});

  std::vector<Complex<double>> centres;
  for (const auto& a : mu.atoms) centres.push_back(a.w);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  for (int i = 0; i < samples; ++i) {
    const auto& c = outer[rng() % outer.size()];
    centres.push_back(c.center + std::polar(c.conf_radius * std::sqrt(U(rng)), 2 * std::numbers::pi * U(rng)));
  }
  std::vector<double> radii;
  const double lo = std::log10(rep.rad_next.lo), hi = std::log10(rep.rad.lo);
  const int steps = std::max(2, static_cast<int>(std::ceil((hi - lo) * 12)));
  for (int i = 0; i <= steps; ++i) radii.push_back(std::pow(10.0, lo + (hi - lo) * i / steps));

  const double M2 = std::exp(2 * t.schedule().log_M[n + 1].convert_to<double>());
  const double R2 = std::exp(2 * t.schedule().log_R[n].convert_to<double>());
  const double inv_n = 1.0 / n;
  for (std::size_t pi = 0; pi < centres.size(); ++pi) {
    MassProfile prof = mass_profile(mu, centres[pi], radii);
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const double r = radii[i];
      const double m = prof.masses[i].convert_to<double>();
      if (r <= rep.rad_int.hi) {
        prof.regimes[i] = "plateau";
        ++rep.plateau_samples;
        rep.C_plateau = std::max(rep.C_plateau, std::pow(m * M2, inv_n));
        if (denominator(Rational(prof.masses[i] * Rational(denom))) != 1) rep.plateau_quantized = false;
      } else {
        prof.regimes[i] = "quadratic";
        ++rep.quadratic_samples;
        rep.C_quadratic = std::max(rep.C_quadratic, std::pow(m * R2 / (r * r), inv_n));
      }
    }
    if (rep.profiles.size() < 8) rep.profiles.push_back(std::move(prof));
  }
  rep.C = std::max(rep.C_plateau, rep.C_quadratic);
  return rep;
}

std::vector<DimensionEstimate> box_dimension_slice(const TowerModel& t, const SlicePlane& plane,
                                                   const std::vector<int>& depths, const PrecisionContext& ctx,
                                                   int workers) {
  std::vector<DimensionEstimate> out;
  for (int n : depths) {
    DimensionEstimate e;
    e.depth = n;
    e.count = std::ldexp(1.0, n) * double(t.signature_count(n));
    const auto rows = slice_components(t, n, plane, ctx, workers);
    std::vector<double> radii;
    for (const auto& c : rows) radii.push_back(c.conf_radius);
    std::nth_element(radii.begin(), radii.begin() + radii.size() / 2, radii.end());
    e.radius = radii[radii.size() / 2];
    e.estimate = n == 0 ? 0 : std::log(e.count) / std::log(1 / e.radius);
    out.push_back(e);
  }
  return out;
}

}  // namespace wermer
