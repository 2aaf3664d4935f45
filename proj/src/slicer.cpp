#include "wermer/slicer.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace wermer {

void SlicePlane::check() const {
  if (std::abs(gamma) > 0.01) throw InvalidArgument("slice plane needs |gamma| <= 1/100, got " + str());
}

void SlicePlane::check_boundary() const {
  check();
  const double a = std::abs(z0);
  if (a < 0.385 || a > 0.495)
    throw InvalidArgument("slice plane z0 outside the annulus 0.385 <= |z0| <= 0.495: " + str());
}

std::string SlicePlane::str() const {
  std::ostringstream os;
  os << std::setprecision(17) << "z0=" << z0.real() << (z0.imag() < 0 ? "" : "+") << z0.imag() << "i gamma="
     << gamma.real() << (gamma.imag() < 0 ? "" : "+") << gamma.imag() << "i";
  return os.str();
}

Rational SliceMeasure::total() const {
  Rational s = 0;
  for (const Atom& a : atoms) s += a.weight;
  return s;
}

MassProfile mass_profile(const SliceMeasure& m, Complex<double> p, const std::vector<double>& radii) {
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0) || (i > 0 && !(radii[i] > radii[i - 1])))
      throw InvalidArgument("mass profile radii must be positive and increasing");
  MassProfile out;
  out.p = p;
  out.radii = radii;
  for (double r : radii) {
    Rational s = 0;
    for (const Atom& a : m.atoms)
      if (std::abs(a.w - p) < r) s += a.weight;
    out.masses.push_back(s);
    out.regimes.push_back("-");
  }
  return out;
}

WindingResult winding_probe(double eps, double r, double delta, int steps) {
  if (!(eps > 0) || !(r > 0) || !(delta > 0)) throw InvalidArgument("winding probe needs positive eps, r, delta");
  if (steps < 360) throw InvalidArgument("winding probe needs at least 360 steps");
  WindingResult out;
  if (delta == eps * r) throw Inconclusive("delta equals eps r; neither case applies");
  if (delta > eps * r) {
    // f = 0 works: |0 - eps zeta| <= eps r < delta.
    out.obstructed = false;
    out.residual = eps * r;
    return out;
  }
  out.obstructed = true;
  out.steps = steps;
  const Complex<double> start = std::sqrt(Complex<double>(eps * r, 0));
  Complex<double> z = start;
  out.min_separation = 2 * std::abs(start);
  for (int i = 1; i <= steps; ++i) {
    const double th = 2 * std::numbers::pi * i / steps;
    const Complex<double> zeta = std::polar(r, th);
    // Critical value -eps zeta stays outside D(0, delta): two components.
    if (!(eps * std::abs(zeta) > delta)) throw Inconclusive("sublevel set became connected");
    const Complex<double> a = std::sqrt(eps * zeta), b = -a;
    const Complex<double> next = std::abs(a - z) <= std::abs(b - z) ? a : b;
    out.max_step = std::max(out.max_step, std::abs(next - z));
    out.min_separation = std::min(out.min_separation, std::abs(a - b));
    z = next;
    if (i % (steps / 8) == 0) out.path.push_back(z);
  }
  // Each step must be short against the gap between the two components.
  if (!(out.max_step < out.min_separation / 4)) throw Inconclusive("continuation steps too coarse");
  out.swapped = std::abs(z + start) < std::abs(z - start);
  return out;
}

std::vector<ComponentRow> slice_components(const TowerModel& t, int n, const SlicePlane& plane,
                                           const PrecisionContext& ctx, int workers) {
  return with_precision(ctx, [&]<class T>() {
    const auto k = make_constants<T>(t);
    std::vector<ComponentRow> rows;
    for (const auto& c : slice_components(k, n, plane, workers)) rows.push_back(to_row(c));
    return rows;
  });
}

std::vector<ComponentRow> slice_roots(const TowerModel& t, const Signature& s, const SlicePlane& plane,
                                      Complex<double> alpha, const PrecisionContext& ctx) {
  return with_precision(ctx, [&]<class T>() {
    const auto k = make_constants<T>(t);
    std::vector<ComponentRow> rows;
    const auto roots = slice_roots(k, s, plane, detail::lift<T>(alpha));
    for (std::size_t r = 0; r < roots.size(); ++r) {
      Component<T> c;
      c.depth = s.depth();
      c.sig_index = t.index_of(s);
      c.sig = s;
      c.root = static_cast<int>(r);
      c.center = roots[r].w;
      c.deriv_mag = detail::cabs(roots[r].deriv);
      c.conf_radius = k.delta[s.depth()] / c.deriv_mag;
      c.iso_radius = roots[r].radius;
      rows.push_back(to_row(c));
    }
    return rows;
  });
}

SliceMeasure slice_measure(const TowerModel& t, int n, const SlicePlane& plane, const PrecisionContext& ctx,
                           int workers) {
  return with_precision(ctx, [&]<class T>() {
    const auto k = make_constants<T>(t);
    return measure_from_components(t, n, slice_components(k, n, plane, workers));
  });
}

NestingCertificate nesting_certificate(const TowerModel& t, int n, const SlicePlane& plane,
                                       const PrecisionContext& ctx, double K, int workers) {
  return with_precision(ctx, [&]<class T>() {
    const auto k = make_constants<T>(t);
    return nesting_certificate(k, n, plane, K, workers);
  });
}

Raster render_escape(const TowerModel& t, const SlicePlane& plane, const RasterSpec& spec, int n_max,
                     const PrecisionContext& ctx, int workers) {
  return with_precision(ctx, [&]<class T>() {
    const auto k = make_constants<T>(t);
    return render_escape(k, plane, spec, n_max, workers);
  });
}

std::string components_csv(const std::vector<ComponentRow>& rows, const std::string& config_hash) {
  CsvWriter w({"depth", "signature", "root", "center_re", "center_im", "deriv_mag", "conf_radius", "iso_radius"},
              config_hash);
  for (const auto& r : rows)
    w.row({std::to_string(r.depth), r.signature, std::to_string(r.root), r.center_re, r.center_im,
           decimal(r.deriv_mag), decimal(r.conf_radius), decimal(r.iso_radius)});
  return w.str();
}

std::string measure_csv(const SliceMeasure& m, const std::string& config_hash) {
  CsvWriter w({"depth", "signature_index", "root", "w_re", "w_im", "weight"}, config_hash);
  w.comment("total=" + m.total().str());
  for (const auto& a : m.atoms)
    w.row({std::to_string(m.depth), std::to_string(a.sig_index), std::to_string(a.root), decimal(a.w.real()),
           decimal(a.w.imag()), a.weight.str()});
  return w.str();
}

std::string certificate_csv(const NestingCertificate& c, const std::string& config_hash) {
  CsvWriter w({"n", "signature", "root", "margin_boundary", "margin_intermediate", "margin_component"}, config_hash);
  w.comment("K=" + decimal(c.K));
  w.comment("min_margin=" + decimal(c.min_margin));
  for (const auto& e : c.entries)
    w.row({std::to_string(c.n), e.signature, std::to_string(e.root), decimal(e.margin_boundary),
           decimal(e.margin_intermediate), decimal(e.margin_component)});
  return w.str();
}

std::string raster_pgm(const Raster& r, const std::string& comment) {
  return pgm16(r.width, r.height, r.pixels, comment);
}

}  // namespace wermer
