#include "wermer/suite.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "wermer/gauge.hpp"
#include "wermer/io.hpp"
#include "wermer/oracle.hpp"

namespace wermer {

namespace {

std::string num(double x) { return decimal(x); }
std::string short_num(double x) { return decimal(x, 6); }

bool ordinary(const std::vector<Multiplicity>& m) {
  for (const auto& x : m)
    if (!(x == Multiplicity(1))) return false;
  return true;
}

std::vector<std::pair<std::int64_t, std::int64_t>> rational_r(const RunConfig& c) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (const auto& r : c.r) {
    if (r.form != RadiusFactor::Form::Rational) throw ConfigError("exact schedule checks need rational radius factors");
    out.push_back({r.num, r.den});
  }
  return out;
}

std::vector<std::uint64_t> m_values(const std::vector<Multiplicity>& m) {
  std::vector<std::uint64_t> out;
  for (const auto& x : m) out.push_back(x.value());
  return out;
}

TowerModel tower_with(const RunConfig& c, std::vector<Multiplicity> m, int depth) {
  return TowerModel(build_schedule(c.r, std::move(m), depth), AnchorSequence(c.seed), depth, c.max_bits);
}

template <class F>
CommandResult guarded(F f) {
  CommandResult r;
  try {
    f(r);
  } catch (const Error& e) {
    r.failures.push_back(failure_from(e));
  } catch (const std::exception& e) {
    r.failures.push_back({"exception", "cli", "-", "-", "-"});
    r.notes.push_back(e.what());
  }
  return r;
}

void merge(CommandResult& into, CommandResult from) {
  for (auto& [k, v] : from.artifacts) into.artifacts[k] = std::move(v);
  for (auto& n : from.notes) into.notes.push_back(std::move(n));
  for (auto& f : from.failures) into.failures.push_back(std::move(f));
}

std::string no_spaces(std::string s) {
  for (auto& ch : s)
    if (ch == ' ') ch = '_';
  return s;
}

// Jensen samples: circles on straight and slightly tilted slices through
// points near the configured plane, half of them centred close to an atom.
struct JensenRow {
  int n = 0;
  Point2 p;
  Direction zeta;
  double r = 0;
  JensenPair value;
};

std::vector<JensenRow> jensen_samples(const RunConfig& c, const TowerModel& t, int count) {
  const auto ctx = t.context(t.depth());
  const int n_top = std::min(2, t.depth());
  std::mt19937_64 rng(c.seed * 7919 + 17);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<JensenRow> out;
  for (int attempt = 0; attempt < 40 * count && static_cast<int>(out.size()) < count; ++attempt) {
    JensenRow row;
    row.n = static_cast<int>(out.size()) % (n_top + 1);
    if (attempt % 2) {
      const double th = std::numbers::pi * U(rng);
      row.zeta = {std::polar(0.005, th), {std::sqrt(1 - 0.005 * 0.005), 0}};
    }
    row.p.z = c.plane.z0 + 0.005 * Complex<double>(U(rng), U(rng));
    row.r = 0.065 + 0.055 * U(rng);
    if (rng() % 2) {
      const auto m = slice_measure(t, row.n, SlicePlane{{0, 0}, row.p.z}, ctx);
      const auto& a = m.atoms[rng() % m.atoms.size()];
      row.p.w = a.w + std::polar(0.25 * row.r * (1 + U(rng)), std::numbers::pi * U(rng));
    } else {
      row.p.w = std::polar(0.45 * std::sqrt(0.5 * (1 + U(rng))), std::numbers::pi * U(rng));
    }
    if (std::abs(row.p.z) + row.r * std::abs(row.zeta.z1) >= 0.5) continue;
    if (std::abs(row.p.w) + row.r * std::abs(row.zeta.z2) >= 1) continue;
    try {
      row.value = jensen_cross_check(t, row.n, row.p, row.zeta, row.r, ctx);
    } catch (const InvalidArgument&) {
      continue;  // circle meets a component
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace

std::string FailureRecord::str() const {
  return "invariant=" + no_spaces(invariant) + " module=" + no_spaces(module) + " location=" + no_spaces(location) +
         " measured=" + no_spaces(measured) + " bound=" + no_spaces(bound);
}

FailureRecord failure_from(const Error& e) {
  FailureRecord f{e.invariant(), e.module()};
  if (const auto* s = dynamic_cast<const InvalidSchedule*>(&e)) f.location = "n=" + std::to_string(s->step());
  if (const auto* cf = dynamic_cast<const CertificationFailure*>(&e)) {
    f.location = cf->location();
    f.measured = short_num(cf->margin());
    f.bound = "0";
  }
  return f;
}

std::vector<Multiplicity> m_to_depth(const std::vector<Multiplicity>& m, int depth) {
  if (m.empty()) throw InvalidArgument("empty multiplicity sequence");
  std::vector<Multiplicity> out = m;
  while (static_cast<int>(out.size()) < depth) out.push_back(out.back());
  return out;
}

// ---------------------------------------------------------------------------

CommandResult cmd_schedule(const RunConfig& c, int) {
  return guarded([&](CommandResult& res) {
    const auto s = make_schedule(c);
    const auto rep = validate_schedule(s);
    const bool ord = ordinary(c.m);
    const std::string warning = rep.tail_converges ? "-" : "tail_diverges";
    CsvWriter w({"n", "r_n", "m_n", "log10_delta", "log10_eps", "log10_R", "log10_M", "tail_partial", "capacity_drift",
                 "warning"},
                config_hash(c));
    w.comment("tail_converges=" + std::string(rep.tail_converges ? "true" : "false"));
    w.comment("tail_bound=" + num(rep.tail_bound));
    w.comment("super_exponential_m=" + std::string(rep.super_exponential_m ? "true" : "false"));
    w.comment("scales_separate=" + std::string(rep.scales_separate ? "true" : "false"));
    const double ln10 = std::log(10.0);
    for (int n = 0; n <= s.depth; ++n) {
      w.row({std::to_string(n), n ? s.r(n).str() : "-", n ? s.m(n).str() : "-", num(to_double(s.log_delta[n]) / ln10),
             n ? num(to_double(s.log_eps[n]) / ln10) : "-", num(to_double(s.log_R[n]) / ln10),
             num(to_double(s.log_M[n]) / ln10), num(rep.tail_partial[n]), ord ? num(capacity_drift(s, n)) : "-",
             warning});
    }
    res.artifacts["schedule.csv"] = w.str();
    res.artifacts["schedule.txt"] = write_schedule(s);
    res.notes.push_back("schedule depth=" + std::to_string(s.depth) + " tail_converges=" +
                        (rep.tail_converges ? "true" : "false (warning)"));
    if (const auto v = check_estimates(s))
      res.failures.push_back({v->which, "schedule", "n=" + std::to_string(v->n), short_num(v->margin), "0"});
  });
}

CommandResult cmd_certify(const RunConfig& c, int workers) {
  return guarded([&](CommandResult& res) {
    const auto s = make_schedule(c);
    if (const auto v = check_estimates(s)) {
      res.failures.push_back({v->which, "schedule", "n=" + std::to_string(v->n), short_num(v->margin), "0"});
      return;
    }
    const auto t = make_tower(c);
    const auto ctx = t.context(t.depth());
    for (int n = 0; n < t.depth(); ++n) {
      const auto cert = nesting_certificate(t, n, c.plane, ctx, 4, workers);
      res.artifacts["certificate_" + std::to_string(n) + ".csv"] = certificate_csv(cert, config_hash(c));
      res.notes.push_back("nesting n=" + std::to_string(n) + " entries=" + std::to_string(cert.entries.size()) +
                          " min_margin=" + short_num(cert.min_margin));
      if (!(cert.min_margin > 0))
        res.failures.push_back({"nesting_margin", "slicer", "n=" + std::to_string(n), short_num(cert.min_margin), "0"});
    }
  });
}

CommandResult cmd_roots(const RunConfig& c, int workers) {
  return guarded([&](CommandResult& res) {
    const auto t = make_tower(c);
    const auto ctx = t.context(t.depth());
    for (int n = 0; n <= t.depth(); ++n) {
      const auto rows = slice_components(t, n, c.plane, ctx, workers);
      res.artifacts["roots_" + std::to_string(n) + ".csv"] = components_csv(rows, config_hash(c));
      res.notes.push_back("roots n=" + std::to_string(n) + " count=" + std::to_string(rows.size()));
    }
  });
}

CommandResult cmd_measure(const RunConfig& c, int workers) {
  return guarded([&](CommandResult& res) {
    const auto t = make_tower(c);
    const auto ctx = t.context(t.depth());
    for (int n = 0; n <= t.depth(); ++n) {
      const auto m = slice_measure(t, n, c.plane, ctx, workers);
      res.artifacts["measure_" + std::to_string(n) + ".csv"] = measure_csv(m, config_hash(c));
      res.notes.push_back("measure n=" + std::to_string(n) + " atoms=" + std::to_string(m.atoms.size()) +
                          " total=" + m.total().str());
      if (m.total() != Rational(1))
        res.failures.push_back({"mass_normalization", "slicer", "n=" + std::to_string(n), m.total().str(), "1"});
    }
  });
}

CommandResult cmd_profile(const RunConfig& c, int workers) {
  return guarded([&](CommandResult& res) {
    const auto t = make_tower(c);
    const auto rep = two_regime_check(t, c.profile_depth, c.plane, c.profile_samples, t.context(t.depth()), workers,
                                      c.seed + 1);
    CsvWriter w({"profile", "p_re", "p_im", "r", "mass", "regime"}, config_hash(c));
    w.comment("n=" + std::to_string(rep.n));
    w.comment("rad_next=" + num(rep.rad_next.lo) + ".." + num(rep.rad_next.hi));
    w.comment("rad_int=" + num(rep.rad_int.lo) + ".." + num(rep.rad_int.hi));
    w.comment("rad=" + num(rep.rad.lo) + ".." + num(rep.rad.hi));
    w.comment("C_plateau=" + num(rep.C_plateau));
    w.comment("C_quadratic=" + num(rep.C_quadratic));
    w.comment("C=" + num(rep.C) + " bound=3");
    w.comment("plateau_samples=" + std::to_string(rep.plateau_samples) +
              " quadratic_samples=" + std::to_string(rep.quadratic_samples));
    for (std::size_t i = 0; i < rep.profiles.size(); ++i) {
      const auto& p = rep.profiles[i];
      for (std::size_t j = 0; j < p.radii.size(); ++j)
        w.row({std::to_string(i), num(p.p.real()), num(p.p.imag()), num(p.radii[j]), p.masses[j].str(), p.regimes[j]});
    }
    res.artifacts["profile.csv"] = w.str();
    res.notes.push_back("two-regime n=" + std::to_string(rep.n) + " C_plateau=" + short_num(rep.C_plateau) +
                        " C_quadratic=" + short_num(rep.C_quadratic));
    const std::string loc = "n=" + std::to_string(rep.n);
    if (!rep.plateau_quantized) res.failures.push_back({"plateau_quantized", "analysis", loc, "false", "true"});
    if (!(rep.C <= 3)) res.failures.push_back({"two_regime_C", "analysis", loc, short_num(rep.C), "3"});
  });
}

CommandResult cmd_converge(const RunConfig& c, int workers) {
  return guarded([&](CommandResult& res) {
    const auto t = make_tower(c);
    const auto ctx = t.context(t.depth());
    const bool ord = ordinary(c.m);
    const auto rep = convergence_report(t, std::min(c.converge_depth, t.depth()), c.plane, c.grid, ctx, workers);
    CsvWriter w({"n", "gap", "vgap", "bound", "ratio"}, config_hash(c));
    w.comment("B=" + num(rep.B) + " fitted_B=" + num(rep.fitted_B));
    w.comment("partial_sum=" + num(rep.partial_sum));
    w.comment(std::string("bound_asserted=") + (ord ? "true" : "false"));
    for (std::size_t i = 0; i < rep.n.size(); ++i)
      w.row({std::to_string(rep.n[i]), num(rep.gap[i]), num(rep.vgap[i]), num(rep.bound[i]), num(rep.ratio[i])});
    res.artifacts["converge.csv"] = w.str();
    res.notes.push_back("convergence steps=" + std::to_string(rep.n.size()) + " fitted_B=" + short_num(rep.fitted_B));
    if (ord && !rep.bound_holds)
      res.failures.push_back({"convergence_bound", "analysis", "-", short_num(rep.fitted_B), short_num(rep.B)});
    if (ord && !rep.ratios_hold)
      res.failures.push_back({"convergence_ratio", "analysis", "-", "-", short_num(rep.max_ratio)});

    CsvWriter h({"n", "max_gap", "bound", "argmax_re", "argmax_im"}, config_hash(c));
    for (int n = 0; n < t.depth(); ++n) {
      const auto g = harmonic_gap_check(t, n, c.plane, SliceGrid{c.harmonic_size, c.grid.half_width}, ctx, workers);
      h.row({std::to_string(n), num(g.max_gap), num(g.bound), num(g.argmax.real()), num(g.argmax.imag())});
      res.notes.push_back("harmonic gap n=" + std::to_string(n) + " max=" + short_num(g.max_gap) +
                          " bound=" + short_num(g.bound));
      if (!g.holds)
        res.failures.push_back(
            {"harmonic_gap", "analysis", "n=" + std::to_string(n), short_num(g.max_gap), short_num(g.bound)});
    }
    res.artifacts["harmonic.csv"] = h.str();
  });
}

CommandResult cmd_gauge(const RunConfig& c, int) {
  return guarded([&](CommandResult& res) {
    const auto h = GaugeFunction::power_log(1, c.gauge_h_power, c.gauge_h_log_power);
    std::vector<std::pair<double, double>> psi;
    CsvWriter w({"r", "psi"}, config_hash(c));
    w.comment("h=" + h.describe());
    for (int k = 48; k >= 2; --k) {
      const double r = std::pow(10.0, -k / 4.0);
      psi.push_back({r, modulus_from_h(h, r)});
      w.row({num(r), num(psi.back().second)});
    }
    res.artifacts["gauge_modulus.csv"] = w.str();
    res.notes.push_back("modulus table rows=" + std::to_string(psi.size()));
    try {
      const auto theta = tame_gauge(GaugeFunction::table(psi));
      CsvWriter t({"r", "theta2"}, config_hash(c));
      for (const auto& [r, v] : psi) t.row({num(r), num(theta(r))});
      res.artifacts["gauge_tame.csv"] = t.str();
    } catch (const GaugeTooWeak&) {
      res.notes.push_back("tame gauge: modulus too weak to tame, no table");
    }
  });
}

CommandResult cmd_jensen(const RunConfig& c, int) {
  return guarded([&](CommandResult& res) {
    const auto t = make_tower(c);
    const auto rows = jensen_samples(c, t, c.jensen_samples);
    CsvWriter w({"n", "p_z_re", "p_z_im", "p_w_re", "p_w_im", "zeta1_re", "zeta1_im", "r", "quadrature",
                 "mass_integral", "difference", "atoms_inside"},
                config_hash(c));
    double worst = 0, min_T = 0;
    for (const auto& r : rows) {
      w.row({std::to_string(r.n), num(r.p.z.real()), num(r.p.z.imag()), num(r.p.w.real()), num(r.p.w.imag()),
             num(r.zeta.z1.real()), num(r.zeta.z1.imag()), num(r.r), num(r.value.quadrature), num(r.value.mass_integral),
             num(r.value.difference), std::to_string(r.value.atoms_inside)});
      worst = std::max(worst, r.value.difference);
      min_T = std::min(min_T, r.value.quadrature);
    }
    res.artifacts["jensen.csv"] = w.str();
    res.notes.push_back("jensen samples=" + std::to_string(rows.size()) + " max_difference=" + short_num(worst));
    if (static_cast<int>(rows.size()) < c.jensen_samples)
      res.failures.push_back({"jensen_samples", "analysis", "-", std::to_string(rows.size()),
                              std::to_string(c.jensen_samples)});
    if (!(worst <= 1e-6)) res.failures.push_back({"jensen_consistency", "analysis", "-", short_num(worst), "1e-06"});
    if (!(min_T >= -1e-8)) res.failures.push_back({"T_nonnegative", "analysis", "-", short_num(min_T), "-1e-08"});
  });
}

CommandResult cmd_capacity(const RunConfig& c, int) {
  return guarded([&](CommandResult& res) {
    const auto s = build_schedule(c.r, {1}, c.capacity_depth);
    CsvWriter w({"n", "capacity_drift"}, config_hash(c));
    double worst = 0;
    for (int n = 0; n <= c.capacity_depth; ++n) {
      const double d = capacity_drift(s, n);
      worst = std::max(worst, std::abs(d));
      w.row({std::to_string(n), num(d)});
    }
    res.artifacts["capacity.csv"] = w.str();
    res.notes.push_back("capacity drift max |drift|=" + short_num(worst));
    if (!(worst <= 2.2)) res.failures.push_back({"capacity_drift", "schedule", "-", short_num(worst), "2.2"});
  });
}

CommandResult cmd_dimension(const RunConfig& c, int workers) {
  return guarded([&](CommandResult& res) {
    const auto t = make_tower(c);
    std::vector<int> depths;
    for (int d : c.dimension_depths)
      if (d <= t.depth()) depths.push_back(d);
      else res.notes.push_back("dimension: depth " + std::to_string(d) + " beyond the tower, skipped");
    const auto est = box_dimension_slice(t, c.plane, depths, t.context(t.depth()), workers);
    CsvWriter w({"depth", "count", "radius", "estimate"}, config_hash(c));
    for (const auto& e : est) {
      w.row({std::to_string(e.depth), num(e.count), num(e.radius), num(e.estimate)});
      res.notes.push_back("dimension n=" + std::to_string(e.depth) + " estimate=" + short_num(e.estimate));
    }
    res.artifacts["dimension.csv"] = w.str();
  });
}

CommandResult cmd_render(const RunConfig& c, int workers) {
  return guarded([&](CommandResult& res) {
    const auto t = make_tower(c);
    const int n_max = std::min(c.raster_depth, t.depth());
    const auto r = render_escape(t, c.plane, c.raster, n_max, t.context(t.depth()), workers);
    res.artifacts["escape.pgm"] = raster_pgm(r, "config_hash=" + config_hash(c) + " " + c.plane.str());
    res.notes.push_back("raster " + std::to_string(r.width) + "x" + std::to_string(r.height) +
                        " depth=" + std::to_string(n_max));
  });
}

CommandResult all_artifacts(const RunConfig& c, int workers) {
  CommandResult out;
  for (auto f : {cmd_schedule, cmd_certify, cmd_roots, cmd_measure, cmd_profile, cmd_converge, cmd_gauge, cmd_jensen,
                 cmd_capacity, cmd_dimension, cmd_render})
    merge(out, f(c, workers));
  return out;
}

// ---------------------------------------------------------------------------
// Criteria.

std::string CriterionResult::line() const {
  return std::string(pass ? "PASS" : "FAIL") + " " + std::to_string(id) + " " + name + ": " + detail;
}

namespace {

template <class F>
CriterionResult criterion(int id, std::string name, F f) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  try {
    f(r);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail += (r.detail.empty() ? "" : "; ") + std::string("error: ") + e.what();
  }
  return r;
}

CriterionResult c1_schedule(const RunConfig& c) {
  return criterion(1, "schedule-exactness", [&](CriterionResult& r) {
    const int D = std::max(2, c.depth);
    const auto m = m_to_depth(c.m, D);
    const auto s = build_schedule(c.r, m, D);
    const auto ex = oracle::exact_schedule(rational_r(c), m_values(m), D);
    double worst = 0;
    for (int n = 1; n <= D; ++n) {
      for (const auto& [lg, q] : {std::pair{s.log_delta[n], ex.delta[n]}, std::pair{s.log_eps[n], ex.eps[n]}}) {
        const Real256 exact = oracle::to_real(q);
        worst = std::max(worst, to_double(Real256(abs((exp(Real256(lg)) - exact) / exact))));
      }
    }
    const auto s6 = build_schedule(c.r, m_to_depth(c.m, 6), 6);
    const auto v = check_estimates(s6);
    r.pass = worst <= 1e-25 && !v;
    r.measured = short_num(worst);
    r.bound = "1e-25";
    r.detail = "delta_1=" + ex.delta[1].str() + " eps_1=" + ex.eps[1].str() + " delta_2=" + ex.delta[2].str() +
               " max_rel_err=" + short_num(worst) + " estimates_n<=6=" + (v ? v->which + "@" + std::to_string(v->n) : "ok");
  });
}

CriterionResult c2_roots(const RunConfig& c) {
  return criterion(2, "covering-degree", [&](CriterionResult& r) {
    const auto m = m_to_depth(c.m, 3);
    const auto t = tower_with(c, m, 3);
    const auto k = make_constants<Real256>(t);
    const auto ex = oracle::exact_schedule(rational_r(c), m_values(m), 3);
    std::vector<Complex<double>> anchors;
    for (int n = 1; n <= 3; ++n) anchors.push_back(t.anchors()(n));
    std::mt19937_64 rng(c.seed + 11);
    std::uniform_real_distribution<double> U(-1, 1);
    double worst = 0;
    int checked = 0;
    bool counts_ok = true;
    for (int n = 1; n <= 3; ++n) {
      for (int a = 0; a < 8; ++a) {
        double x, y;
        do {
          x = U(rng);
          y = U(rng);
        } while (x * x + y * y >= 1);
        const Complex<Real256> alpha = Complex<Real256>(Real256(x), Real256(y)) * Real256(1.9) * k.delta[n];
        const Signature s = t.signature(n, rng() % t.signature_count(n));
        const auto roots = slice_roots(k, s, c.plane, alpha);  // certified and pairwise disjoint
        if (roots.size() != (std::size_t{1} << n)) counts_ok = false;
        std::vector<std::size_t> choice(s.index.begin(), s.index.end());
        const auto poly = oracle::slice_polynomial(ex, m_values(m), choice, anchors, c.plane.z0, c.plane.gamma, alpha);
        for (const auto& ref : oracle::companion_roots(poly)) {
          Real256 best = -1;
          for (const auto& x : roots) {
            const Real256 d = abs(Complex<Real256>(x.w - ref));
            if (best < 0 || d < best) best = d;
          }
          worst = std::max(worst, to_double(Real256(best / abs(ref))));
        }
        ++checked;
      }
    }
    r.pass = counts_ok && worst <= 1e-20;
    r.measured = short_num(worst);
    r.bound = "1e-20";
    r.detail = "cases=" + std::to_string(checked) + " root_counts=" + (counts_ok ? "2^n" : "wrong") +
               " max_companion_mismatch=" + short_num(worst);
  });
}

CriterionResult c3_nesting(const RunConfig& c, int workers) {
  return criterion(3, "nesting", [&](CriterionResult& r) {
    const auto t = make_tower(c);
    const auto ctx = t.context(t.depth());
    double lo = 1;
    std::string margins;
    for (int n = 0; n <= 1 && n < t.depth(); ++n) {
      const auto cert = nesting_certificate(t, n, c.plane, ctx, 4, workers);
      lo = std::min(lo, cert.min_margin);
      margins += " n" + std::to_string(n) + "_min_margin=" + short_num(cert.min_margin);
    }
    ScheduleOptions bad;
    bad.verify = false;
    bad.delta_log_offset[2] = std::log(1e6);
    const int D = std::max(2, c.depth);
    const TowerModel corrupt(build_schedule(c.r, m_to_depth(c.m, D), D, bad), AnchorSequence(c.seed), D, c.max_bits);
    bool control = false;
    try {
      nesting_certificate(corrupt, 1, c.plane, corrupt.context(D), 4, workers);
    } catch (const CertificationFailure&) {
      control = true;
    }
    const bool flagged = check_estimates(corrupt.schedule()).has_value();
    r.pass = lo > 0 && control && flagged && t.depth() >= 2;
    r.measured = short_num(lo);
    r.bound = "0";
    r.detail = margins.substr(margins.empty() ? 0 : 1) + " negative_control=" + (control && flagged ? "rejected" : "accepted");
  });
}

CriterionResult c4_convergence(const RunConfig& c, int workers) {
  return criterion(4, "convergence-rate", [&](CriterionResult& r) {
    const auto t = tower_with(c, {1}, 4);
    const auto rep = convergence_report(t, 4, c.plane, c.grid, t.context(4), workers);
    r.pass = rep.bound_holds && rep.ratios_hold && rep.gap.size() == 4;
    std::string gaps, ratios;
    double max_ratio = 0;
    for (std::size_t i = 0; i < rep.gap.size(); ++i) {
      gaps += (i ? "," : "") + short_num(rep.gap[i]);
      if (i) max_ratio = std::max(max_ratio, rep.ratio[i]);
    }
    r.measured = short_num(max_ratio);
    r.bound = "0.75";
    r.detail = "gaps=" + gaps + " fitted_B=" + short_num(rep.fitted_B) + " max_ratio=" + short_num(max_ratio);
  });
}

CriterionResult c5_harmonic(const RunConfig& c, int workers) {
  return criterion(5, "harmonic-gap", [&](CriterionResult& r) {
    const auto t = make_tower(c);
    const auto ctx = t.context(t.depth());
    r.pass = t.depth() >= 2;
    for (int n = 0; n <= 1 && n < t.depth(); ++n) {
      const auto g = harmonic_gap_check(t, n, c.plane, SliceGrid{c.harmonic_size, c.grid.half_width}, ctx, workers);
      r.pass = r.pass && g.holds;
      r.detail += (n ? " " : "") + std::string("n") + std::to_string(n) + "_max=" + short_num(g.max_gap) +
                  "/" + short_num(g.bound);
    }
    r.detail += " grid=" + std::to_string(c.harmonic_size) + "x" + std::to_string(c.harmonic_size);
  });
}

CriterionResult c6_measure(const RunConfig& c, int workers) {
  return criterion(6, "measure-regimes", [&](CriterionResult& r) {
    const auto t3 = tower_with(c, m_to_depth(c.m, 3), 3);
    const auto ctx3 = t3.context(3);
    bool totals = true;
    for (int n = 0; n <= 3; ++n) totals = totals && slice_measure(t3, n, c.plane, ctx3, workers).total() == Rational(1);
    const auto t = make_tower(c);
    const auto rep = two_regime_check(t, 1, c.plane, c.profile_samples, t.context(t.depth()), workers, c.seed + 1);
    r.pass = totals && rep.plateau_quantized && rep.C <= 3;
    r.measured = short_num(rep.C);
    r.bound = "3";
    r.detail = std::string("totals_n<=3=") + (totals ? "1" : "not 1") +
               " plateau_multiples_of_atom=" + (rep.plateau_quantized ? "yes" : "no") +
               " C_plateau=" + short_num(rep.C_plateau) + " C_quadratic=" + short_num(rep.C_quadratic) +
               " C=" + short_num(rep.C) + " (bound 3)";
  });
}

CriterionResult c7_lattice(const RunConfig& c) {
  return criterion(7, "lattice-uniformity", [&](CriterionResult& r) {
    std::mt19937_64 rng(c.seed + 5);
    std::uniform_real_distribution<double> U(0, 1);
    std::vector<Complex<double>> zs;
    for (int i = 0; i < 2000; ++i) zs.push_back(std::polar(std::sqrt(U(rng)), 2 * std::numbers::pi * U(rng)));
    double small = 0, all = 0;
    for (int k : {1, 2, 4, 8, 16, 32, 64})
      for (const auto& z : zs) {
        const double v = std::abs(L_potential(k, z));
        all = std::max(all, v);
        if (k <= 2) small = std::max(small, v);
      }
    double ratio = 0;
    for (int i = 0; i < 1000; ++i) {
      const int k = 1 << (rng() % 7);
      const Complex<double> z = std::polar(std::sqrt(U(rng)), 2 * std::numbers::pi * U(rng));
      const double rad = std::pow(10.0, -3 + 3.5 * U(rng));
      ratio = std::max(ratio, nu_ball_mass(k, z, rad) / rad);
    }
    r.pass = all - small <= 0.5 && ratio <= 6;
    r.measured = short_num(all - small);
    r.bound = "0.5";
    r.detail = "L_excess=" + short_num(all - small) + " max_nu_over_r=" + short_num(ratio) + " (bound 6)";
  });
}

CriterionResult c8_gauge() {
  return criterion(8, "gauge-calculus", [&](CriterionResult& r) {
    double e2 = 0, e32 = 0;
    for (int k = 1; k <= 24; ++k) {
      const double x = std::pow(10.0, -k / 2.0);
      e2 = std::max(e2, std::abs(modulus_from_h(GaugeFunction::power_log(1, 2), x) - (2 * x + x * -std::log(x))));
      const double want = 2 * std::sqrt(2.0) * std::sqrt(x) + 2 * std::sqrt(x) - 2 * x;
      e32 = std::max(e32, std::abs(modulus_from_h(GaugeFunction::power_log(1, 1.5), x) - want));
    }
    bool rejected = false;
    try {
      modulus_from_h(GaugeFunction::power_log(1, 1), 0.1);
    } catch (const DivergentGauge&) {
      rejected = true;
    }
    r.pass = e2 <= 1e-12 && e32 <= 1e-12 && rejected;
    r.measured = short_num(std::max(e2, e32));
    r.bound = "1e-12";
    r.detail = "err_h=s^2:" + short_num(e2) + " err_h=s^1.5:" + short_num(e32) +
               " h=s:" + (rejected ? "divergent" : "accepted");
  });
}

CriterionResult c9_jensen(const RunConfig& c) {
  return criterion(9, "jensen", [&](CriterionResult& r) {
    const auto t = make_tower(c);
    const auto rows = jensen_samples(c, t, 20);
    double worst = 0, min_T = 0;
    int with_atoms = 0;
    for (const auto& x : rows) {
      worst = std::max(worst, x.value.difference);
      min_T = std::min(min_T, x.value.quadrature);
      with_atoms += x.value.atoms_inside > 0;
    }
    r.pass = rows.size() == 20 && worst <= 1e-6 && min_T >= -1e-8;
    r.measured = short_num(worst);
    r.bound = "1e-06";
    r.detail = "samples=" + std::to_string(rows.size()) + " with_atoms=" + std::to_string(with_atoms) +
               " max_difference=" + short_num(worst) + " min_T=" + short_num(min_T);
  });
}

CriterionResult c10_capacity() {
  return criterion(10, "capacity-drift", [&](CriterionResult& r) {
    const auto s = build_schedule({RadiusFactor::rational(1, 10)}, {1}, 12);
    double worst = 0, mismatch = 0;
    std::string first;
    for (int n = 0; n <= 12; ++n) {
      const double d = capacity_drift(s, n);
      worst = std::max(worst, std::abs(d));
      // Hand derivation: drift_n = log(1/2) - log 4 (1 - 2^-n).
      const double hand = -std::log(2.0) - std::log(4.0) * (1 - std::ldexp(1.0, -n));
      mismatch = std::max({mismatch, std::abs(d - hand), std::abs(d - oracle::drift_from_rationals(1, 10, n))});
      if (n >= 1 && n <= 3) first += short_num(d) + ",";
    }
    const double last = capacity_drift(s, 12);
    r.pass = worst <= 2.2 && mismatch <= 1e-3 && std::abs(last + std::log(8.0)) <= 1e-3;
    r.measured = short_num(worst);
    r.bound = "2.2";
    r.detail = "drift=" + first + "...," + short_num(last) + " max_abs=" + short_num(worst) +
               " max_mismatch=" + short_num(mismatch);
  });
}

CriterionResult c11_winding() {
  return criterion(11, "winding", [&](CriterionResult& r) {
    const auto a = winding_probe(1, 0.1, 0.05);
    const auto b = winding_probe(1, 0.1, 0.11);
    r.pass = a.obstructed && a.swapped && !b.obstructed && b.residual <= 0.1 + 1e-15 && b.residual < 0.11;
    r.detail = std::string("(1,0.1,0.05)=") + (a.obstructed ? "Obstructed" : "Selection") +
               (a.swapped ? " swapped" : " no-swap") + " (1,0.1,0.11)=" + (b.obstructed ? "Obstructed" : "Selection") +
               " residual=" + short_num(b.residual);
  });
}

CriterionResult c12_determinism(const RunConfig& c, int workers, const ArtifactSet& artifacts) {
  return criterion(12, "determinism", [&](CriterionResult& r) {
    const int other = workers == 8 ? 1 : 8;
    const auto again = all_artifacts(c, other).artifacts;
    std::string differ;
    for (const auto& [name, bytes] : artifacts) {
      const auto it = again.find(name);
      if (it == again.end() || it->second != bytes) differ += (differ.empty() ? "" : ",") + name;
    }
    for (const auto& [name, bytes] : again)
      if (!artifacts.count(name)) differ += (differ.empty() ? "" : ",") + name;
    r.pass = differ.empty() && !artifacts.empty();
    r.detail = "workers " + std::to_string(std::min(workers, other)) + " vs " + std::to_string(std::max(workers, other)) + ": " +
               std::to_string(artifacts.size()) + " artifacts, " + (differ.empty() ? "identical" : "differ: " + differ);
  });
}

}  // namespace

std::vector<CriterionResult> run_criteria(const RunConfig& c, int workers, const ArtifactSet& artifacts) {
  return {c1_schedule(c),         c2_roots(c),          c3_nesting(c, workers), c4_convergence(c, workers),
          c5_harmonic(c, workers), c6_measure(c, workers), c7_lattice(c),          c8_gauge(),
          c9_jensen(c),           c10_capacity(),       c11_winding(),          c12_determinism(c, workers, artifacts)};
}

CommandResult cmd_suite(const RunConfig& c, int workers) {
  CommandResult out = all_artifacts(c, workers);
  const auto crit = run_criteria(c, workers, out.artifacts);
  std::ostringstream os;
  os << "# config_hash=" << config_hash(c) << '\n';
  for (const auto& r : crit) {
    os << r.line() << '\n';
    out.notes.push_back(r.line());
    if (!r.pass)
      out.failures.push_back({r.name, "suite", "criterion=" + std::to_string(r.id), r.measured, r.bound});
  }
  out.artifacts["suite.txt"] = os.str();
  return out;
}

}  // namespace wermer
