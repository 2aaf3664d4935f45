#pragma once

// Potential-theoretic diagnostics on towers and slices.

#include <string>
#include <vector>

#include "wermer/slicer.hpp"

namespace wermer {

// ---------------------------------------------------------------------------
// Lattice measures nu_k: normalized arc length on the circles of radius 1/k
// centred on Sigma^(k) = (3/k)Z^2 in the closed disk of radius 1 - 1/k.

std::vector<Complex<double>> lattice_sigma(int k);
/// Logarithmic potential of nu_k.
double L_potential(int k, Complex<double> z);
/// nu_k(D(z, r)), exact arc fractions.
double nu_ball_mass(int k, Complex<double> z, double r);

// ---------------------------------------------------------------------------

struct SliceGrid {
  int size = 20;          // size x size points
  double half_width = 0.95;  // w' in [-h, h]^2 restricted to |w'| < 1
};

/// Grid points w' of the slice, row-major, points with |w'| >= 1 dropped.
std::vector<Complex<double>> slice_grid_points(const SliceGrid& g);

struct ConvergenceReport {
  std::vector<int> n;            // step n -> n+1
  std::vector<double> gap;       // grid sup |u_{n+1} - u_n|, a lower bound for the true sup
  std::vector<double> vgap;      // grid sup |v_{n+1} - u_n|
  std::vector<double> bound;     // (|log r_{n+1}| + B) / 2^n with the asserted B
  std::vector<double> ratio;     // gap(n) / gap(n-1), NaN at the first step
  double B = 3;
  double fitted_B = 0;           // smallest B making every gap fit
  double partial_sum = 0;        // sum of gaps
  bool bound_holds = true;
  bool ratios_hold = true;       // ratio <= max_ratio for n >= 1
  double max_ratio = 0.75;
};

ConvergenceReport convergence_report(const TowerModel& t, int n_max, const SlicePlane& plane, const SliceGrid& grid,
                                     const PrecisionContext& ctx, int workers = 1, double B = 3);

struct HarmonicGap {
  int n = 0;
  double max_gap = 0;
  double bound = 0;  // |log r_{n+1}| + log 2
  Complex<double> argmax;
  bool holds = true;
};

/// max over grid and s' of |1/2 log max(|P_{n+1,s'}|, delta_{n+1}) - log max(|P_{n,s} - sigma|, delta_n/m_{n+1})|.
HarmonicGap harmonic_gap_check(const TowerModel& t, int n, const SlicePlane& plane, const SliceGrid& grid,
                               const PrecisionContext& ctx, int workers = 1);
/// The same gap at one point, for one s'.
double harmonic_gap_at(const TowerModel& t, const Signature& s1, Complex<double> z, Complex<double> w,
                       const PrecisionContext& ctx);

// ---------------------------------------------------------------------------
// Circle averages. p = (z, w); zeta a unit vector with |zeta_1| <= |zeta_2|/100.
// The domain is D(0, 4/10) x D.

struct Point2 {
  Complex<double> z;
  Complex<double> w;
};
struct Direction {
  Complex<double> z1{0, 0};
  Complex<double> z2{1, 0};
  /// Unit length and |z1| <= |z2|/100.
  void check() const;
};

double domain_distance(const Point2& p);

struct CircleAverage {
  double T = 0;       // r^-2 (mean of u_n on the circle - u_n(p))
  double error = 0;   // difference between the last two node counts, scaled by r^-2
  int nodes = 0;
};

/// Trapezoidal rule from 256 nodes, doubling until successive values agree.
CircleAverage circle_average_T(const TowerModel& t, int n, const Point2& p, const Direction& zeta, double r,
                               const PrecisionContext& ctx);

struct JensenPair {
  double quadrature = 0;
  double mass_integral = 0;
  double difference = 0;
  int atoms_inside = 0;
};

/// Mass integral r^-2 sum_atoms weight log+(r / d_eff) over the slice through p
/// in direction zeta, from exact roots on that slice. A circle inside a
/// component gets nothing from it. Throws InvalidArgument when the circle
/// crosses a component boundary, where the formula does not apply.
JensenPair jensen_cross_check(const TowerModel& t, int n, const Point2& p, const Direction& zeta, double r,
                              const PrecisionContext& ctx);

struct InteriorSup {
  double interior = 0;
  double band = 0;
  double min_T = 0;  // smallest T seen anywhere
  bool holds = true;
};

/// Interior points have distance >= band to the boundary; band points lie in
/// the shell r < distance < band. Grids: `count` z values times count^2 w values.
InteriorSup interior_sup_check(const TowerModel& t, int n, const Direction& zeta, double r, double band, int count,
                               const PrecisionContext& ctx, int workers = 1);

// ---------------------------------------------------------------------------

struct RadiusRange {
  double lo = 0;
  double hi = 0;
};

struct TwoRegimeReport {
  int n = 0;
  RadiusRange rad_next;   // depth n+1 conformal radii
  RadiusRange rad_int;    // intermediate radii rad_n / m_{n+1}
  RadiusRange rad;        // depth n
  double C_plateau = 0;   // smallest C with mu <= C^n / M_{n+1}^2 on plateau samples
  double C_quadratic = 0; // smallest C with mu <= C^n r^2 / R_n^2 on quadratic samples
  double C = 0;           // max of the two
  int plateau_samples = 0;
  int quadratic_samples = 0;
  bool plateau_quantized = true;  // plateau masses are multiples of the atom weight
  std::vector<MassProfile> profiles;
};

/// Throws ScaleOverlap when rad_{n+1} < rad^int_{n+1} < rad_n fails.
TwoRegimeReport two_regime_check(const TowerModel& t, int n, const SlicePlane& plane, int samples,
                                 const PrecisionContext& ctx, int workers = 1, std::uint64_t seed = 1);

struct DimensionEstimate {
  int depth = 0;
  double count = 0;
  double radius = 0;
  double estimate = 0;
};

std::vector<DimensionEstimate> box_dimension_slice(const TowerModel& t, const SlicePlane& plane,
                                                   const std::vector<int>& depths, const PrecisionContext& ctx,
                                                   int workers = 1);

}  // namespace wermer
