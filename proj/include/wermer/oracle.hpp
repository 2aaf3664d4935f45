#pragma once

// Reference computations used by the tests and the acceptance suite. Nothing
// here calls into the evaluation code it is meant to check: schedules are
// redone in exact rationals, slice polynomials are expanded coefficient-wise
// and solved through a companion matrix.

#include <cstdint>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "wermer/numeric.hpp"

namespace wermer {
class GaugeFunction;
}

namespace wermer::oracle {

using Rational = mp::cpp_rational;

struct ExactSchedule {
  std::vector<Rational> delta;  // 0..depth
  std::vector<Rational> eps;    // 0..depth, eps[0] = 0
};

/// delta_{n+1} = delta_n^2 r / (4 m^2), eps_{n+1} = delta_n^2 / (2 m^2), delta_0 = 1/2.
ExactSchedule exact_schedule(const std::vector<std::pair<std::int64_t, std::int64_t>>& r,
                             const std::vector<std::uint64_t>& m, int depth);

Real256 to_real(const Rational& q);

/// Grid pairs (j, k) with 9(j^2 + k^2) <= (m-1)^2, j outer, both ascending.
std::vector<std::pair<int, int>> lattice(std::uint64_t m);

/// Coefficients (constant term first) of w' -> P_{n,s}(z0 - gamma w', w') - alpha,
/// built by polynomial arithmetic. `choice[k]` indexes the lattice of step k+1.
std::vector<Complex<Real256>> slice_polynomial(const ExactSchedule& sched, const std::vector<std::uint64_t>& m,
                                               const std::vector<std::size_t>& choice,
                                               const std::vector<Complex<double>>& anchors, Complex<double> z0,
                                               Complex<double> gamma, Complex<Real256> alpha);

/// Roots of a polynomial (constant term first) from its companion matrix.
std::vector<Complex<Real256>> companion_roots(const std::vector<Complex<Real256>>& coeffs);

/// Horner evaluation, used to polish companion roots.
Complex<Real256> horner(const std::vector<Complex<Real256>>& coeffs, const Complex<Real256>& w);

/// Re-check of theta(A^n R_n / M_n) >= (C A)^n / R_n^2 in 256-bit log arithmetic.
bool recheck_gauge_condition(const GaugeFunction& theta, double A, double C,
                             const std::vector<double>& log_r, const std::vector<double>& log2_m);

/// (1/2^n) log delta_n + sum |log r_k| / 2^k from exact rationals (r constant, m == 1).
double drift_from_rationals(std::int64_t p, std::int64_t q, int n);

/// Normalized arc length of the k-grid circles inside D(z, rad), by dense sampling.
double nu_mass_sampled(int k, Complex<double> z, double rad, int samples_per_circle);

}  // namespace wermer::oracle
