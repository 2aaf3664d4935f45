#pragma once

// Monotone gauge functions and the modulus-of-continuity calculus between
// them. A gauge is stored as coef * r^power * factor(r), where `factor` is a
// slowly varying term. Everything has a log-argument form so that gauges can
// be consulted at radii far below the double exponent range.

#include <string>
#include <utility>
#include <vector>

namespace wermer {

class GaugeFunction {
 public:
  enum class Factor { None, LogPower, LogLog, Piecewise, Table };

  /// Piece of a piecewise log-factor g(L), L = |log r|, valid from `start`
  /// up to the next segment. Plateaus hold `value`; the other kind follows
  /// value + log log L - log log start.
  struct Segment {
    double start = 0;
    double value = 0;
    bool plateau = true;
  };

  /// coef * r^power * |log r|^log_power
  static GaugeFunction power_log(double coef, double power, double log_power = 0);
  /// coef * r^power * log(max(e, |log r|))
  static GaugeFunction power_loglog(double coef, double power);
  /// r^power * exp(g(|log r|)) with g piecewise.
  static GaugeFunction piecewise(double power, std::vector<Segment> segments);
  /// Sampled (r, value) table, interpolated linearly in log-log coordinates.
  static GaugeFunction table(std::vector<std::pair<double, double>> samples);

  double operator()(double r) const;
  /// log of the gauge at r = exp(log_r); valid for log_r < 0 far past underflow.
  double log_at(double log_r) const;

  Factor factor() const { return factor_; }
  double coef() const { return coef_; }
  double power() const { return power_; }
  double log_power() const { return log_power_; }
  double r0() const { return r0_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<std::pair<double, double>>& samples() const { return samples_; }

  /// Same gauge multiplied by r^extra.
  GaugeFunction times_power(double extra) const;

  /// Whether int_0 g(s)/s^2 ds is finite: exact for closed forms, slope
  /// extrapolation for tables.
  bool integrable_against_inverse_square() const;

  std::string describe() const;

 private:
  double log_factor(double L) const;

  Factor factor_ = Factor::None;
  double coef_ = 1;
  double power_ = 0;
  double log_power_ = 0;
  double r0_ = 1;
  std::vector<Segment> segments_;
  std::vector<std::pair<double, double>> samples_;  // (log r, log value), increasing log r
};

/// psi(r) = int_0^{2r} h(s)/s^2 ds + r int_r^1 h(s)/s^3 ds.
/// Closed form for pure powers, adaptive Gauss-Kronrod otherwise.
/// Throws DivergentGauge when int_0 h/s^2 diverges.
double modulus_from_h(const GaugeFunction& h, double r);

/// psi(r)/r for h = r^2 theta(r), evaluated at r = exp(-L) in log form.
double modulus_over_r(const GaugeFunction& h, double L);

/// Piecewise gauge theta_2 <= psi(r)/(r |log r|), decreasing in r and
/// diverging at 0 on its sampled range. Throws GaugeTooWeak when the ratio
/// does not grow on the sampling grid.
GaugeFunction tame_gauge(const GaugeFunction& psi);

struct TameCheck {
  double max_theta_ratio = 0;    // max theta_2 / theta_0 over samples (must be <= 1)
  bool decreasing = true;        // theta_2 nonincreasing in r
  bool diverging = false;        // theta_2 grows across the sampled range
  double max_modulus_ratio = 0;  // max psi_h / psi over samples, h = r^2 theta_2
  std::vector<double> L;         // sample points, L = |log r|
  std::vector<double> modulus_ratio;
};

/// Sampled comparison of theta_2 against psi and of its modulus against psi.
TameCheck check_tamed(const GaugeFunction& psi, const GaugeFunction& theta2);

}  // namespace wermer
