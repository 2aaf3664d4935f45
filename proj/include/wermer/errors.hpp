#pragma once

#include <stdexcept>
#include <string>

namespace wermer {

/// Base of every failure raised by the library. `invariant()` is the short
/// machine-readable name used in CLI failure records.
class Error : public std::runtime_error {
 public:
  Error(std::string invariant, std::string module, const std::string& what)
      : std::runtime_error(what), invariant_(std::move(invariant)), module_(std::move(module)) {}

  const std::string& invariant() const noexcept { return invariant_; }
  const std::string& module() const noexcept { return module_; }

 private:
  std::string invariant_;
  std::string module_;
};

#define WERMER_DEFINE_ERROR(Name, mod)                                          \
  class Name : public Error {                                                   \
   public:                                                                      \
    explicit Name(const std::string& what, std::string invariant = #Name)       \
        : Error(std::move(invariant), mod, what) {}                             \
  };

WERMER_DEFINE_ERROR(InvalidArgument, "numeric")
WERMER_DEFINE_ERROR(BudgetExceeded, "numeric")
WERMER_DEFINE_ERROR(ContainsZero, "numeric")
WERMER_DEFINE_ERROR(NotOrdinary, "schedule")
WERMER_DEFINE_ERROR(GaugeTooWeak, "analysis")
WERMER_DEFINE_ERROR(EnumerationCapExceeded, "tower")
WERMER_DEFINE_ERROR(RangeError, "slicer")
WERMER_DEFINE_ERROR(Inconclusive, "slicer")
WERMER_DEFINE_ERROR(DivergentGauge, "analysis")
WERMER_DEFINE_ERROR(DomainExit, "analysis")
WERMER_DEFINE_ERROR(ScaleOverlap, "analysis")
WERMER_DEFINE_ERROR(ConfigError, "cli")

#undef WERMER_DEFINE_ERROR

/// est1/est2 (or a structural precondition) fails at step `n`.
class InvalidSchedule : public Error {
 public:
  InvalidSchedule(int n, std::string which, const std::string& what)
      : Error(which, "schedule", what), step_(n) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

/// A certified claim could not be established. `location` names the offending
/// signature or root; `margin` is the best margin seen (negative when violated).
class CertificationFailure : public Error {
 public:
  CertificationFailure(const std::string& what, std::string location, double margin,
                       std::string invariant = "CertificationFailure")
      : Error(std::move(invariant), "slicer", what), location_(std::move(location)), margin_(margin) {}
  const std::string& location() const noexcept { return location_; }
  double margin() const noexcept { return margin_; }

 private:
  std::string location_;
  double margin_;
};

}  // namespace wermer
