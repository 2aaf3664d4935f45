#pragma once

// Commands behind the CLI and the acceptance criteria. Each command returns
// its artifacts in memory (file name -> bytes) plus failure records for every
// asserted bound that does not hold.

#include <map>
#include <string>
#include <vector>

#include "wermer/config.hpp"

namespace wermer {

using ArtifactSet = std::map<std::string, std::string>;

/// One line of key=value pairs: invariant, module, location, measured, bound.
struct FailureRecord {
  std::string invariant;
  std::string module;
  std::string location = "-";
  std::string measured = "-";
  std::string bound = "-";
  std::string str() const;
};

FailureRecord failure_from(const Error& e);

struct CommandResult {
  ArtifactSet artifacts;
  std::vector<std::string> notes;  // human-readable summary lines
  std::vector<FailureRecord> failures;
  bool ok() const { return failures.empty(); }
};

CommandResult cmd_schedule(const RunConfig& c, int workers);
CommandResult cmd_certify(const RunConfig& c, int workers);
CommandResult cmd_roots(const RunConfig& c, int workers);
CommandResult cmd_measure(const RunConfig& c, int workers);
CommandResult cmd_profile(const RunConfig& c, int workers);
CommandResult cmd_converge(const RunConfig& c, int workers);
CommandResult cmd_gauge(const RunConfig& c, int workers);
CommandResult cmd_jensen(const RunConfig& c, int workers);
CommandResult cmd_capacity(const RunConfig& c, int workers);
CommandResult cmd_dimension(const RunConfig& c, int workers);
CommandResult cmd_render(const RunConfig& c, int workers);

/// Artifacts of every command above, merged.
CommandResult all_artifacts(const RunConfig& c, int workers);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  std::string measured = "-";
  std::string bound = "-";
  std::string line() const;  // "PASS 6 measure-regimes: ..."
};

/// Criteria 1..11 on `c`. Criterion 12 compares `artifacts` (made with
/// `workers`) against a second run with 8 workers, or 1 when `workers` is 8.
std::vector<CriterionResult> run_criteria(const RunConfig& c, int workers, const ArtifactSet& artifacts);

/// Criteria plus the artifact set (and suite.txt). A failed criterion is a
/// failure record.
CommandResult cmd_suite(const RunConfig& c, int workers);

/// m extended to `depth` by repeating its last entry.
std::vector<Multiplicity> m_to_depth(const std::vector<Multiplicity>& m, int depth);

}  // namespace wermer
