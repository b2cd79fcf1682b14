#pragma once

#include "lpv/lp_checker.hpp"
#include "lpv/schedule.hpp"

namespace lpv {

// One checked schedule.  oracle_linearizable is set when cross-checking
// ran, oracle_skipped when the history exceeded the oracle's method cap.
struct ScheduleOutcome {
  std::uint64_t schedule_id = 0;
  Verdict verdict;
  std::optional<bool> oracle_linearizable;
  bool oracle_skipped = false;
  // Dummy-LP anchor choices with more than one qualifying add; the pick
  // (the latest) is recorded per method.
  std::vector<std::pair<MethodId, std::size_t>> anchor_choices;
};

struct RunReport {
  Workload workload;
  std::uint64_t schedules_checked = 0;
  std::uint64_t livelocks = 0;  // branches or runs cut by the retry cap
  std::vector<ScheduleOutcome> outcomes;

  bool all_pass() const;
  bool any_disagreement() const;  // oracle says linearizable differs from verdict.pass()
};

// Deterministic JSON: stable field order, schedules sorted by id.
std::string render_report(const RunReport& report);

}  // namespace lpv
