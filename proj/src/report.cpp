#include "lpv/report.hpp"

#include <json.hpp>

#include <algorithm>

namespace lpv {

namespace {

using json = nlohmann::ordered_json;

json abds_json(const AbstractSet& s) { return json(s); }

json verdict_detail(const Verdict& v) {
  json d;
  switch (v.status) {
    case Verdict::Status::pass:
      break;
    case Verdict::Status::response_mismatch:
      d["method"] = v.method;
      d["op"] = to_string(v.op);
      d["key"] = v.key;
      d["concurrent_result"] = v.concurrent_result;
      d["sequential_result"] = v.sequential_result;
      d["pre_lp_abds"] = abds_json(v.pre_lp_abds);
      break;
    case Verdict::Status::abds_mismatch:
      d["method"] = v.method;
      d["op"] = to_string(v.op);
      d["key"] = v.key;
      d["side"] = v.pre_state_mismatch ? "pre" : "post";
      d[v.pre_state_mismatch ? "pre_lp_abds" : "post_lp_abds"] =
          abds_json(v.pre_state_mismatch ? v.pre_lp_abds : v.post_lp_abds);
      d["sequential"] = abds_json(v.sequential_post);
      break;
    case Verdict::Status::assumption_violation:
      d["event_seq"] = v.event_seq;
      d["reason"] = v.reason;
      break;
    case Verdict::Status::rt_violation:
      d["before"] = v.rt_before;
      d["after"] = v.rt_after;
      break;
    case Verdict::Status::no_lp_found:
    case Verdict::Status::multiple_abds_changes:
      d["method"] = v.method;
      d["op"] = to_string(v.op);
      d["key"] = v.key;
      break;
  }
  return d;
}

}  // namespace

bool RunReport::all_pass() const {
  return std::all_of(outcomes.begin(), outcomes.end(),
                     [](const ScheduleOutcome& o) { return o.verdict.pass(); });
}

bool RunReport::any_disagreement() const {
  return std::any_of(outcomes.begin(), outcomes.end(), [](const ScheduleOutcome& o) {
    return o.oracle_linearizable.has_value() && *o.oracle_linearizable != o.verdict.pass();
  });
}

std::string render_report(const RunReport& report) {
  json j;
  j["workload"] = json::parse(workload_to_json_text(report.workload));
  j["schedules_checked"] = report.schedules_checked;

  std::vector<const ScheduleOutcome*> ordered;
  ordered.reserve(report.outcomes.size());
  for (const auto& o : report.outcomes) ordered.push_back(&o);
  std::sort(ordered.begin(), ordered.end(), [](const ScheduleOutcome* a, const ScheduleOutcome* b) {
    return a->schedule_id < b->schedule_id;
  });

  std::uint64_t pass = 0, violations = 0, oracle_checked = 0, oracle_linearizable = 0,
                lp_violation_but_linearizable = 0, disagreements = 0;
  auto verdicts = json::array();
  for (const ScheduleOutcome* o : ordered) {
    json row;
    row["schedule_id"] = o->schedule_id;
    row["status"] = to_string(o->verdict.status);
    json detail = verdict_detail(o->verdict);
    if (!o->anchor_choices.empty()) {
      auto choices = json::array();
      for (const auto& [m, count] : o->anchor_choices)
        choices.push_back({{"method", m}, {"qualifying_adds", count}, {"picked", "latest"}});
      detail["dummy_anchor_choices"] = std::move(choices);
    }
    if (o->oracle_linearizable) row["oracle_linearizable"] = *o->oracle_linearizable;
    if (o->oracle_skipped) row["oracle_skipped"] = true;
    if (!detail.empty()) row["detail"] = std::move(detail);
    verdicts.push_back(std::move(row));

    if (o->verdict.pass())
      ++pass;
    else
      ++violations;
    if (o->oracle_linearizable) {
      ++oracle_checked;
      if (*o->oracle_linearizable) ++oracle_linearizable;
      if (*o->oracle_linearizable != o->verdict.pass()) {
        ++disagreements;
        if (*o->oracle_linearizable) ++lp_violation_but_linearizable;
      }
    }
  }
  j["verdicts"] = std::move(verdicts);

  json summary;
  summary["schedules"] = report.schedules_checked;
  summary["pass"] = pass;
  summary["violations"] = violations;
  if (report.livelocks > 0) summary["livelocks"] = report.livelocks;
  if (oracle_checked > 0) {
    json oracle;
    oracle["checked"] = oracle_checked;
    oracle["linearizable"] = oracle_linearizable;
    oracle["disagreements"] = disagreements;
    // A violation on a history the oracle accepts points at the LP
    // rulebook rather than the structure.
    oracle["lp_violation_but_linearizable"] = lp_violation_but_linearizable;
    summary["oracle"] = std::move(oracle);
  }
  j["summary"] = std::move(summary);
  return j.dump(2) + "\n";
}

}  // namespace lpv
