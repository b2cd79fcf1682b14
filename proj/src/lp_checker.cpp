#include "lpv/lp_checker.hpp"

#include <algorithm>
#include <sstream>

#include "lpv/hoh_list.hpp"
#include "lpv/lazy_list.hpp"

namespace lpv {

const char* to_string(LpRule r) {
  switch (r) {
    case LpRule::add_true_publish: return "add-true-publish";
    case LpRule::add_false_check_read: return "add-false-check-read";
    case LpRule::remove_true_mark: return "remove-true-mark";
    case LpRule::remove_true_unlink: return "remove-true-unlink";
    case LpRule::remove_false_check_read: return "remove-false-check-read";
    case LpRule::contains_true_marked_read: return "contains-true-marked-read";
    case LpRule::contains_false_final_read: return "contains-false-final-read";
    case LpRule::contains_false_dummy: return "contains-false-dummy";
    case LpRule::contains_true_check_read: return "contains-true-check-read";
    case LpRule::contains_false_check_read: return "contains-false-check-read";
  }
  return "?";
}

const char* to_string(Verdict::Status s) {
  switch (s) {
    case Verdict::Status::pass: return "pass";
    case Verdict::Status::response_mismatch: return "response-mismatch";
    case Verdict::Status::abds_mismatch: return "abds-mismatch";
    case Verdict::Status::assumption_violation: return "assumption-violation";
    case Verdict::Status::rt_violation: return "rt-violation";
    case Verdict::Status::no_lp_found: return "no-lp-found";
    case Verdict::Status::multiple_abds_changes: return "multiple-abds-changes";
  }
  return "?";
}

const LpEntry* LpAssignment::find(MethodId m) const {
  for (const auto& e : entries)
    if (e.method == m) return &e;
  return nullptr;
}

namespace {

LpRule own_rule(Family family, OpKind kind, bool result) {
  switch (kind) {
    case OpKind::add:
      return result ? LpRule::add_true_publish : LpRule::add_false_check_read;
    case OpKind::remove:
      if (result)
        return family == Family::lazy ? LpRule::remove_true_mark : LpRule::remove_true_unlink;
      return LpRule::remove_false_check_read;
    case OpKind::contains:
      if (family == Family::lazy)
        return result ? LpRule::contains_true_marked_read : LpRule::contains_false_final_read;
      return result ? LpRule::contains_true_check_read : LpRule::contains_false_check_read;
  }
  return LpRule::add_true_publish;
}

}  // namespace

LpAssignment assign_lps(const Execution& ex, Mutation mutation, const AbdsTimeline& timeline) {
  const std::vector<MethodRecord> methods = collect_methods(ex);
  const std::vector<MethodCandidates> candidates =
      ex.family == Family::lazy ? lazy_candidate_lp_markers(ex, mutation)
                                : hoh_candidate_lp_markers(ex, mutation);

  LpAssignment out;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const MethodRecord& m = methods[i];
    if (!m.complete())
      throw MalformedExecution("assign_lps requires a complete execution; method " +
                               std::to_string(m.id) + " is pending");
    const MethodCandidates& c = candidates[i];

    // A method may own at most one abstract-set change (its LP).
    std::size_t changes = 0;
    for (std::size_t s = 0; s < ex.events.size(); ++s)
      if (ex.events[s].method == m.id && timeline.changes_at(s)) ++changes;
    if (changes > 1) {
      out.multiple_abds_changes.push_back(m.id);
      continue;
    }

    LpEntry entry;
    entry.method = m.id;
    if (!c.anchors.empty()) {
      // Dummy rule: linearize just before the latest qualifying
      // concurrent add(key,true) publish write.
      const std::uint32_t anchor = c.anchors.back();
      entry.pos = LpPos{anchor, true, m.inv_seq};
      entry.rule = LpRule::contains_false_dummy;
      entry.anchor_method = ex.events[anchor].method;
      entry.anchor_candidates = c.anchors.size();
      assert(m.inv_seq < anchor && anchor < *m.resp_seq);
    } else if (c.own) {
      entry.pos = LpPos{*c.own, false, 0};
      entry.rule = own_rule(ex.family, m.kind, *m.result);
      assert(m.inv_seq < *c.own && *c.own < *m.resp_seq);
    } else {
      out.no_lp.push_back(m.id);
      continue;
    }
    out.entries.push_back(entry);
  }
  return out;
}

std::optional<AssumptionViolation> check_assumption_abds(const Execution& ex,
                                                         const LpAssignment& lps,
                                                         const AbdsTimeline& timeline) {
  std::vector<bool> is_lp(ex.events.size(), false);
  for (const LpEntry& e : lps.entries)
    if (!e.pos.dummy) is_lp[e.pos.seq] = true;
  for (std::size_t i = 0; i < ex.events.size(); ++i) {
    if (!timeline.changes_at(i)) continue;
    if (!is_lp[i]) {
      AssumptionViolation v;
      v.event_seq = static_cast<std::uint32_t>(i);
      v.reason = "abstract set changed at a non-LP event (" + to_string(timeline.before(i)) +
                 " -> " + to_string(timeline.after[i]) + ")";
      return v;
    }
  }
  return std::nullopt;
}

CsReplay construct_cs(const Execution& ex, const LpAssignment& lps, const AbdsTimeline& timeline) {
  const std::vector<MethodRecord> methods = collect_methods(ex);

  CsReplay cs;
  cs.initial = timeline.initial;
  for (const LpEntry& e : lps.entries) {
    CsMethod cm;
    for (const MethodRecord& m : methods)
      if (m.id == e.method) cm.record = m;
    cm.lp = e;
    if (e.pos.dummy) {
      // The dummy sits just before the anchored write; it changes nothing.
      cm.pre_lp_abds = timeline.before(e.pos.seq);
      cm.post_lp_abds = cm.pre_lp_abds;
    } else {
      cm.pre_lp_abds = timeline.before(e.pos.seq);
      cm.post_lp_abds = timeline.after[e.pos.seq];
    }
    cs.ordered.push_back(std::move(cm));
  }
  std::sort(cs.ordered.begin(), cs.ordered.end(),
            [](const CsMethod& a, const CsMethod& b) { return a.lp.pos < b.lp.pos; });

  AbstractSet state = cs.initial;
  for (CsMethod& cm : cs.ordered) {
    cm.seq_step = seq_apply(state, SeqOp{cm.record.kind, cm.record.key});
    state = cm.seq_step.post;
  }
  return cs;
}

std::string Verdict::summary() const {
  std::ostringstream os;
  os << to_string(status);
  switch (status) {
    case Status::pass:
      break;
    case Status::response_mismatch:
      os << ": " << to_string(op) << "(" << key << ") method " << method << " returned "
         << (concurrent_result ? "true" : "false") << " but the sequential replay gives "
         << (sequential_result ? "true" : "false") << " from pre-LP abds "
         << to_string(pre_lp_abds);
      break;
    case Status::abds_mismatch:
      os << ": " << to_string(op) << "(" << key << ") method " << method << " "
         << (pre_state_mismatch ? "pre" : "post") << "-LP abds "
         << to_string(pre_state_mismatch ? pre_lp_abds : post_lp_abds)
         << " differs from sequential " << to_string(sequential_post);
      break;
    case Status::assumption_violation:
      os << ": event " << event_seq << ": " << reason;
      break;
    case Status::rt_violation:
      os << ": method " << rt_before << " responded before method " << rt_after
         << " was invoked, but the LP order swaps them";
      break;
    case Status::no_lp_found:
      os << ": no LP rule matched method " << method;
      break;
    case Status::multiple_abds_changes:
      os << ": method " << method << " changed the abstract set more than once";
      break;
  }
  return os.str();
}

Verdict check_equivalence(const History& h, const CsReplay& cs) {
  Verdict v;
  for (const CsMethod& cm : cs.ordered) {
    v.method = cm.record.id;
    v.op = cm.record.kind;
    v.key = cm.record.key;
    if (cm.pre_lp_abds != cm.seq_step.pre) {
      v.status = Verdict::Status::abds_mismatch;
      v.pre_state_mismatch = true;
      v.pre_lp_abds = cm.pre_lp_abds;
      v.sequential_post = cm.seq_step.pre;
      return v;
    }
    if (*cm.record.result != cm.seq_step.result) {
      v.status = Verdict::Status::response_mismatch;
      v.concurrent_result = *cm.record.result;
      v.sequential_result = cm.seq_step.result;
      v.pre_lp_abds = cm.pre_lp_abds;
      return v;
    }
    if (cm.post_lp_abds != cm.seq_step.post) {
      v.status = Verdict::Status::abds_mismatch;
      v.post_lp_abds = cm.post_lp_abds;
      v.sequential_post = cm.seq_step.post;
      return v;
    }
  }

  // LP order must extend the real-time order.
  std::vector<std::size_t> cs_pos;
  auto position = [&](MethodId id) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < cs.ordered.size(); ++i)
      if (cs.ordered[i].record.id == id) return i;
    return std::nullopt;
  };
  for (const auto& [x, y] : h.rt_order) {
    auto px = position(h.methods[x].id);
    auto py = position(h.methods[y].id);
    if (!px || !py) continue;
    if (*px >= *py) {
      Verdict r;
      r.status = Verdict::Status::rt_violation;
      r.rt_before = h.methods[x].id;
      r.rt_after = h.methods[y].id;
      return r;
    }
  }
  return Verdict{};
}

CheckResult check_execution(const Execution& ex, Mutation mutation, const AbstractSet& initial) {
  CheckResult res;
  const AbdsTimeline timeline = AbdsTimeline::build(ex, initial);
  res.lps = assign_lps(ex, mutation, timeline);

  const std::vector<MethodRecord> methods = collect_methods(ex);
  auto fill_method = [&](Verdict& v, MethodId id) {
    v.method = id;
    for (const MethodRecord& m : methods)
      if (m.id == id) {
        v.op = m.kind;
        v.key = m.key;
      }
  };
  if (!res.lps.multiple_abds_changes.empty()) {
    res.verdict.status = Verdict::Status::multiple_abds_changes;
    fill_method(res.verdict, res.lps.multiple_abds_changes.front());
    return res;
  }
  if (auto av = check_assumption_abds(ex, res.lps, timeline)) {
    res.verdict.status = Verdict::Status::assumption_violation;
    res.verdict.event_seq = av->event_seq;
    res.verdict.reason = av->reason;
    return res;
  }
  if (!res.lps.no_lp.empty()) {
    res.verdict.status = Verdict::Status::no_lp_found;
    fill_method(res.verdict, res.lps.no_lp.front());
    return res;
  }

  res.cs = construct_cs(ex, res.lps, timeline);
  res.verdict = check_equivalence(derive_history(ex), res.cs);
  return res;
}

Execution materialize_dummies(const Execution& ex, const LpAssignment& lps) {
  // Dummies anchored at the same write keep their invocation order.
  std::vector<const LpEntry*> dummies;
  for (const LpEntry& e : lps.entries)
    if (e.pos.dummy) dummies.push_back(&e);
  std::sort(dummies.begin(), dummies.end(),
            [](const LpEntry* a, const LpEntry* b) { return a->pos < b->pos; });

  Execution out;
  out.family = ex.family;
  std::size_t d = 0;
  for (const Event& e : ex.events) {
    while (d < dummies.size() && dummies[d]->pos.seq == e.seq) {
      Event dummy;
      dummy.kind = EventKind::dummy;
      dummy.method = dummies[d]->method;
      dummy.anchor = static_cast<std::uint32_t>(out.events.size() + 1);
      for (const Event& o : ex.events)
        if (o.method == dummies[d]->method && o.kind == EventKind::inv) dummy.thread = o.thread;
      dummy.seq = static_cast<std::uint32_t>(out.events.size());
      out.events.push_back(dummy);
      ++d;
    }
    out.events.push_back(e);
    out.events.back().seq = static_cast<std::uint32_t>(out.events.size() - 1);
  }
  // Anchors point at the event right after the dummy; fix up after
  // renumbering (insertions shift later anchors).
  for (std::size_t i = 0; i < out.events.size(); ++i)
    if (out.events[i].kind == EventKind::dummy)
      out.events[i].anchor = static_cast<std::uint32_t>(i + 1);
  return out;
}

std::vector<MethodEffect> method_effects(const CsReplay& cs) {
  std::vector<MethodEffect> out;
  for (const CsMethod& cm : cs.ordered) {
    MethodEffect t;
    t.method = cm.record.id;
    t.kind = cm.record.kind;
    t.result = *cm.record.result;
    t.key_in_pre = cm.pre_lp_abds.count(cm.record.key) != 0;
    t.key_in_post = cm.post_lp_abds.count(cm.record.key) != 0;
    out.push_back(t);
  }
  return out;
}

bool effect_table_ok(const MethodEffect& t) {
  switch (t.kind) {
    case OpKind::add:
      return t.result ? (!t.key_in_pre && t.key_in_post) : (t.key_in_pre && t.key_in_post);
    case OpKind::remove:
      return t.result ? (t.key_in_pre && !t.key_in_post) : (!t.key_in_pre && !t.key_in_post);
    case OpKind::contains:
      return t.result ? (t.key_in_pre && t.key_in_post) : (!t.key_in_pre && !t.key_in_post);
  }
  return false;
}

}  // namespace lpv
