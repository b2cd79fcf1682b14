#pragma once

#include "lpv/replay.hpp"
#include "lpv/seq_spec.hpp"

// The core procedure: assign linearization points, order the methods by
// them, replay that order against the sequential set specification and
// compare responses and abstract states, plus the assumption that only
// LP events ever change the abstract set.

namespace lpv {

enum class LpRule {
  add_true_publish,          // write(n1.next, n3)
  add_false_check_read,      // read(n2.val) after locate
  remove_true_mark,          // lazy: write(n2.marked, true)
  remove_true_unlink,        // hoh: write(n1.next, n2.next)
  remove_false_check_read,
  contains_true_marked_read, // lazy
  contains_false_final_read, // lazy, no qualifying concurrent add
  contains_false_dummy,      // lazy, dummy just before a concurrent add's publish
  contains_true_check_read,  // hoh
  contains_false_check_read, // hoh
};

const char* to_string(LpRule r);

// A linearization position.  Dummy positions sit immediately before
// their anchor event; dummies sharing an anchor are ordered by their
// method's invocation (the tie field).
struct LpPos {
  std::uint32_t seq = 0;
  bool dummy = false;
  std::uint32_t tie = 0;

  friend bool operator<(const LpPos& a, const LpPos& b) {
    if (a.seq != b.seq) return a.seq < b.seq;
    if (a.dummy != b.dummy) return a.dummy;  // dummy precedes the real event
    return a.tie < b.tie;
  }
};

struct LpEntry {
  MethodId method = kNoMethod;
  LpPos pos;
  LpRule rule = LpRule::add_true_publish;
  std::optional<MethodId> anchor_method;  // dummy LPs: the add anchored to
  std::size_t anchor_candidates = 0;      // >1 means we picked the latest
};

struct LpAssignment {
  std::vector<LpEntry> entries;               // one per completed method with an LP
  std::vector<MethodId> no_lp;                // completed methods the rulebook missed
  std::vector<MethodId> multiple_abds_changes;

  const LpEntry* find(MethodId m) const;
};

// Requires a complete execution (run complete_execution first).
LpAssignment assign_lps(const Execution& ex, Mutation mutation, const AbdsTimeline& timeline);

struct AssumptionViolation {
  std::uint32_t event_seq = 0;
  std::string reason;
};

// Assumption: the abstract set changes only at assigned LP events.
std::optional<AssumptionViolation> check_assumption_abds(const Execution& ex,
                                                         const LpAssignment& lps,
                                                         const AbdsTimeline& timeline);

struct CsMethod {
  MethodRecord record;
  LpEntry lp;
  AbstractSet pre_lp_abds;   // concurrent snapshot just before the LP
  AbstractSet post_lp_abds;  // and just after
  SeqStep seq_step;          // the same method replayed sequentially
};

// The constructed sequential history CS(H): methods ordered by LP and
// replayed one at a time from the initial abstract set.
struct CsReplay {
  AbstractSet initial;
  std::vector<CsMethod> ordered;
};

CsReplay construct_cs(const Execution& ex, const LpAssignment& lps, const AbdsTimeline& timeline);

struct Verdict {
  enum class Status {
    pass,
    response_mismatch,
    abds_mismatch,
    assumption_violation,
    rt_violation,
    no_lp_found,
    multiple_abds_changes,
  };
  Status status = Status::pass;

  // response_mismatch / abds_mismatch / no_lp_found / multiple_abds_changes
  MethodId method = kNoMethod;
  OpKind op = OpKind::add;
  KeyValue key = 0;
  bool concurrent_result = false;
  bool sequential_result = false;
  AbstractSet pre_lp_abds;
  AbstractSet post_lp_abds;
  AbstractSet sequential_post;
  bool pre_state_mismatch = false;  // abds_mismatch on the pre side

  // assumption_violation
  std::uint32_t event_seq = 0;
  std::string reason;

  // rt_violation
  MethodId rt_before = kNoMethod;
  MethodId rt_after = kNoMethod;

  bool pass() const { return status == Status::pass; }
  std::string summary() const;
};

const char* to_string(Verdict::Status s);

// Response equality, post-LP abstract-state equality, and real-time
// preservation of the LP order; first failure wins.
Verdict check_equivalence(const History& h, const CsReplay& cs);

// Full pipeline on one complete execution: timeline, LP assignment,
// assumption check, CS construction, equivalence.
struct CheckResult {
  Verdict verdict;
  LpAssignment lps;
  CsReplay cs;
};
CheckResult check_execution(const Execution& ex, Mutation mutation, const AbstractSet& initial);

// The execution with dummy LP events made explicit: each one inserted
// immediately before its anchor, then re-sequenced densely.
Execution materialize_dummies(const Execution& ex, const LpAssignment& lps);

// (result, key in pre-LP abds, key in post-LP abds) per method; the set
// semantics pin exactly which triples are admissible per op kind.
struct MethodEffect {
  MethodId method = kNoMethod;
  OpKind kind = OpKind::add;
  bool result = false;
  bool key_in_pre = false;
  bool key_in_post = false;
};
std::vector<MethodEffect> method_effects(const CsReplay& cs);
bool effect_table_ok(const MethodEffect& t);

}  // namespace lpv
