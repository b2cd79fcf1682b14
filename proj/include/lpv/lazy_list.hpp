#pragma once

#include "lpv/heap.hpp"
#include "lpv/lp_rules.hpp"

// Event-granular lazy list: Validate/Locate/Add/Remove/Contains as a
// resumable per-method state machine over the simulated heap.  Each
// step performs exactly one atomic action and emits exactly one event.
// Compound conditions (the three validation reads, the final val/marked
// test of contains) are split into separate reads in textual order,
// with short-circuit evaluation.

namespace lpv {

class LazyMachine {
 public:
  LazyMachine() = default;
  LazyMachine(MethodId id, ThreadId thread, OpKind op, KeyValue key,
              Mutation mutation, std::uint32_t retry_cap);

  bool done() const { return pc_ == Pc::finished; }
  bool result() const {
    assert(done());
    return result_;
  }
  MethodId method() const { return id_; }

  // True when the next action is a lock acquisition on a node currently
  // held by another thread.  A blocked machine emits no event and stays
  // re-schedulable.
  bool blocked(const SimHeap& heap) const;

  // Executes the next atomic action.  Throws LivelockCap once locate has
  // restarted more than retry_cap times.
  Event step(SimHeap& heap, std::uint32_t seq);

 private:
  enum class Pc : std::uint8_t {
    inv,
    // Locate (add/remove)
    loc_read_next,   // n2 = read(n1.next)
    loc_scan_val,    // read(n2.val) < key ?
    loc_advance,     // n1 = n2; n2 = read(n2.next)
    loc_lock1,
    loc_lock2,
    val_read_m1,     // read(n1.marked)
    val_read_m2,     // read(n2.marked)
    val_read_next,   // read(n1.next) == n2 ?
    loc_fail_rel1,
    loc_fail_rel2,
    // Add
    add_check,       // read(n2.val) != key ?
    add_alloc,       // n3 = new node(key)
    add_link_new,    // write(n3.next, n2)
    add_publish,     // write(n1.next, n3)
    early_unlock_n1, // add-unlock-early only
    // Remove
    rem_check,       // read(n2.val) == key ?
    rem_mark,        // write(n2.marked, true)
    rem_unlink,      // write(n1.next, n2.next)
    // Contains (lock-free traversal)
    con_scan_val,    // read(n.val) < key ?
    con_scan_next,   // n = read(n.next)
    con_check_val,   // read(n.val) != key ?
    con_check_marked,// read(n.marked)
    // Common exit
    unlock1,
    unlock2,
    resp,
    finished,
  };

  Event step_locate(SimHeap& heap, std::uint32_t seq);

  MethodId id_ = kNoMethod;
  ThreadId thread_ = 0;
  OpKind op_ = OpKind::add;
  KeyValue key_ = 0;
  Mutation mutation_ = Mutation::none;
  std::uint32_t retry_cap_ = 1000;
  std::uint32_t retries_ = 0;

  Pc pc_ = Pc::inv;
  NodeId n1_ = kNullNode;
  NodeId n2_ = kNullNode;
  NodeId n3_ = kNullNode;
  NodeId n_ = kNullNode;
  bool result_ = false;
  bool released_n1_ = false;  // add-unlock-early bookkeeping
};

// Marks every event of each completed method matching an LP rule's
// syntactic pattern.  Contains-false additionally receives the anchors
// of qualifying concurrent add(key,true) publish writes, unless the
// contains_lp_naive mutation suppresses the dummy rule.
std::vector<MethodCandidates> lazy_candidate_lp_markers(const Execution& ex,
                                                        Mutation mutation = Mutation::none);

}  // namespace lpv
