#pragma once

#include "lpv/heap.hpp"
#include "lpv/lp_rules.hpp"

// Event-granular hand-over-hand locking list.  Traversal holds locks on
// two adjacent nodes, releasing the trailing lock before acquiring the
// next; there is no validation and no restart, so every LP lies inside
// its own method.

namespace lpv {

class HoHMachine {
 public:
  HoHMachine() = default;
  HoHMachine(MethodId id, ThreadId thread, OpKind op, KeyValue key, Mutation mutation);

  bool done() const { return pc_ == Pc::finished; }
  bool result() const {
    assert(done());
    return result_;
  }
  MethodId method() const { return id_; }

  bool blocked(const SimHeap& heap) const;
  Event step(SimHeap& heap, std::uint32_t seq);

 private:
  enum class Pc : std::uint8_t {
    inv,
    loc_lock_head,
    loc_read_next,   // n2 = read(n1.next)
    loc_lock2,
    loc_scan_val,    // read(n2.val) < key ?
    loc_rel_prev,    // release n1, then n1 = n2 locally
    add_check,
    add_alloc,
    add_link_new,
    add_publish,
    early_unlock_n1,
    rem_check,
    rem_unlink,      // write(n1.next, n2.next)
    con_check,
    unlock1,
    unlock2,
    resp,
    finished,
  };

  MethodId id_ = kNoMethod;
  ThreadId thread_ = 0;
  OpKind op_ = OpKind::add;
  KeyValue key_ = 0;
  Mutation mutation_ = Mutation::none;

  Pc pc_ = Pc::inv;
  NodeId n1_ = kNullNode;
  NodeId n2_ = kNullNode;
  NodeId n3_ = kNullNode;
  bool result_ = false;
  bool released_n1_ = false;
};

// Exactly one marker per completed method; the rules are unconditional.
std::vector<MethodCandidates> hoh_candidate_lp_markers(const Execution& ex,
                                                       Mutation mutation = Mutation::none);

}  // namespace lpv
