#include "lpv/invariants.hpp"

#include <map>
#include <sstream>

#include "lpv/replay.hpp"

namespace lpv {

namespace {

struct Checker {
  const Execution& ex;
  Replayer replay;
  std::vector<InvariantViolation> out;
  std::vector<bool> published;                    // ever reachable from head
  std::map<ThreadId, std::vector<NodeId>> held;   // hoh lock tracking

  Checker(const Execution& e, const AbstractSet& initial) : ex(e), replay(e.family, initial) {}

  void violation(std::uint32_t seq, const std::string& name, const std::string& detail) {
    out.push_back({seq, name, detail});
  }

  void pre_event(const Event& e) {
    const SimHeap& heap = replay.heap();
    if (ex.family == Family::lazy && e.kind == EventKind::write && heap.valid(e.node)) {
      const Node& n = heap.at(e.node);
      if (e.field == Field::marked && n.marked && e.value == 0)
        violation(e.seq, "marked-monotone", "marked flag reset on node " + std::to_string(e.node));
      if (e.field == Field::next && n.marked)
        violation(e.seq, "marked-next-frozen",
                  "next of marked node " + std::to_string(e.node) + " rewritten");
    }
    if (ex.family == Family::hoh && e.kind == EventKind::lock_acquire) {
      auto& locks = held[e.thread];
      if (locks.size() >= 2)
        violation(e.seq, "lock-coupling", "thread holds more than two locks");
      if (locks.size() == 1 && heap.valid(locks[0]) && heap.at(locks[0]).next != e.node)
        violation(e.seq, "lock-coupling",
                  "locked node " + std::to_string(e.node) + " is not the successor of held node " +
                      std::to_string(locks[0]));
    }
  }

  void track_locks(const Event& e) {
    if (e.kind == EventKind::lock_acquire) {
      held[e.thread].push_back(e.node);
    } else if (e.kind == EventKind::lock_release) {
      auto& locks = held[e.thread];
      auto it = std::find(locks.begin(), locks.end(), e.node);
      if (it != locks.end()) locks.erase(it);
    }
  }

  void post_event(const Event& e) {
    const SimHeap& heap = replay.heap();
    if (published.size() < heap.size()) published.resize(heap.size(), false);

    // Head chain: terminates at tail, strictly sorted (which also gives
    // key uniqueness), no cycles.
    std::vector<bool> reachable(heap.size(), false);
    NodeId cur = heap.head();
    std::size_t steps = 0;
    KeyValue prev_val = kKeyMin;
    bool first = true;
    while (cur != kNullNode) {
      if (++steps > heap.size()) {
        violation(e.seq, "chain-integrity", "cycle on the head chain");
        return;
      }
      reachable[cur] = true;
      published[cur] = true;
      const Node& n = heap.at(cur);
      if (!first && n.val <= prev_val)
        violation(e.seq, "sortedness",
                  "chain key " + std::to_string(n.val) + " not above " + std::to_string(prev_val));
      prev_val = n.val;
      first = false;
      if (n.next == kNullNode && cur != heap.tail())
        violation(e.seq, "chain-integrity", "head chain ends before tail");
      cur = n.next;
    }

    // Global sortedness, including fresh and unlinked nodes.
    for (NodeId i = 0; i < heap.size(); ++i) {
      const Node& n = heap.at(i);
      if (n.next != kNullNode && heap.valid(n.next) && n.val >= heap.at(n.next).val)
        violation(e.seq, "sortedness",
                  "node " + std::to_string(i) + " val " + std::to_string(n.val) +
                      " >= successor val " + std::to_string(heap.at(n.next).val));
    }

    if (ex.family == Family::lazy) {
      // A node is public once it has an incoming link or was ever on the
      // head chain; public unmarked nodes must stay reachable.
      std::vector<bool> incoming(heap.size(), false);
      for (NodeId i = 0; i < heap.size(); ++i)
        if (heap.at(i).next != kNullNode && heap.valid(heap.at(i).next))
          incoming[heap.at(i).next] = true;
      for (NodeId i = 0; i < heap.size(); ++i) {
        if ((published[i] || incoming[i]) && !heap.at(i).marked && !reachable[i])
          violation(e.seq, "unmarked-reachability",
                    "public unmarked node " + std::to_string(i) + " lost from the head chain");
      }
    }
  }

  void run() {
    for (const Event& e : ex.events) {
      pre_event(e);
      replay.apply(e);
      track_locks(e);
      post_event(e);
    }
  }
};

}  // namespace

std::vector<InvariantViolation> check_structural_invariants(const Execution& ex,
                                                            const AbstractSet& initial) {
  Checker c(ex, initial);
  c.run();
  return c.out;
}

}  // namespace lpv
