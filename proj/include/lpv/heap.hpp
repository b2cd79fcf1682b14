#pragma once

#include <cassert>
#include <optional>

#include "lpv/model.hpp"

namespace lpv {

struct CorruptHeap : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Traversal stepped onto a null next pointer.  Unreachable for the
// unmutated structures; under mutations it is a bug-detection signal.
struct HeapFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Node {
  KeyValue val = 0;
  NodeId next = kNullNode;
  bool marked = false;
  std::optional<ThreadId> locked_by;
};

// Undo record for one heap mutation; lets the exhaustive scheduler
// backtrack without copying whole states.
struct HeapUndo {
  enum class What { none, cell, alloc } what = What::none;
  NodeId node = kNullNode;
  Node before;
};

// The simulated shared heap.  Nodes are never reclaimed; ids are
// allocation-ordered and never reused.  Node 0 is the head sentinel,
// node 1 the tail sentinel.  Every step mutates at most one node, and
// the last mutation is recorded for backtracking.
class SimHeap {
 public:
  SimHeap() = default;

  // Canonical initial list: head, tail, then one node per initial key in
  // ascending order, linked head -> k1 -> ... -> tail.
  static SimHeap initial_list(const AbstractSet& initial_keys);

  NodeId head() const { return 0; }
  NodeId tail() const { return 1; }

  NodeId allocate(KeyValue key) {
    journal_ = {HeapUndo::What::alloc, static_cast<NodeId>(nodes_.size()), Node{}};
    nodes_.push_back(Node{key, kNullNode, false, std::nullopt});
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  // Allocation at a caller-chosen id; used by trace replay where the
  // recorded id is authoritative (completion may leave id gaps).
  void allocate_at(NodeId id, KeyValue key) {
    if (id >= nodes_.size()) nodes_.resize(id + 1);
    nodes_[id] = Node{key, kNullNode, false, std::nullopt};
  }

  std::size_t size() const { return nodes_.size(); }
  bool valid(NodeId id) const { return id < nodes_.size(); }

  const Node& at(NodeId id) const {
    assert(valid(id));
    return nodes_[id];
  }

  void write_next(NodeId id, NodeId next) {
    touch(id).next = next;
  }
  void write_marked(NodeId id, bool marked) {
    touch(id).marked = marked;
  }

  bool lock_held_by_other(NodeId id, ThreadId t) const {
    const auto& owner = at(id).locked_by;
    return owner.has_value() && *owner != t;
  }
  void lock(NodeId id, ThreadId t) {
    assert(!at(id).locked_by.has_value());
    touch(id).locked_by = t;
  }
  void unlock(NodeId id, ThreadId t) {
    assert(at(id).locked_by.has_value() && *at(id).locked_by == t);
    (void)t;
    touch(id).locked_by.reset();
  }

  // Undo record of the last mutating call, if any.
  HeapUndo take_journal() {
    HeapUndo j = journal_;
    journal_ = {};
    return j;
  }
  void apply_undo(const HeapUndo& u) {
    switch (u.what) {
      case HeapUndo::What::none:
        break;
      case HeapUndo::What::cell:
        nodes_[u.node] = u.before;
        break;
      case HeapUndo::What::alloc:
        assert(u.node + 1 == nodes_.size());
        nodes_.pop_back();
        break;
    }
  }

 private:
  Node& touch(NodeId id) {
    assert(valid(id));
    journal_ = {HeapUndo::What::cell, id, nodes_[id]};
    return nodes_[id];
  }

  std::vector<Node> nodes_;
  HeapUndo journal_;
};

// The abstract set a correct sequential run would hold.
//   lazy: keys of unmarked nodes reachable from head, sentinels excluded.
//   hoh:  keys of all nodes reachable from head, sentinels excluded.
// Throws CorruptHeap if the head chain exceeds the allocation count.
AbstractSet abds_of(const SimHeap& heap, Family family);

}  // namespace lpv
