#pragma once

#include "lpv/heap.hpp"

namespace lpv {

// Validating replay of a recorded execution: rebuilds the heap event by
// event, checking reads against the reconstructed state and lock events
// against ownership.  Catches traces that do not belong to their
// workload as well as corrupted files.
class Replayer {
 public:
  Replayer(Family family, const AbstractSet& initial)
      : family_(family), heap_(SimHeap::initial_list(initial)) {}

  void apply(const Event& e);

  Family family() const { return family_; }
  const SimHeap& heap() const { return heap_; }

 private:
  Family family_;
  SimHeap heap_;
};

// Abstract-set value before/after every event of an execution.
struct AbdsTimeline {
  AbstractSet initial;
  std::vector<AbstractSet> after;

  const AbstractSet& before(std::size_t i) const { return i == 0 ? initial : after[i - 1]; }
  bool changes_at(std::size_t i) const { return before(i) != after[i]; }

  static AbdsTimeline build(const Execution& ex, const AbstractSet& initial);
};

}  // namespace lpv
