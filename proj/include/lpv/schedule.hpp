#pragma once

#include <functional>
#include <random>
#include <variant>

#include "lpv/hoh_list.hpp"
#include "lpv/lazy_list.hpp"
#include "lpv/seq_spec.hpp"

// Drives method machines to produce executions: exhaustive DFS over all
// interleavings for small workloads, seeded-random scheduling for larger
// ones, scripted replays for fixed scenarios, truncation plus completion
// per the pending-method rules, and a native stress mode with real
// threads.

namespace lpv {

struct WorkloadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Workload {
  Family family = Family::lazy;
  AbstractSet initial;
  std::vector<std::vector<SeqOp>> threads;
  Mutation mutation = Mutation::none;
  std::uint32_t retry_cap = 1000;
  std::optional<std::uint64_t> truncate_after;

  void validate() const;
};

// JSON form: {family, initial:[keys], threads:[[{op,key},...]],
//             mutation?, retry_cap?, truncate_after?}
Workload workload_from_json_text(const std::string& text);
Workload load_workload(const std::string& path);
std::string workload_to_json_text(const Workload& w);

using Machine = std::variant<LazyMachine, HoHMachine>;

// Step-level scheduling interface.  One Driver owns one execution in
// progress; stepping a thread performs exactly one atomic event.  The
// whole driver is single-threaded; exhaustive search backtracks through
// undo records rather than copies.
class Driver {
 public:
  explicit Driver(const Workload& w);

  std::size_t thread_count() const { return lanes_.size(); }
  bool thread_exhausted(ThreadId t) const;
  // A thread is runnable unless exhausted or its next action is a lock
  // acquisition on a node held by another thread.
  bool runnable(ThreadId t) const;
  std::vector<ThreadId> runnable_threads() const;
  bool all_done() const;
  bool method_active(ThreadId t) const { return lanes_[t].machine.has_value(); }

  // Performs one atomic event of thread t.  Throws LivelockCap when the
  // lazy locate retry cap is exceeded.
  const Event& step(ThreadId t);
  // Steps t until its current method completes (used by completion; the
  // caller guarantees the remaining actions cannot block).
  void drain_method(ThreadId t);
  // Steps t until it is exhausted, failing if it ever blocks.
  void drain_thread(ThreadId t);

  void undo_last_step();
  std::size_t steps_taken() const { return execution_.events.size(); }

  const Execution& execution() const { return execution_; }
  const SimHeap& heap() const { return heap_; }
  const Workload& workload() const { return workload_; }

 private:
  struct Lane {
    std::size_t next_op = 0;
    std::optional<Machine> machine;
  };
  struct StepUndo {
    ThreadId thread;
    Lane lane_before;
    HeapUndo heap_undo;
  };

  Machine make_machine(ThreadId t, const SeqOp& op);

  Workload workload_;
  SimHeap heap_;
  std::vector<Lane> lanes_;
  Execution execution_;
  MethodId next_method_ = 0;
  std::vector<StepUndo> undo_;
};

struct RunStats {
  std::uint64_t schedules = 0;
  std::uint64_t events_total = 0;
  std::uint64_t livelock_pruned = 0;
};

using ExecutionVisitor = std::function<void(const Execution&)>;

// Visits every distinct maximal interleaving exactly once.  Executions
// are complete unless workload.truncate_after fires.  The reference
// passed to the visitor is only valid during the call.
RunStats run_exhaustive(const Workload& w, const ExecutionVisitor& visit);

// Reproducible: the same seed yields identical executions.  Scheduling
// choices are uniform over the runnable threads.  Executions that hit
// the locate retry cap are skipped and counted in stats.
std::vector<Execution> run_random(const Workload& w, std::uint64_t seed, std::size_t count,
                                  RunStats* stats = nullptr);

// Replays an explicit choice sequence; every choice must be runnable and
// the sequence must drain the workload (unless truncation fires first).
Execution run_scripted(const Workload& w, const std::vector<ThreadId>& choices);

// Completion of a truncated execution: pending methods that executed no
// abstract-set-changing event are dropped (their events are removed);
// the rest are finished by appending their remaining events and
// response, ordered by their executed update event.
Execution complete_execution(const Execution& truncated, const Workload& w);

// Native stress: the same machines driven by real threads over a shared
// heap.  Each atomic step executes under a global sequence lock, so the
// recorded order is exact; node locks block for real (via scheduler
// retry).  Each thread runs its program `rounds` times; `seed` drives
// per-thread yield jitter to diversify interleavings.
Execution run_native_stress(const Workload& w, std::uint64_t seed, std::uint32_t rounds);

}  // namespace lpv
