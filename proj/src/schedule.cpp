#include "lpv/schedule.hpp"

#include <json.hpp>

#include <array>
#include <fstream>
#include <mutex>
#include <thread>

namespace lpv {

namespace {

constexpr std::size_t kMaxThreads = 16;

bool machine_done(const Machine& m) {
  return std::visit([](const auto& x) { return x.done(); }, m);
}
bool machine_blocked(const Machine& m, const SimHeap& heap) {
  return std::visit([&](const auto& x) { return x.blocked(heap); }, m);
}
Event machine_step(Machine& m, SimHeap& heap, std::uint32_t seq) {
  return std::visit([&](auto& x) { return x.step(heap, seq); }, m);
}

}  // namespace

void Workload::validate() const {
  if (threads.size() > kMaxThreads)
    throw WorkloadError("too many threads (max " + std::to_string(kMaxThreads) + ")");
  for (KeyValue k : initial)
    if (!is_user_key(k)) throw WorkloadError("initial key collides with a sentinel");
  for (const auto& prog : threads)
    for (const SeqOp& op : prog)
      if (!is_user_key(op.key)) throw WorkloadError("op key collides with a sentinel");
  if (family == Family::hoh &&
      (mutation == Mutation::remove_skip_mark || mutation == Mutation::contains_lp_naive))
    throw WorkloadError(std::string("mutation ") + to_string(mutation) +
                        " applies to the lazy family only");
}

Workload workload_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw WorkloadError(std::string("bad workload json: ") + e.what());
  }
  Workload w;
  try {
    w.family = family_from_string(j.at("family").get<std::string>());
    for (const auto& k : j.at("initial")) w.initial.insert(k.get<KeyValue>());
    for (const auto& prog : j.at("threads")) {
      std::vector<SeqOp> ops;
      for (const auto& o : prog)
        ops.push_back(SeqOp{op_from_string(o.at("op").get<std::string>()),
                            o.at("key").get<KeyValue>()});
      w.threads.push_back(std::move(ops));
    }
    if (j.contains("mutation")) w.mutation = mutation_from_string(j["mutation"].get<std::string>());
    if (j.contains("retry_cap")) w.retry_cap = j["retry_cap"].get<std::uint32_t>();
    if (j.contains("truncate_after"))
      w.truncate_after = j["truncate_after"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw WorkloadError(std::string("bad workload field: ") + e.what());
  }
  w.validate();
  return w;
}

Workload load_workload(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw WorkloadError("cannot open workload file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return workload_from_json_text(text);
}

std::string workload_to_json_text(const Workload& w) {
  nlohmann::ordered_json j;
  j["family"] = to_string(w.family);
  j["initial"] = w.initial;
  auto threads = nlohmann::ordered_json::array();
  for (const auto& prog : w.threads) {
    auto ops = nlohmann::ordered_json::array();
    for (const SeqOp& op : prog) ops.push_back({{"op", to_string(op.kind)}, {"key", op.key}});
    threads.push_back(std::move(ops));
  }
  j["threads"] = std::move(threads);
  if (w.mutation != Mutation::none) j["mutation"] = to_string(w.mutation);
  if (w.retry_cap != 1000) j["retry_cap"] = w.retry_cap;
  if (w.truncate_after) j["truncate_after"] = *w.truncate_after;
  return j.dump();
}

Driver::Driver(const Workload& w) : workload_(w) {
  workload_.validate();
  heap_ = SimHeap::initial_list(w.initial);
  lanes_.resize(w.threads.size());
  execution_.family = w.family;
  execution_.events.reserve(64);
}

Machine Driver::make_machine(ThreadId t, const SeqOp& op) {
  MethodId id = next_method_++;
  if (workload_.family == Family::lazy)
    return LazyMachine(id, t, op.kind, op.key, workload_.mutation, workload_.retry_cap);
  return HoHMachine(id, t, op.kind, op.key, workload_.mutation);
}

bool Driver::thread_exhausted(ThreadId t) const {
  const Lane& lane = lanes_[t];
  return !lane.machine && lane.next_op >= workload_.threads[t].size();
}

bool Driver::runnable(ThreadId t) const {
  const Lane& lane = lanes_[t];
  if (lane.machine) return !machine_blocked(*lane.machine, heap_);
  return lane.next_op < workload_.threads[t].size();
}

std::vector<ThreadId> Driver::runnable_threads() const {
  std::vector<ThreadId> out;
  for (ThreadId t = 0; t < lanes_.size(); ++t)
    if (runnable(t)) out.push_back(t);
  return out;
}

bool Driver::all_done() const {
  for (ThreadId t = 0; t < lanes_.size(); ++t)
    if (!thread_exhausted(t)) return false;
  return true;
}

const Event& Driver::step(ThreadId t) {
  Lane& lane = lanes_[t];
  StepUndo undo{t, lane, {}};
  if (!lane.machine) {
    assert(lane.next_op < workload_.threads[t].size());
    lane.machine = make_machine(t, workload_.threads[t][lane.next_op]);
  }
  heap_.take_journal();  // clear any stale record
  Event e;
  try {
    e = machine_step(*lane.machine, heap_, static_cast<std::uint32_t>(execution_.events.size()));
  } catch (...) {
    // Machines throw before mutating anything, so restoring the lane is
    // enough to keep the driver usable for the remaining branches.
    if (!undo.lane_before.machine) --next_method_;
    lanes_[t] = undo.lane_before;
    throw;
  }
  undo.heap_undo = heap_.take_journal();
  if (machine_done(*lane.machine)) {
    lane.machine.reset();
    ++lane.next_op;
  }
  execution_.events.push_back(e);
  undo_.push_back(undo);
  return execution_.events.back();
}

void Driver::undo_last_step() {
  assert(!undo_.empty());
  const StepUndo& u = undo_.back();
  execution_.events.pop_back();
  heap_.apply_undo(u.heap_undo);
  if (!u.lane_before.machine) {
    assert(lanes_[u.thread].machine && "an invocation step cannot also finish the method");
    --next_method_;
  }
  lanes_[u.thread] = u.lane_before;
  undo_.pop_back();
}

void Driver::drain_method(ThreadId t) {
  assert(lanes_[t].machine.has_value());
  while (lanes_[t].machine) {
    assert(runnable(t) && "drain_method must not block");
    step(t);
  }
}

void Driver::drain_thread(ThreadId t) {
  while (!thread_exhausted(t)) {
    assert(runnable(t) && "drain_thread must not block");
    step(t);
  }
}

namespace {

struct Explorer {
  Driver driver;
  const ExecutionVisitor& visit;
  RunStats stats;

  explicit Explorer(const Workload& w, const ExecutionVisitor& v) : driver(w), visit(v) {}

  void leaf() {
    ++stats.schedules;
    stats.events_total += driver.steps_taken();
    if (visit) visit(driver.execution());
  }

  void go() {
    const auto& truncate = driver.workload().truncate_after;
    if (truncate && driver.steps_taken() >= *truncate) {
      leaf();
      return;
    }
    std::array<ThreadId, kMaxThreads> runnable{};
    std::size_t n = 0;
    for (ThreadId t = 0; t < driver.thread_count(); ++t)
      if (driver.runnable(t)) runnable[n++] = t;
    if (n == 0) {
      if (!driver.all_done())
        throw std::logic_error("all threads blocked; unreachable for these structures");
      leaf();
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      bool stepped = false;
      try {
        driver.step(runnable[i]);
        stepped = true;
      } catch (const LivelockCap&) {
        ++stats.livelock_pruned;
      }
      if (stepped) {
        go();
        driver.undo_last_step();
      }
    }
  }
};

}  // namespace

RunStats run_exhaustive(const Workload& w, const ExecutionVisitor& visit) {
  Explorer ex(w, visit);
  ex.go();
  return ex.stats;
}

std::vector<Execution> run_random(const Workload& w, std::uint64_t seed, std::size_t count,
                                  RunStats* stats) {
  std::vector<Execution> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::seed_seq sseq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    std::mt19937_64 rng(sseq);
    Driver d(w);
    bool keep = true;
    while (true) {
      if (w.truncate_after && d.steps_taken() >= *w.truncate_after) break;
      auto runnable = d.runnable_threads();
      if (runnable.empty()) {
        if (!d.all_done())
          throw std::logic_error("all threads blocked; unreachable for these structures");
        break;
      }
      try {
        d.step(runnable[rng() % runnable.size()]);
      } catch (const LivelockCap&) {
        if (stats) ++stats->livelock_pruned;
        keep = false;
        break;
      }
    }
    if (!keep) continue;
    out.push_back(d.execution());
    if (stats) {
      ++stats->schedules;
      stats->events_total += out.back().events.size();
    }
  }
  return out;
}

Execution run_scripted(const Workload& w, const std::vector<ThreadId>& choices) {
  Driver d(w);
  for (ThreadId t : choices) {
    if (w.truncate_after && d.steps_taken() >= *w.truncate_after) break;
    if (t >= d.thread_count() || !d.runnable(t))
      throw WorkloadError("scripted choice " + std::to_string(t) + " is not runnable");
    d.step(t);
  }
  return d.execution();
}

Execution complete_execution(const Execution& truncated, const Workload& w) {
  {
    bool any_pending = false;
    for (const MethodRecord& m : collect_methods(truncated)) any_pending |= !m.complete();
    if (!any_pending) return truncated;
  }
  Driver d(w);

  // Re-drive the machines through the recorded order; this both checks
  // the trace and leaves the driver at the truncation state.
  AbstractSet abds = abds_of(d.heap(), w.family);
  std::vector<bool> changes(truncated.events.size(), false);
  std::vector<AbstractSet> abds_at_change;
  for (std::size_t i = 0; i < truncated.events.size(); ++i) {
    const Event& want = truncated.events[i];
    const Event& got = d.step(want.thread);
    if (!(got == want))
      throw MalformedExecution("recorded event " + std::to_string(i) +
                               " does not replay; trace/workload mismatch");
    if (want.kind == EventKind::write) {
      AbstractSet now = abds_of(d.heap(), w.family);
      if (now != abds) {
        changes[i] = true;
        abds = std::move(now);
      }
    }
  }

  // Classify pending methods: keep the ones whose executed events
  // include an abstract-set change (their response is determined); drop
  // the rest entirely.
  std::vector<MethodRecord> methods = collect_methods(truncated);
  struct Kept {
    MethodId id;
    ThreadId thread;
    std::uint32_t lp_seq;
  };
  std::vector<Kept> kept;
  std::vector<bool> dropped_method;  // indexed by MethodId
  MethodId max_id = 0;
  for (const auto& m : methods) max_id = std::max(max_id, m.id);
  dropped_method.assign(max_id + 1, false);
  for (const MethodRecord& m : methods) {
    if (m.complete()) continue;
    std::optional<std::uint32_t> lp;
    for (std::size_t i = 0; i < truncated.events.size(); ++i)
      if (changes[i] && truncated.events[i].method == m.id) {
        lp = static_cast<std::uint32_t>(i);
        break;
      }
    if (lp)
      kept.push_back({m.id, m.thread, *lp});
    else
      dropped_method[m.id] = true;
  }
  std::sort(kept.begin(), kept.end(),
            [](const Kept& a, const Kept& b) { return a.lp_seq < b.lp_seq; });

  for (const Kept& k : kept) d.drain_method(k.thread);

  Execution out;
  out.family = truncated.family;
  const auto& full = d.execution().events;
  for (std::size_t i = 0; i < full.size(); ++i) {
    const Event& e = full[i];
    if (e.method != kNoMethod && e.method < dropped_method.size() && dropped_method[e.method])
      continue;
    out.events.push_back(e);
    out.events.back().seq = static_cast<std::uint32_t>(out.events.size() - 1);
  }
  return out;
}

Execution run_native_stress(const Workload& w, std::uint64_t seed, std::uint32_t rounds) {
  w.validate();
  SimHeap heap = SimHeap::initial_list(w.initial);
  std::mutex step_mtx;
  std::vector<Event> trace;
  MethodId next_method = 0;

  auto worker = [&](ThreadId tid) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + tid + 1);
    for (std::uint32_t r = 0; r < rounds; ++r) {
      for (const SeqOp& op : w.threads[tid]) {
        // The machine is created under the same lock as its invocation
        // step so that method ids are ordered by invocation, matching
        // the simulated driver.
        std::optional<Machine> m;
        while (!m || !machine_done(*m)) {
          bool progressed = false;
          {
            std::lock_guard<std::mutex> g(step_mtx);
            if (!m) {
              MethodId id = next_method++;
              if (w.family == Family::lazy)
                m = LazyMachine(id, tid, op.kind, op.key, w.mutation, w.retry_cap);
              else
                m = HoHMachine(id, tid, op.kind, op.key, w.mutation);
            }
            if (!machine_blocked(*m, heap)) {
              Event e = machine_step(*m, heap, static_cast<std::uint32_t>(trace.size()));
              trace.push_back(e);
              progressed = true;
            }
          }
          if (!progressed) std::this_thread::yield();
        }
        if ((rng() & 3) == 0) std::this_thread::yield();
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(w.threads.size());
  for (ThreadId t = 0; t < w.threads.size(); ++t) threads.emplace_back(worker, t);
  for (auto& th : threads) th.join();

  Execution ex;
  ex.family = w.family;
  ex.events = std::move(trace);
  return ex;
}

}  // namespace lpv
