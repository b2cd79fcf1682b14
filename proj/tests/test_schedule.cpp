#include <doctest.h>

#include "lpcase_fixture.hpp"
#include "lpv/lp_checker.hpp"
#include "lpv/replay.hpp"
#include "lpv/brute_oracle.hpp"
#include "lpv/trace_io.hpp"

using namespace lpv;

namespace {

// Independent interleaving count: C(a+b, a) via Pascal's rule.
std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::vector<std::uint64_t> row(k + 1, 0);
  row[0] = 1;
  for (std::uint64_t i = 1; i <= n; ++i)
    for (std::uint64_t j = std::min<std::uint64_t>(i, k); j > 0; --j) row[j] += row[j - 1];
  return row[k];
}

std::size_t solo_event_count(Family fam, const AbstractSet& initial, SeqOp op) {
  Workload w;
  w.family = fam;
  w.initial = initial;
  w.threads = {{op}};
  Driver d(w);
  d.drain_thread(0);
  return d.execution().events.size();
}

}  // namespace

TEST_CASE("one thread means exactly one schedule") {
  Workload w;
  w.family = Family::lazy;
  w.threads = {{{OpKind::add, 1}, {OpKind::remove, 1}}};
  RunStats st = run_exhaustive(w, nullptr);
  CHECK(st.schedules == 1);
}

TEST_CASE("lock-free pairs interleave freely: count matches C(a+b, a)") {
  // Two lazy contains never touch a lock and never write, so neither
  // perturbs the other's event string.
  Workload w;
  w.family = Family::lazy;
  w.initial = {1, 2};
  w.threads = {{{OpKind::contains, 1}}, {{OpKind::contains, 2}}};
  const std::size_t a = solo_event_count(Family::lazy, w.initial, {OpKind::contains, 1});
  const std::size_t b = solo_event_count(Family::lazy, w.initial, {OpKind::contains, 2});
  std::uint64_t linearizable = 0;
  RunStats st = run_exhaustive(w, [&](const Execution& ex) {
    OracleResult o = is_linearizable(derive_history(ex), w.initial);
    linearizable += o.linearizable;
  });
  CHECK(st.schedules == choose(a + b, a));
  CHECK(linearizable == st.schedules);
  CHECK(st.events_total == st.schedules * (a + b));
}

TEST_CASE("exhaustive enumeration is closed under its own choice sequences") {
  Workload w;
  w.family = Family::lazy;
  w.initial = {1};
  w.threads = {{{OpKind::remove, 1}}, {{OpKind::add, 1}}};
  std::vector<Execution> seen;
  run_exhaustive(w, [&](const Execution& ex) { seen.push_back(ex); });
  CHECK(seen.size() > 10);
  // The per-event thread fields are exactly the scheduler's choices;
  // replaying them must reproduce the execution bit for bit.
  for (const Execution& ex : seen) {
    std::vector<ThreadId> choices;
    for (const Event& e : ex.events) choices.push_back(e.thread);
    Execution replayed = run_scripted(w, choices);
    CHECK(replayed.events == ex.events);
  }
  // And all enumerated executions are distinct.
  std::set<std::string> rendered;
  for (const Execution& ex : seen) rendered.insert(trace_to_string(ex));
  CHECK(rendered.size() == seen.size());
}

TEST_CASE("random scheduling is reproducible") {
  Workload w;
  w.family = Family::hoh;
  w.initial = {2};
  w.threads = {{{OpKind::add, 1}, {OpKind::remove, 2}}, {{OpKind::contains, 1}}};
  auto runs1 = run_random(w, 0, 5);
  auto runs2 = run_random(w, 0, 5);
  REQUIRE(runs1.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(trace_to_string(runs1[i]) == trace_to_string(runs2[i]));
  CHECK(run_random(w, 0, 0).empty());
  // Distinct seeds give distinct schedules somewhere.
  auto runs3 = run_random(w, 1, 5);
  bool any_diff = false;
  for (std::size_t i = 0; i < 5; ++i)
    any_diff |= trace_to_string(runs1[i]) != trace_to_string(runs3[i]);
  CHECK(any_diff);
}

TEST_CASE("seeded 2x2 run: 100 schedules, all pass, pinned digest") {
  // mt19937_64 and seed_seq are fully specified by the standard, so the
  // byte stream of these traces is portable and can be pinned.
  Workload w;
  w.family = Family::lazy;
  w.initial = {1};
  w.threads = {{{OpKind::add, 2}, {OpKind::remove, 1}}, {{OpKind::contains, 2}, {OpKind::add, 1}}};
  auto runs = run_random(w, 42, 100);
  REQUIRE(runs.size() == 100);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  std::uint64_t pass = 0;
  for (const Execution& ex : runs) {
    for (char c : trace_to_string(ex)) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    pass += check_execution(ex, Mutation::none, w.initial).verdict.pass();
  }
  CHECK(pass == 100);
  CHECK(h == 0xfcab299904580da1ull);
}

TEST_CASE("the lpcase script reproduces the figure's event order") {
  Execution ex = lpv_test::lpcase_execution();
  REQUIRE(ex.events.size() == 36);

  // Thread 2's stale reads come after the re-insert finished.
  const Event& stale_val = ex.events[33];
  CHECK(stale_val.thread == 2);
  CHECK(stale_val.kind == EventKind::read);
  CHECK(stale_val.field == Field::val);
  CHECK(stale_val.node == 2);   // the unlinked node, not the new copy
  CHECK(stale_val.value == 7);
  const Event& stale_marked = ex.events[34];
  CHECK(stale_marked.field == Field::marked);
  CHECK(stale_marked.value == 1);
  CHECK(ex.events[35].kind == EventKind::resp);
  CHECK(ex.events[35].value == 0);

  // Responses: remove true, add true, contains false.
  History h = derive_history(ex);
  REQUIRE(h.methods.size() == 3);
  for (const MethodRecord& m : h.methods) {
    CAPTURE(to_string(m.kind));
    CHECK(*m.result == (m.kind != OpKind::contains));
  }

  // Real-time order: only remove -> add.
  REQUIRE(h.rt_order.size() == 1);
  CHECK(h.methods[h.rt_order[0].first].kind == OpKind::remove);
  CHECK(h.methods[h.rt_order[0].second].kind == OpKind::add);
}

TEST_CASE("complete_execution is the identity on complete executions") {
  Workload w;
  w.family = Family::lazy;
  w.initial = {1};
  w.threads = {{{OpKind::add, 2}}, {{OpKind::remove, 1}}};
  for (const Execution& ex : run_random(w, 5, 20)) {
    Execution completed = complete_execution(ex, w);
    CHECK(completed.events == ex.events);
  }
}

TEST_CASE("an add truncated after its publish write is completed with resp true") {
  Workload w;
  w.family = Family::lazy;
  w.initial = {};
  w.threads = {{{OpKind::add, 5}}};
  // Drive up to and including the publish write, then truncate.
  Driver d(w);
  std::size_t publish_idx = 0;
  while (true) {
    const Event& e = d.step(0);
    if (e.kind == EventKind::write && e.field == Field::next && e.node == 0) {
      publish_idx = e.seq;
      break;
    }
  }
  Execution truncated = d.execution();
  REQUIRE(truncated.events.size() == publish_idx + 1);

  Execution completed = complete_execution(truncated, w);
  History h = derive_history(completed);
  REQUIRE(h.methods.size() == 1);
  CHECK(h.methods[0].complete());
  CHECK(*h.methods[0].result == true);
  CHECK(completed.events.back().kind == EventKind::resp);
  // The two pending unlocks were appended before the response.
  CHECK(completed.events[completed.events.size() - 2].kind == EventKind::lock_release);
  CHECK(completed.events[completed.events.size() - 3].kind == EventKind::lock_release);
}

TEST_CASE("a contains truncated mid-traversal is dropped entirely") {
  Workload w;
  w.family = Family::lazy;
  w.initial = {3};
  w.threads = {{{OpKind::contains, 3}}};
  Driver d(w);
  d.step(0);
  d.step(0);  // inv + one traversal read
  Execution completed = complete_execution(d.execution(), w);
  CHECK(completed.events.empty());
  CHECK(derive_history(completed).methods.empty());
}

TEST_CASE("truncation drops exactly the methods without an executed update") {
  Workload w;
  w.family = Family::lazy;
  w.initial = {1};
  w.threads = {{{OpKind::add, 2}}, {{OpKind::remove, 1}}, {{OpKind::contains, 2}}};
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Execution full = run_random(w, seed, 1).front();
    for (std::size_t cut : {5ul, 9ul, 14ul, 20ul, full.events.size() - 2}) {
      if (cut > full.events.size()) continue;
      Execution truncated = full;
      truncated.events.resize(cut);
      Execution completed = complete_execution(truncated, w);

      // Independent classification from the truncated trace.
      AbdsTimeline tl = AbdsTimeline::build(truncated, w.initial);
      History before = derive_history(truncated);
      History after = derive_history(completed);
      for (const MethodRecord& m : before.methods) {
        bool had_update = false;
        for (std::size_t i = 0; i < truncated.events.size(); ++i)
          had_update |= truncated.events[i].method == m.id && tl.changes_at(i);
        const MethodRecord* now = after.find(m.id);
        if (m.complete() || had_update) {
          REQUIRE(now != nullptr);
          CHECK(now->complete());
        } else {
          CHECK(now == nullptr);
        }
      }
      // Completed histories are complete.
      for (const MethodRecord& m : after.methods) CHECK(m.complete());
    }
  }
}

TEST_CASE("a zero retry cap turns validation failures into livelock reports") {
  Workload w;
  w.family = Family::lazy;
  w.initial = {1};
  w.threads = {{{OpKind::remove, 1}}, {{OpKind::add, 2}}};
  w.retry_cap = 0;

  // Scripted: the add pauses after its traversal, the remove unlinks the
  // add's predecessor, the add's validation fails and the retry trips
  // the cap at the restarted traversal.
  Driver d(w);
  for (int i = 0; i < 5; ++i) d.step(1);
  d.drain_thread(0);
  CHECK_THROWS_AS(d.drain_thread(1), LivelockCap);

  // Exhaustive search prunes such branches and says so.
  RunStats st = run_exhaustive(w, nullptr);
  CHECK(st.livelock_pruned > 0);
  CHECK(st.schedules > 0);

  // With the default cap the same workload has no livelocks at all.
  Workload relaxed = w;
  relaxed.retry_cap = 1000;
  CHECK(run_exhaustive(relaxed, nullptr).livelock_pruned == 0);
}

TEST_CASE("single-thread native stress equals the simulated solo run") {
  Workload w;
  w.family = Family::hoh;
  w.initial = {2};
  w.threads = {{{OpKind::add, 1}, {OpKind::contains, 2}, {OpKind::remove, 1}}};
  Execution native = run_native_stress(w, 0, 1);
  Driver d(w);
  d.drain_thread(0);
  CHECK(native.events == d.execution().events);
}

TEST_CASE("multi-thread native stress produces a well-formed checkable trace") {
  Workload w;
  w.family = Family::lazy;
  w.initial = {2};
  w.threads = {{{OpKind::add, 1}, {OpKind::remove, 2}},
               {{OpKind::remove, 1}, {OpKind::add, 2}},
               {{OpKind::contains, 1}, {OpKind::contains, 2}}};
  Execution ex = run_native_stress(w, 42, 5);
  History h = derive_history(ex);
  CHECK(h.methods.size() == 30);
  for (const MethodRecord& m : h.methods) CHECK(m.complete());
  // Replays cleanly: reads, writes and locks all consistent.
  Replayer r(w.family, w.initial);
  for (const Event& e : ex.events) r.apply(e);
}

TEST_CASE("a mutated stress run is flagged by the checker") {
  Workload w;
  w.family = Family::lazy;
  w.initial = {1};
  w.threads = {{{OpKind::remove, 1}}, {{OpKind::contains, 1}}};
  w.mutation = Mutation::remove_skip_mark;
  Execution ex = run_native_stress(w, 1, 2);
  CheckResult res = check_execution(ex, w.mutation, w.initial);
  CHECK_FALSE(res.verdict.pass());
  CHECK(res.verdict.status == Verdict::Status::assumption_violation);
}
