#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "lpv/brute_oracle.hpp"
#include "lpv/report.hpp"

// Batch entry point: load a workload, run the schedule engine in the
// requested mode, check every produced execution, and emit a
// deterministic JSON report.
//
// Exit codes: 0 all schedules pass (and the oracle agrees when
// cross-checking), 1 any violation or disagreement, 2 usage/IO errors.

namespace {

struct StopRun {};

struct Options {
  std::string workload_path;
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> count;
  bool cross_check = false;
  std::string mutation;
  std::optional<std::uint64_t> truncate_after;
  std::string out_path;
  bool fail_fast = false;
};

lpv::ScheduleOutcome check_one(const lpv::Execution& ex, const lpv::Workload& w,
                               std::uint64_t schedule_id, bool cross_check) {
  lpv::ScheduleOutcome outcome;
  outcome.schedule_id = schedule_id;

  lpv::Execution complete = lpv::complete_execution(ex, w);
  lpv::CheckResult res = lpv::check_execution(complete, w.mutation, w.initial);
  outcome.verdict = res.verdict;
  for (const lpv::LpEntry& e : res.lps.entries)
    if (e.anchor_candidates > 1) outcome.anchor_choices.emplace_back(e.method, e.anchor_candidates);

  if (cross_check) {
    try {
      lpv::OracleResult o = lpv::is_linearizable(lpv::derive_history(complete), w.initial);
      outcome.oracle_linearizable = o.linearizable;
    } catch (const lpv::CapExceeded&) {
      outcome.oracle_skipped = true;
    }
  }
  return outcome;
}

int run(const Options& opt) {
  lpv::Workload w = lpv::load_workload(opt.workload_path);
  if (!opt.mutation.empty()) w.mutation = lpv::mutation_from_string(opt.mutation);
  if (opt.truncate_after) w.truncate_after = *opt.truncate_after;
  if (const char* cap = std::getenv("LPV_RETRY_CAP")) w.retry_cap = std::strtoul(cap, nullptr, 10);
  w.validate();

  lpv::RunReport report;
  report.workload = w;

  auto note = [&](lpv::ScheduleOutcome outcome) {
    bool failed = !outcome.verdict.pass();
    report.outcomes.push_back(std::move(outcome));
    ++report.schedules_checked;
    if (failed && opt.fail_fast) throw StopRun{};
  };

  if (opt.mode == "exhaustive") {
    std::uint64_t id = 0;
    try {
      lpv::RunStats stats = lpv::run_exhaustive(w, [&](const lpv::Execution& ex) {
        note(check_one(ex, w, id++, opt.cross_check));
      });
      report.livelocks = stats.livelock_pruned;
    } catch (const StopRun&) {
    }
  } else if (opt.mode == "random") {
    lpv::RunStats stats;
    std::vector<lpv::Execution> runs = lpv::run_random(w, *opt.seed, *opt.count, &stats);
    report.livelocks = stats.livelock_pruned;
    try {
      for (std::uint64_t id = 0; id < runs.size(); ++id)
        note(check_one(runs[id], w, id, opt.cross_check));
    } catch (const StopRun&) {
    }
  } else {  // stress
    std::uint32_t rounds = static_cast<std::uint32_t>(opt.count.value_or(1));
    lpv::Execution ex = lpv::run_native_stress(w, opt.seed.value_or(0), rounds);
    note(check_one(ex, w, 0, opt.cross_check));
  }

  std::string rendered = lpv::render_report(report);
  if (opt.out_path.empty()) {
    std::cout << rendered;
  } else {
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write report to " << opt.out_path << "\n";
      return 2;
    }
    out << rendered;
    if (!out) {
      std::cerr << "error: short write to " << opt.out_path << "\n";
      return 2;
    }
  }

  std::uint64_t violations = 0;
  for (const auto& o : report.outcomes)
    if (!o.verdict.pass()) ++violations;
  if (violations > 0) {
    std::cerr << violations << " of " << report.schedules_checked << " schedules failed; first: "
              << [&] {
                   for (const auto& o : report.outcomes)
                     if (!o.verdict.pass()) return o.verdict.summary();
                   return std::string();
                 }()
              << "\n";
    return 1;
  }
  if (report.any_disagreement()) {
    std::cerr << "oracle disagreement detected\n";
    return 1;
  }
  std::cerr << report.schedules_checked << " schedules checked, all pass\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Validate linearization points of simulated lock-based sets"};
  app.name("check");

  Options opt;
  app.add_option("--workload", opt.workload_path, "workload JSON file")->required();
  app.add_option("--mode", opt.mode, "exhaustive | random | stress")
      ->required()
      ->check(CLI::IsMember({"exhaustive", "random", "stress"}));
  app.add_option("--seed", opt.seed, "scheduler seed (random mode; stress jitter)");
  app.add_option("--count", opt.count, "schedules to run (random) or rounds per thread (stress)");
  app.add_flag("--cross-check", opt.cross_check, "also run the brute-force linearizability oracle");
  app.add_option("--mutation", opt.mutation, "override the workload's fault-injection switch");
  app.add_option("--truncate-after", opt.truncate_after, "stop each schedule after N events");
  app.add_option("--out", opt.out_path, "report path (default: stdout)");
  app.add_flag("--fail-fast", opt.fail_fast, "stop checking after the first violation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (opt.mode == "exhaustive" && (opt.seed || opt.count)) {
    std::cerr << "error: --seed/--count do not apply to exhaustive mode\n";
    return 2;
  }
  if (opt.mode == "random" && (!opt.seed || !opt.count)) {
    std::cerr << "error: random mode requires --seed and --count\n";
    return 2;
  }

  try {
    return run(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
