#include "lpv/brute_oracle.hpp"

#include <map>

namespace lpv {

namespace {

struct Search {
  const History& h;
  std::size_t n;
  std::vector<std::uint32_t> pred;  // bitmask of methods that must precede i
  std::map<std::pair<std::uint32_t, AbstractSet>, bool> failed;
  std::vector<std::size_t> witness;
  std::uint64_t explored = 0;

  explicit Search(const History& hist) : h(hist), n(hist.methods.size()) {
    pred.assign(n, 0);
    for (const auto& [x, y] : h.rt_order) pred[y] |= 1u << x;
  }

  bool dfs(std::uint32_t done, const AbstractSet& state) {
    ++explored;
    if (done == (n == 32 ? ~0u : (1u << n) - 1)) return true;
    auto key = std::make_pair(done, state);
    if (failed.count(key)) return false;
    for (std::size_t i = 0; i < n; ++i) {
      if (done & (1u << i)) continue;
      if ((pred[i] & done) != pred[i]) continue;
      const MethodRecord& m = h.methods[i];
      SeqStep step = seq_apply(state, SeqOp{m.kind, m.key});
      if (step.result != *m.result) continue;
      if (dfs(done | (1u << i), step.post)) {
        witness.push_back(i);
        return true;
      }
    }
    failed.emplace(std::move(key), true);
    return false;
  }
};

}  // namespace

OracleResult is_linearizable(const History& h, const AbstractSet& initial,
                             std::size_t method_cap) {
  if (h.methods.size() > method_cap || h.methods.size() > 31)
    throw CapExceeded("history has " + std::to_string(h.methods.size()) +
                      " methods, above the cap of " + std::to_string(method_cap));
  for (const MethodRecord& m : h.methods)
    if (!m.complete())
      throw MalformedExecution("oracle requires a complete history; resolve pending methods first");

  Search s(h);
  OracleResult res;
  res.linearizable = s.dfs(0, initial);
  res.explored = s.explored;
  if (res.linearizable) {
    // The witness is accumulated on unwind, deepest first.
    res.witness.assign(s.witness.rbegin(), s.witness.rend());
  }
  return res;
}

}  // namespace lpv
