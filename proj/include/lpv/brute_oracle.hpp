#pragma once

#include "lpv/seq_spec.hpp"

// Independent linearizability decision for small complete histories:
// searches for a total order of the methods that extends the real-time
// order and replays under the sequential specification with every
// recorded response reproduced.  Used as the ground truth against which
// the LP-based checker is validated.

namespace lpv {

struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  bool linearizable = false;
  // Positions into history.methods in linearization order, present when
  // linearizable.
  std::vector<std::size_t> witness;
  std::uint64_t explored = 0;
};

inline constexpr std::size_t kDefaultOracleCap = 8;

OracleResult is_linearizable(const History& h, const AbstractSet& initial,
                             std::size_t method_cap = kDefaultOracleCap);

}  // namespace lpv
