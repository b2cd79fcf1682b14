#pragma once

#include "lpv/model.hpp"

namespace lpv {

// Per-event structural checks over a recorded execution:
//   sortedness         val strictly increases along every next pointer
//   chain-integrity    the head chain reaches tail without cycles
//   uniqueness         no duplicate key on the head chain
//   unmarked-reach     (lazy) every published unmarked node stays reachable
//   marked-monotone    (lazy) marked is never reset
//   marked-next-frozen (lazy) a marked node's next never changes
//   lock-coupling      (hoh) at most two locks, adjacent at acquisition
struct InvariantViolation {
  std::uint32_t event_seq = 0;
  std::string name;
  std::string detail;
};

std::vector<InvariantViolation> check_structural_invariants(const Execution& ex,
                                                            const AbstractSet& initial);

}  // namespace lpv
