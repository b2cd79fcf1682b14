#pragma once

#include "lpv/model.hpp"

namespace lpv {

// Syntactic LP candidates for one method instance, as produced by the
// per-family rulebooks.  `own` is the event inside the method's own code
// matching its LP rule.  `anchors` lists the publish writes of
// concurrent successful adds on the same key that qualify for the
// dummy-LP rule of a failed contains (lazy only); the dummy would sit
// immediately before the anchor.
struct MethodCandidates {
  MethodId method = kNoMethod;
  std::optional<std::uint32_t> own;
  std::vector<std::uint32_t> anchors;
};

// Signals livelock-cap overflow in the lazy locate retry loop.
struct LivelockCap : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lpv
