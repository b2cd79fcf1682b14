#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

// Shared vocabulary for the whole toolkit: keys, atomic events, method
// records, executions and histories.  Everything here is a plain value
// type; construction happens single-threaded per execution and the
// results are immutable afterwards.

namespace lpv {

using KeyValue = std::int64_t;

// Sentinel keys for the permanent head/tail nodes.  User keys must lie
// strictly between them.
inline constexpr KeyValue kKeyMin = INT64_MIN;
inline constexpr KeyValue kKeyMax = INT64_MAX;

inline bool is_user_key(KeyValue k) { return k != kKeyMin && k != kKeyMax; }

using NodeId = std::uint32_t;
inline constexpr NodeId kNullNode = UINT32_MAX;

using ThreadId = std::uint16_t;
using MethodId = std::uint32_t;
inline constexpr MethodId kNoMethod = UINT32_MAX;

enum class Family { lazy, hoh };

const char* to_string(Family f);
Family family_from_string(const std::string& s);

enum class OpKind { add, remove, contains };

const char* to_string(OpKind k);
OpKind op_from_string(const std::string& s);

// Node fields that can appear in read/write events.  Closed on purpose:
// the assumption checker decides ABDS-relevance syntactically.
enum class Field { val, next, marked };

const char* to_string(Field f);
Field field_from_string(const std::string& s);

enum class EventKind { inv, resp, read, write, lock_acquire, lock_release, dummy };

// Named fault-injection switches.  Each one breaks a specific claim the
// checkers must catch:
//   contains_lp_naive - suppress the dummy-LP rule for failed contains,
//                       always linearize at the method's own read
//   remove_skip_mark  - lazy remove unlinks without marking first
//   add_unlock_early  - release the predecessor lock before the publish
//                       write in add
enum class Mutation { none, contains_lp_naive, remove_skip_mark, add_unlock_early };

const char* to_string(Mutation m);
Mutation mutation_from_string(const std::string& s);

struct Event {
  std::uint32_t seq = 0;
  ThreadId thread = 0;
  MethodId method = kNoMethod;
  EventKind kind = EventKind::inv;
  OpKind op = OpKind::add;    // inv/resp only
  NodeId node = kNullNode;    // read/write/lock_*
  Field field = Field::val;   // read/write
  // Payload, interpreted per kind/field:
  //   inv            -> invocation key
  //   resp           -> 0/1 result
  //   read/write val -> key
  //   read/write next-> node id, or kNullNode encoded as -1
  //   read/write marked -> 0/1
  std::int64_t value = 0;
  std::uint32_t anchor = 0;   // dummy only: seq of the write it precedes

  bool operator==(const Event&) const = default;
};

inline std::int64_t encode_node(NodeId n) {
  return n == kNullNode ? -1 : static_cast<std::int64_t>(n);
}
inline NodeId decode_node(std::int64_t v) {
  return v < 0 ? kNullNode : static_cast<NodeId>(v);
}

struct Execution {
  Family family = Family::lazy;
  std::vector<Event> events;
};

// One method instance as seen from the trace.  resp_seq/result are empty
// for pending methods of a truncated execution.
struct MethodRecord {
  MethodId id = kNoMethod;
  ThreadId thread = 0;
  OpKind kind = OpKind::add;
  KeyValue key = 0;
  std::uint32_t inv_seq = 0;
  std::optional<std::uint32_t> resp_seq;
  std::optional<bool> result;

  bool complete() const { return resp_seq.has_value(); }
};

struct History {
  // Indexed by position; ids are preserved from the execution and may be
  // sparse after completion dropped some pending methods.
  std::vector<MethodRecord> methods;
  // Real-time order: (x, y) with resp(x) < inv(y).  Pairs hold positions
  // into `methods`, not MethodIds.
  std::vector<std::pair<std::size_t, std::size_t>> rt_order;

  const MethodRecord* find(MethodId id) const;
  std::size_t index_of(MethodId id) const;
};

struct MalformedExecution : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inv/Resp projection of an execution, with the derived real-time order.
History derive_history(const Execution& ex);

// Method records alone (identical to derive_history(ex).methods).
std::vector<MethodRecord> collect_methods(const Execution& ex);

using AbstractSet = std::set<KeyValue>;

std::string to_string(const AbstractSet& s);

}  // namespace lpv
