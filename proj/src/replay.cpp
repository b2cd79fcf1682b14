#include "lpv/replay.hpp"

namespace lpv {

namespace {

[[noreturn]] void bad(const Event& e, const std::string& why) {
  throw MalformedExecution("event " + std::to_string(e.seq) + ": " + why);
}

}  // namespace

void Replayer::apply(const Event& e) {
  switch (e.kind) {
    case EventKind::inv:
    case EventKind::resp:
    case EventKind::dummy:
      return;
    case EventKind::read: {
      if (!heap_.valid(e.node)) bad(e, "read of unallocated node");
      const Node& n = heap_.at(e.node);
      switch (e.field) {
        case Field::val:
          if (n.val != e.value) bad(e, "val read disagrees with replayed heap");
          break;
        case Field::next:
          if (n.next != decode_node(e.value)) bad(e, "next read disagrees with replayed heap");
          break;
        case Field::marked:
          if (n.marked != (e.value != 0)) bad(e, "marked read disagrees with replayed heap");
          break;
      }
      return;
    }
    case EventKind::write:
      switch (e.field) {
        case Field::val:
          // Allocation: val is written exactly once, at node birth.
          if (heap_.valid(e.node)) bad(e, "val write to an existing node");
          heap_.allocate_at(e.node, e.value);
          return;
        case Field::next:
          if (!heap_.valid(e.node)) bad(e, "next write to unallocated node");
          heap_.write_next(e.node, decode_node(e.value));
          return;
        case Field::marked:
          if (!heap_.valid(e.node)) bad(e, "marked write to unallocated node");
          heap_.write_marked(e.node, e.value != 0);
          return;
      }
      return;
    case EventKind::lock_acquire: {
      if (!heap_.valid(e.node)) bad(e, "lock of unallocated node");
      if (heap_.at(e.node).locked_by.has_value()) bad(e, "lock acquired while held");
      heap_.lock(e.node, e.thread);
      return;
    }
    case EventKind::lock_release: {
      if (!heap_.valid(e.node)) bad(e, "unlock of unallocated node");
      const auto& owner = heap_.at(e.node).locked_by;
      if (!owner || *owner != e.thread) bad(e, "unlock by non-owner");
      heap_.unlock(e.node, e.thread);
      return;
    }
  }
}

AbdsTimeline AbdsTimeline::build(const Execution& ex, const AbstractSet& initial) {
  AbdsTimeline t;
  Replayer r(ex.family, initial);
  t.initial = abds_of(r.heap(), ex.family);
  t.after.reserve(ex.events.size());
  for (const Event& e : ex.events) {
    r.apply(e);
    if (e.kind == EventKind::write)
      t.after.push_back(abds_of(r.heap(), ex.family));
    else
      t.after.push_back(t.after.empty() ? t.initial : t.after.back());
  }
  return t;
}

}  // namespace lpv
