#include "lpv/hoh_list.hpp"

namespace lpv {

namespace {

Event base_event(std::uint32_t seq, ThreadId t, MethodId m, EventKind kind) {
  Event e;
  e.seq = seq;
  e.thread = t;
  e.method = m;
  e.kind = kind;
  return e;
}

Event read_event(std::uint32_t seq, ThreadId t, MethodId m, NodeId node, Field f,
                 std::int64_t value) {
  Event e = base_event(seq, t, m, EventKind::read);
  e.node = node;
  e.field = f;
  e.value = value;
  return e;
}

Event write_event(std::uint32_t seq, ThreadId t, MethodId m, NodeId node, Field f,
                  std::int64_t value) {
  Event e = base_event(seq, t, m, EventKind::write);
  e.node = node;
  e.field = f;
  e.value = value;
  return e;
}

Event lock_event(std::uint32_t seq, ThreadId t, MethodId m, EventKind kind, NodeId node) {
  Event e = base_event(seq, t, m, kind);
  e.node = node;
  return e;
}

}  // namespace

HoHMachine::HoHMachine(MethodId id, ThreadId thread, OpKind op, KeyValue key,
                       Mutation mutation)
    : id_(id), thread_(thread), op_(op), key_(key), mutation_(mutation) {}

bool HoHMachine::blocked(const SimHeap& heap) const {
  switch (pc_) {
    case Pc::loc_lock_head: return heap.lock_held_by_other(heap.head(), thread_);
    case Pc::loc_lock2: return heap.lock_held_by_other(n2_, thread_);
    default: return false;
  }
}

Event HoHMachine::step(SimHeap& heap, std::uint32_t seq) {
  assert(!done());
  assert(!blocked(heap));
  switch (pc_) {
    case Pc::inv: {
      Event e = base_event(seq, thread_, id_, EventKind::inv);
      e.op = op_;
      e.value = key_;
      pc_ = Pc::loc_lock_head;
      return e;
    }
    case Pc::loc_lock_head:
      n1_ = heap.head();
      heap.lock(n1_, thread_);
      pc_ = Pc::loc_read_next;
      return lock_event(seq, thread_, id_, EventKind::lock_acquire, n1_);
    case Pc::loc_read_next: {
      n2_ = heap.at(n1_).next;
      if (n2_ == kNullNode) throw HeapFault("coupled traversal hit a null next pointer");
      pc_ = Pc::loc_lock2;
      return read_event(seq, thread_, id_, n1_, Field::next, encode_node(n2_));
    }
    case Pc::loc_lock2:
      heap.lock(n2_, thread_);
      pc_ = Pc::loc_scan_val;
      return lock_event(seq, thread_, id_, EventKind::lock_acquire, n2_);
    case Pc::loc_scan_val: {
      KeyValue v = heap.at(n2_).val;
      if (v < key_) {
        pc_ = Pc::loc_rel_prev;
      } else {
        switch (op_) {
          case OpKind::add: pc_ = Pc::add_check; break;
          case OpKind::remove: pc_ = Pc::rem_check; break;
          case OpKind::contains: pc_ = Pc::con_check; break;
        }
      }
      return read_event(seq, thread_, id_, n2_, Field::val, v);
    }
    case Pc::loc_rel_prev: {
      heap.unlock(n1_, thread_);
      Event e = lock_event(seq, thread_, id_, EventKind::lock_release, n1_);
      n1_ = n2_;
      pc_ = Pc::loc_read_next;
      return e;
    }

    case Pc::add_check: {
      KeyValue v = heap.at(n2_).val;
      if (v != key_) {
        pc_ = Pc::add_alloc;
      } else {
        result_ = false;
        pc_ = Pc::unlock1;
      }
      return read_event(seq, thread_, id_, n2_, Field::val, v);
    }
    case Pc::add_alloc:
      n3_ = heap.allocate(key_);
      pc_ = Pc::add_link_new;
      return write_event(seq, thread_, id_, n3_, Field::val, key_);
    case Pc::add_link_new:
      heap.write_next(n3_, n2_);
      pc_ = mutation_ == Mutation::add_unlock_early ? Pc::early_unlock_n1 : Pc::add_publish;
      return write_event(seq, thread_, id_, n3_, Field::next, encode_node(n2_));
    case Pc::early_unlock_n1:
      heap.unlock(n1_, thread_);
      released_n1_ = true;
      pc_ = Pc::add_publish;
      return lock_event(seq, thread_, id_, EventKind::lock_release, n1_);
    case Pc::add_publish:
      heap.write_next(n1_, n3_);
      result_ = true;
      pc_ = released_n1_ ? Pc::unlock2 : Pc::unlock1;
      return write_event(seq, thread_, id_, n1_, Field::next, encode_node(n3_));

    case Pc::rem_check: {
      KeyValue v = heap.at(n2_).val;
      if (v == key_) {
        pc_ = Pc::rem_unlink;
      } else {
        result_ = false;
        pc_ = Pc::unlock1;
      }
      return read_event(seq, thread_, id_, n2_, Field::val, v);
    }
    case Pc::rem_unlink: {
      NodeId nxt = heap.at(n2_).next;
      heap.write_next(n1_, nxt);
      result_ = true;
      pc_ = Pc::unlock1;
      return write_event(seq, thread_, id_, n1_, Field::next, encode_node(nxt));
    }

    case Pc::con_check: {
      KeyValue v = heap.at(n2_).val;
      result_ = v == key_;
      pc_ = Pc::unlock1;
      return read_event(seq, thread_, id_, n2_, Field::val, v);
    }

    case Pc::unlock1:
      heap.unlock(n1_, thread_);
      pc_ = Pc::unlock2;
      return lock_event(seq, thread_, id_, EventKind::lock_release, n1_);
    case Pc::unlock2:
      heap.unlock(n2_, thread_);
      pc_ = Pc::resp;
      return lock_event(seq, thread_, id_, EventKind::lock_release, n2_);
    case Pc::resp: {
      Event e = base_event(seq, thread_, id_, EventKind::resp);
      e.op = op_;
      e.value = result_ ? 1 : 0;
      pc_ = Pc::finished;
      return e;
    }
    case Pc::finished:
      break;
  }
  assert(false && "step on finished machine");
  return {};
}

std::vector<MethodCandidates> hoh_candidate_lp_markers(const Execution& ex, Mutation) {
  const std::vector<MethodRecord> methods = collect_methods(ex);
  std::vector<MethodCandidates> out;
  out.reserve(methods.size());
  for (const MethodRecord& m : methods) {
    MethodCandidates c;
    c.method = m.id;
    if (!m.complete()) {
      out.push_back(std::move(c));
      continue;
    }
    const bool res = *m.result;
    // Successful updates linearize at their only structural write
    // (publish for add, unlink for remove); everything else linearizes
    // at the final val read.
    const bool write_lp = (m.kind == OpKind::add || m.kind == OpKind::remove) && res;
    for (auto it = ex.events.rbegin(); it != ex.events.rend(); ++it) {
      const Event& e = *it;
      if (e.method != m.id) continue;
      if (write_lp) {
        if (e.kind == EventKind::write && e.field == Field::next) {
          c.own = e.seq;
          break;
        }
      } else if (e.kind == EventKind::read && e.field == Field::val) {
        c.own = e.seq;
        break;
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace lpv
