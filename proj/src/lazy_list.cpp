#include "lpv/lazy_list.hpp"

#include <algorithm>

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

NodeId checked_next(const SimHeap& heap, NodeId n) {
  NodeId nxt = heap.at(n).next;
  if (nxt == kNullNode) throw HeapFault("traversal stepped onto a null next pointer");
  return nxt;
}

}  // namespace

LazyMachine::LazyMachine(MethodId id, ThreadId thread, OpKind op, KeyValue key,
                         Mutation mutation, std::uint32_t retry_cap)
    : id_(id), thread_(thread), op_(op), key_(key), mutation_(mutation),
      retry_cap_(retry_cap) {}

bool LazyMachine::blocked(const SimHeap& heap) const {
  switch (pc_) {
    case Pc::loc_lock1: return heap.lock_held_by_other(n1_, thread_);
    case Pc::loc_lock2: return heap.lock_held_by_other(n2_, thread_);
    default: return false;
  }
}

Event LazyMachine::step_locate(SimHeap& heap, std::uint32_t seq) {
  switch (pc_) {
    case Pc::loc_read_next: {
      if (retries_ > retry_cap_)
        throw LivelockCap("locate exceeded retry cap " + std::to_string(retry_cap_));
      n2_ = heap.at(n1_).next;
      pc_ = Pc::loc_scan_val;
      return read_event(seq, thread_, id_, n1_, Field::next, encode_node(n2_));
    }
    case Pc::loc_scan_val: {
      KeyValue v = heap.at(n2_).val;
      pc_ = v < key_ ? Pc::loc_advance : Pc::loc_lock1;
      return read_event(seq, thread_, id_, n2_, Field::val, v);
    }
    case Pc::loc_advance: {
      NodeId old = n2_;
      n1_ = n2_;
      n2_ = checked_next(heap, old);
      pc_ = Pc::loc_scan_val;
      return read_event(seq, thread_, id_, old, Field::next, encode_node(n2_));
    }
    case Pc::loc_lock1:
      heap.lock(n1_, thread_);
      pc_ = Pc::loc_lock2;
      return lock_event(seq, thread_, id_, EventKind::lock_acquire, n1_);
    case Pc::loc_lock2:
      heap.lock(n2_, thread_);
      pc_ = Pc::val_read_m1;
      return lock_event(seq, thread_, id_, EventKind::lock_acquire, n2_);
    case Pc::val_read_m1: {
      bool m = heap.at(n1_).marked;
      pc_ = m ? Pc::loc_fail_rel1 : Pc::val_read_m2;
      return read_event(seq, thread_, id_, n1_, Field::marked, m ? 1 : 0);
    }
    case Pc::val_read_m2: {
      bool m = heap.at(n2_).marked;
      pc_ = m ? Pc::loc_fail_rel1 : Pc::val_read_next;
      return read_event(seq, thread_, id_, n2_, Field::marked, m ? 1 : 0);
    }
    case Pc::val_read_next: {
      NodeId nxt = heap.at(n1_).next;
      if (nxt == n2_)
        pc_ = op_ == OpKind::add ? Pc::add_check : Pc::rem_check;
      else
        pc_ = Pc::loc_fail_rel1;
      return read_event(seq, thread_, id_, n1_, Field::next, encode_node(nxt));
    }
    case Pc::loc_fail_rel1:
      heap.unlock(n1_, thread_);
      pc_ = Pc::loc_fail_rel2;
      return lock_event(seq, thread_, id_, EventKind::lock_release, n1_);
    case Pc::loc_fail_rel2:
      heap.unlock(n2_, thread_);
      ++retries_;
      n1_ = heap.head();
      pc_ = Pc::loc_read_next;
      return lock_event(seq, thread_, id_, EventKind::lock_release, n2_);
    default:
      assert(false && "not a locate pc");
      return {};
  }
}

Event LazyMachine::step(SimHeap& heap, std::uint32_t seq) {
  assert(!done());
  assert(!blocked(heap));
  switch (pc_) {
    case Pc::inv: {
      Event e = base_event(seq, thread_, id_, EventKind::inv);
      e.op = op_;
      e.value = key_;
      if (op_ == OpKind::contains) {
        n_ = heap.head();
        pc_ = Pc::con_scan_val;
      } else {
        n1_ = heap.head();
        pc_ = Pc::loc_read_next;
      }
      return e;
    }

    case Pc::loc_read_next:
    case Pc::loc_scan_val:
    case Pc::loc_advance:
    case Pc::loc_lock1:
    case Pc::loc_lock2:
    case Pc::val_read_m1:
    case Pc::val_read_m2:
    case Pc::val_read_next:
    case Pc::loc_fail_rel1:
    case Pc::loc_fail_rel2:
      return step_locate(heap, seq);

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
        pc_ = mutation_ == Mutation::remove_skip_mark ? Pc::rem_unlink : Pc::rem_mark;
      } else {
        result_ = false;
        pc_ = Pc::unlock1;
      }
      return read_event(seq, thread_, id_, n2_, Field::val, v);
    }
    case Pc::rem_mark:
      heap.write_marked(n2_, true);
      pc_ = Pc::rem_unlink;
      return write_event(seq, thread_, id_, n2_, Field::marked, 1);
    case Pc::rem_unlink: {
      NodeId nxt = heap.at(n2_).next;
      heap.write_next(n1_, nxt);
      result_ = true;
      pc_ = Pc::unlock1;
      return write_event(seq, thread_, id_, n1_, Field::next, encode_node(nxt));
    }

    case Pc::con_scan_val: {
      KeyValue v = heap.at(n_).val;
      pc_ = v < key_ ? Pc::con_scan_next : Pc::con_check_val;
      return read_event(seq, thread_, id_, n_, Field::val, v);
    }
    case Pc::con_scan_next: {
      NodeId old = n_;
      n_ = checked_next(heap, old);
      pc_ = Pc::con_scan_val;
      return read_event(seq, thread_, id_, old, Field::next, encode_node(n_));
    }
    case Pc::con_check_val: {
      KeyValue v = heap.at(n_).val;
      if (v != key_) {
        result_ = false;
        pc_ = Pc::resp;
      } else {
        pc_ = Pc::con_check_marked;
      }
      return read_event(seq, thread_, id_, n_, Field::val, v);
    }
    case Pc::con_check_marked: {
      bool m = heap.at(n_).marked;
      result_ = !m;
      pc_ = Pc::resp;
      return read_event(seq, thread_, id_, n_, Field::marked, m ? 1 : 0);
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

std::vector<MethodCandidates> lazy_candidate_lp_markers(const Execution& ex,
                                                        Mutation mutation) {
  const std::vector<MethodRecord> methods = collect_methods(ex);
  std::vector<MethodCandidates> out;
  out.reserve(methods.size());

  // Per-method event scans.  The rulebook is purely syntactic: it sees
  // only the trace, never the machine internals.
  auto events_of = [&](MethodId id) {
    std::vector<const Event*> es;
    for (const Event& e : ex.events)
      if (e.method == id) es.push_back(&e);
    return es;
  };

  auto last_matching = [](const std::vector<const Event*>& es, auto pred)
      -> std::optional<std::uint32_t> {
    for (auto it = es.rbegin(); it != es.rend(); ++it)
      if (pred(**it)) return (*it)->seq;
    return std::nullopt;
  };

  // Publish writes of completed add(key,true) methods, for the dummy rule.
  struct PublishWrite {
    std::uint32_t seq;
    KeyValue key;
    MethodId method;
  };
  std::vector<PublishWrite> publishes;
  for (const MethodRecord& m : methods) {
    if (m.kind != OpKind::add || !m.result || !*m.result) continue;
    auto es = events_of(m.id);
    auto seq = last_matching(es, [](const Event& e) {
      return e.kind == EventKind::write && e.field == Field::next;
    });
    if (seq) publishes.push_back({*seq, m.key, m.id});
  }

  for (const MethodRecord& m : methods) {
    MethodCandidates c;
    c.method = m.id;
    if (!m.complete()) {
      out.push_back(std::move(c));
      continue;
    }
    auto es = events_of(m.id);
    const bool res = *m.result;
    switch (m.kind) {
      case OpKind::add:
        if (res) {
          // write(n1.next, n3): the last next-field write of the method.
          c.own = last_matching(es, [](const Event& e) {
            return e.kind == EventKind::write && e.field == Field::next;
          });
        } else {
          // read(n2.val) at the post-locate check.
          c.own = last_matching(es, [](const Event& e) {
            return e.kind == EventKind::read && e.field == Field::val;
          });
        }
        break;
      case OpKind::remove:
        if (res) {
          // write(n2.marked, true); unique per method.
          c.own = last_matching(es, [](const Event& e) {
            return e.kind == EventKind::write && e.field == Field::marked && e.value != 0;
          });
        } else {
          c.own = last_matching(es, [](const Event& e) {
            return e.kind == EventKind::read && e.field == Field::val;
          });
        }
        break;
      case OpKind::contains:
        if (res) {
          // read(n.marked) at the final test.
          c.own = last_matching(es, [](const Event& e) {
            return e.kind == EventKind::read && e.field == Field::marked;
          });
        } else {
          // The deciding read is the last read the method executed:
          // the val read when it returned false on a key mismatch, the
          // marked read when it found the node logically deleted.
          c.own = last_matching(es, [](const Event& e) { return e.kind == EventKind::read; });
          // Dummy rule: a concurrent add(key,true) whose publish write
          // lands inside (inv, deciding read) qualifies as an anchor.
          if (mutation != Mutation::contains_lp_naive && c.own) {
            for (const PublishWrite& w : publishes) {
              if (w.key == m.key && w.seq > m.inv_seq && w.seq < *c.own)
                c.anchors.push_back(w.seq);
            }
            std::sort(c.anchors.begin(), c.anchors.end());
          }
        }
        break;
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace lpv
