#include "lpv/heap.hpp"

namespace lpv {

SimHeap SimHeap::initial_list(const AbstractSet& initial_keys) {
  SimHeap h;
  NodeId head = h.allocate(kKeyMin);
  NodeId tail = h.allocate(kKeyMax);
  NodeId prev = head;
  for (KeyValue k : initial_keys) {  // std::set iterates ascending
    assert(is_user_key(k));
    NodeId n = h.allocate(k);
    h.write_next(prev, n);
    prev = n;
  }
  h.write_next(prev, tail);
  return h;
}

AbstractSet abds_of(const SimHeap& heap, Family family) {
  AbstractSet out;
  std::size_t steps = 0;
  NodeId cur = heap.head();
  while (cur != kNullNode) {
    if (++steps > heap.size())
      throw CorruptHeap("head chain longer than allocation count (cycle?)");
    const Node& n = heap.at(cur);
    if (is_user_key(n.val)) {
      if (family == Family::hoh || !n.marked) out.insert(n.val);
    }
    cur = n.next;
  }
  return out;
}

}  // namespace lpv
