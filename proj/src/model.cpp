#include "lpv/model.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace lpv {

const char* to_string(Family f) { return f == Family::lazy ? "lazy" : "hoh"; }

Family family_from_string(const std::string& s) {
  if (s == "lazy") return Family::lazy;
  if (s == "hoh") return Family::hoh;
  throw std::invalid_argument("unknown family: " + s);
}

const char* to_string(OpKind k) {
  switch (k) {
    case OpKind::add: return "add";
    case OpKind::remove: return "remove";
    case OpKind::contains: return "contains";
  }
  return "?";
}

OpKind op_from_string(const std::string& s) {
  if (s == "add") return OpKind::add;
  if (s == "remove") return OpKind::remove;
  if (s == "contains") return OpKind::contains;
  throw std::invalid_argument("unknown op: " + s);
}

const char* to_string(Field f) {
  switch (f) {
    case Field::val: return "val";
    case Field::next: return "next";
    case Field::marked: return "marked";
  }
  return "?";
}

Field field_from_string(const std::string& s) {
  if (s == "val") return Field::val;
  if (s == "next") return Field::next;
  if (s == "marked") return Field::marked;
  throw std::invalid_argument("unknown field: " + s);
}

const char* to_string(Mutation m) {
  switch (m) {
    case Mutation::none: return "none";
    case Mutation::contains_lp_naive: return "contains-lp-naive";
    case Mutation::remove_skip_mark: return "remove-skip-mark";
    case Mutation::add_unlock_early: return "add-unlock-early";
  }
  return "?";
}

Mutation mutation_from_string(const std::string& s) {
  if (s == "none" || s.empty()) return Mutation::none;
  if (s == "contains-lp-naive") return Mutation::contains_lp_naive;
  if (s == "remove-skip-mark") return Mutation::remove_skip_mark;
  if (s == "add-unlock-early") return Mutation::add_unlock_early;
  throw std::invalid_argument("unknown mutation: " + s);
}

const MethodRecord* History::find(MethodId id) const {
  for (const auto& m : methods)
    if (m.id == id) return &m;
  return nullptr;
}

std::size_t History::index_of(MethodId id) const {
  for (std::size_t i = 0; i < methods.size(); ++i)
    if (methods[i].id == id) return i;
  throw std::out_of_range("no such method id");
}

std::vector<MethodRecord> collect_methods(const Execution& ex) {
  std::vector<MethodRecord> out;
  std::map<MethodId, std::size_t> pos;
  std::map<ThreadId, MethodId> open;  // thread -> currently pending method
  for (const Event& e : ex.events) {
    switch (e.kind) {
      case EventKind::inv: {
        auto it = open.find(e.thread);
        if (it != open.end())
          throw MalformedExecution("thread " + std::to_string(e.thread) +
                                   " invokes while a method is pending");
        MethodRecord m;
        m.id = e.method;
        m.thread = e.thread;
        m.kind = e.op;
        m.key = e.value;
        m.inv_seq = e.seq;
        pos[m.id] = out.size();
        out.push_back(m);
        open[e.thread] = e.method;
        break;
      }
      case EventKind::resp: {
        auto it = open.find(e.thread);
        if (it == open.end() || it->second != e.method)
          throw MalformedExecution("response without matching invocation");
        MethodRecord& m = out[pos.at(e.method)];
        m.resp_seq = e.seq;
        m.result = e.value != 0;
        open.erase(it);
        break;
      }
      default:
        break;
    }
  }
  return out;
}

History derive_history(const Execution& ex) {
  History h;
  h.methods = collect_methods(ex);
  for (std::size_t x = 0; x < h.methods.size(); ++x) {
    if (!h.methods[x].resp_seq) continue;
    for (std::size_t y = 0; y < h.methods.size(); ++y) {
      if (x == y) continue;
      if (*h.methods[x].resp_seq < h.methods[y].inv_seq)
        h.rt_order.emplace_back(x, y);
    }
  }
  return h;
}

std::string to_string(const AbstractSet& s) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (KeyValue k : s) {
    if (!first) os << ',';
    os << k;
    first = false;
  }
  os << '}';
  return os.str();
}

}  // namespace lpv
