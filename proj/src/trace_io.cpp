#include "lpv/trace_io.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>
#include <sstream>

namespace lpv {

namespace {

using json = nlohmann::ordered_json;

const char* kind_string(const Event& e) {
  switch (e.kind) {
    case EventKind::read: return "read";
    case EventKind::write: return "write";
    case EventKind::lock_acquire: return "lock_acquire";
    case EventKind::lock_release: return "lock_release";
    case EventKind::dummy: return "dummy";
    case EventKind::inv:
      switch (e.op) {
        case OpKind::add: return "inv_add";
        case OpKind::remove: return "inv_remove";
        case OpKind::contains: return "inv_contains";
      }
      break;
    case EventKind::resp:
      switch (e.op) {
        case OpKind::add: return "resp_add";
        case OpKind::remove: return "resp_remove";
        case OpKind::contains: return "resp_contains";
      }
      break;
  }
  return "?";
}

json cell_value_json(const Event& e) {
  switch (e.field) {
    case Field::val: return e.value;
    case Field::marked: return e.value != 0;
    case Field::next: {
      NodeId n = decode_node(e.value);
      if (n == kNullNode) return nullptr;
      return n;
    }
  }
  return nullptr;
}

json event_to_json(const Event& e) {
  json j;
  j["seq"] = e.seq;
  j["thread"] = e.thread;
  j["method"] = e.method;
  j["kind"] = kind_string(e);
  switch (e.kind) {
    case EventKind::inv:
      j["value"] = e.value;
      break;
    case EventKind::resp:
      j["value"] = e.value != 0;
      break;
    case EventKind::read:
    case EventKind::write:
      j["node"] = e.node;
      j["field"] = to_string(e.field);
      j["value"] = cell_value_json(e);
      break;
    case EventKind::lock_acquire:
    case EventKind::lock_release:
      j["node"] = e.node;
      break;
    case EventKind::dummy:
      j["anchor"] = e.anchor;
      break;
  }
  return j;
}

Event event_from_json(const json& j) {
  Event e;
  e.seq = j.at("seq").get<std::uint32_t>();
  e.thread = j.at("thread").get<ThreadId>();
  e.method = j.at("method").get<MethodId>();
  const std::string kind = j.at("kind").get<std::string>();
  auto inv_resp = [&](EventKind k, OpKind op) {
    e.kind = k;
    e.op = op;
    if (k == EventKind::inv)
      e.value = j.at("value").get<std::int64_t>();
    else
      e.value = j.at("value").get<bool>() ? 1 : 0;
  };
  if (kind == "inv_add") inv_resp(EventKind::inv, OpKind::add);
  else if (kind == "inv_remove") inv_resp(EventKind::inv, OpKind::remove);
  else if (kind == "inv_contains") inv_resp(EventKind::inv, OpKind::contains);
  else if (kind == "resp_add") inv_resp(EventKind::resp, OpKind::add);
  else if (kind == "resp_remove") inv_resp(EventKind::resp, OpKind::remove);
  else if (kind == "resp_contains") inv_resp(EventKind::resp, OpKind::contains);
  else if (kind == "read" || kind == "write") {
    e.kind = kind == "read" ? EventKind::read : EventKind::write;
    e.node = j.at("node").get<NodeId>();
    e.field = field_from_string(j.at("field").get<std::string>());
    const json& v = j.at("value");
    switch (e.field) {
      case Field::val: e.value = v.get<std::int64_t>(); break;
      case Field::marked: e.value = v.get<bool>() ? 1 : 0; break;
      case Field::next:
        e.value = v.is_null() ? -1 : static_cast<std::int64_t>(v.get<NodeId>());
        break;
    }
  } else if (kind == "lock_acquire" || kind == "lock_release") {
    e.kind = kind == "lock_acquire" ? EventKind::lock_acquire : EventKind::lock_release;
    e.node = j.at("node").get<NodeId>();
  } else if (kind == "dummy") {
    e.kind = EventKind::dummy;
    e.anchor = j.at("anchor").get<std::uint32_t>();
  } else {
    throw TraceParseError("unknown event kind: " + kind);
  }
  return e;
}

}  // namespace

void write_trace(std::ostream& os, const Execution& ex) {
  json header;
  header["trace_version"] = 1;
  header["family"] = to_string(ex.family);
  os << header.dump() << '\n';
  for (const Event& e : ex.events) os << event_to_json(e).dump() << '\n';
}

std::string trace_to_string(const Execution& ex) {
  std::ostringstream os;
  write_trace(os, ex);
  return os.str();
}

Execution read_trace(std::istream& is) {
  Execution ex;
  std::string line;
  if (!std::getline(is, line)) throw TraceParseError("empty trace: missing header");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw TraceParseError(std::string("bad header: ") + e.what());
  }
  if (!header.contains("trace_version") || header["trace_version"].get<int>() != 1)
    throw TraceParseError("unsupported trace_version");
  ex.family = family_from_string(header.at("family").get<std::string>());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    try {
      ex.events.push_back(event_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw TraceParseError(std::string("bad event line: ") + e.what());
    }
  }
  return ex;
}

Execution trace_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_trace(is);
}

}  // namespace lpv
