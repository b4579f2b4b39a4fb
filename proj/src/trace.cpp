#include "efd/trace.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace efd {

const char* action_name(ActionKind k) {
  switch (k) {
    case ActionKind::Read:
      return "read";
    case ActionKind::Write:
      return "write";
    case ActionKind::QueryFd:
      return "query";
    case ActionKind::Decide:
      return "decide";
    default:
      return "null";
  }
}

ActionKind parse_action_name(std::string_view s) {
  if (s == "read") return ActionKind::Read;
  if (s == "write") return ActionKind::Write;
  if (s == "query") return ActionKind::QueryFd;
  if (s == "decide") return ActionKind::Decide;
  if (s == "null") return ActionKind::Null;
  throw TraceFormatError("unknown action " + std::string(s));
}

std::string Action::str() const {
  std::string out = action_name(kind);
  if (layer) out += "@" + std::to_string(layer);
  if (reg.valid()) out += " " + reg.str();
  if (kind == ActionKind::Write || kind == ActionKind::Decide) out += " " + value.str();
  return out;
}

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Quiescent:
      return "quiescent";
    case StopReason::Horizon:
      return "horizon";
    default:
      return "script";
  }
}

IoVectors extract_io(const RunTrace& t, int layer) {
  IoVectors io;
  io.inputs.assign(t.m, Value());
  io.outputs.assign(t.m, Value());
  std::vector<char> joined(t.m, 0);
  for (const auto& e : t.events) {
    if (e.pid.role != Role::C || e.action.layer != layer) continue;
    int i = e.pid.index - 1;
    if (e.action.kind == ActionKind::Write && !joined[i]) {
      joined[i] = 1;
      io.inputs[i] = e.action.value;
    } else if (e.action.kind == ActionKind::Decide && io.outputs[i].is_bottom()) {
      io.outputs[i] = e.action.value;
    }
  }
  for (int i = 0; i < t.m; ++i)
    if (joined[i] && io.outputs[i].is_bottom()) io.undecided.push_back(i + 1);
  return io;
}

std::vector<std::int64_t> step_counts(const RunTrace& t) {
  std::vector<std::int64_t> c(t.m + t.n, 0);
  for (const auto& e : t.events) ++c[slot(t, e.pid)];
  return c;
}

RunTrace project_layer(const RunTrace& t, int layer) {
  RunTrace p;
  p.m = t.m;
  p.n = t.n;
  p.inputs = t.inputs;
  p.pattern = t.pattern;
  p.horizon = t.horizon;
  p.stop = t.stop;
  p.complete = t.complete;
  p.digest = t.digest;
  for (const auto& e : t.events) {
    if (e.action.layer != layer) continue;
    Event c = e;
    c.action.layer = 0;
    p.events.push_back(std::move(c));
  }
  return p;
}

void write_trace(std::ostream& os, const RunTrace& t) {
  os << "# efd-trace 1\n";
  os << "# digest " << (t.digest.empty() ? "-" : t.digest) << "\n";
  os << "# m " << t.m << " n " << t.n << "\n";
  os << "# pattern " << t.pattern.str() << "\n";
  os << "# horizon " << t.horizon << "\n";
  os << "# inputs";
  for (const auto& v : t.inputs) os << ' ' << v.str();
  os << "\n";
  for (const auto& [k, v] : t.meta) os << "# meta " << k << ' ' << v << "\n";
  for (const auto& e : t.events) {
    os << e.step << ' ' << e.time << ' ' << (e.pid.role == Role::C ? 'C' : 'S') << ' '
       << e.pid.index << ' ' << action_name(e.action.kind);
    if (e.action.layer) os << '@' << static_cast<int>(e.action.layer);
    os << ' ' << (e.action.reg.valid() ? e.action.reg.str() : "-") << ' ' << e.action.value.str()
       << ' ' << e.observation.str() << "\n";
  }
  os << "# end steps " << t.events.size() << " stop " << stop_reason_name(t.stop) << "\n";
}

std::string trace_text(const RunTrace& t) {
  std::ostringstream os;
  write_trace(os, t);
  return os.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

std::int64_t to_int(const std::string& s) {
  try {
    std::size_t pos = 0;
    auto v = std::stoll(s, &pos);
    if (pos != s.size()) throw TraceFormatError("bad integer " + s);
    return v;
  } catch (const std::logic_error&) {
    throw TraceFormatError("bad integer " + s);
  }
}

FailurePattern parse_pattern(const std::string& s, int n) {
  std::map<int, Time> crashes;
  if (s != "none") {
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) {
      auto colon = item.find(':');
      if (colon == std::string::npos) throw TraceFormatError("bad pattern " + s);
      crashes[static_cast<int>(to_int(item.substr(0, colon)))] = to_int(item.substr(colon + 1));
    }
  }
  return FailurePattern::make(n, std::move(crashes));
}

}  // namespace

RunTrace read_trace(std::istream& is) {
  RunTrace t;
  t.complete = false;
  std::string line;
  if (!std::getline(is, line) || line != "# efd-trace 1")
    throw TraceFormatError("missing or unsupported trace header");
  std::string pattern = "none";
  try {
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      auto w = split(line);
      if (w[0] == "#") {
        if (w.size() < 2) continue;
        const auto& key = w[1];
        if (key == "digest" && w.size() >= 3) {
          t.digest = w[2] == "-" ? "" : w[2];
        } else if (key == "m" && w.size() >= 5) {
          t.m = static_cast<int>(to_int(w[2]));
          t.n = static_cast<int>(to_int(w[4]));
        } else if (key == "pattern" && w.size() >= 3) {
          pattern = w[2];
        } else if (key == "horizon" && w.size() >= 3) {
          t.horizon = to_int(w[2]);
        } else if (key == "inputs") {
          for (std::size_t i = 2; i < w.size(); ++i) t.inputs.push_back(Value::parse(w[i]));
        } else if (key == "meta" && w.size() >= 3) {
          auto prefix = "# meta " + w[2] + " ";
          t.meta[w[2]] = line.size() > prefix.size() ? line.substr(prefix.size()) : "";
        } else if (key == "end") {
          t.complete = true;
          if (w.size() >= 6) {
            if (w[5] == "quiescent") t.stop = StopReason::Quiescent;
            else if (w[5] == "horizon") t.stop = StopReason::Horizon;
            else t.stop = StopReason::ScriptEnd;
          }
        }
        continue;
      }
      if (t.complete) throw TraceFormatError("event after footer");
      if (w.size() != 8) throw TraceFormatError("event line needs 8 fields: " + line);
      Event e;
      e.step = to_int(w[0]);
      e.time = to_int(w[1]);
      if (w[2] != "C" && w[2] != "S") throw TraceFormatError("bad role " + w[2]);
      e.pid = {w[2] == "C" ? Role::C : Role::S, static_cast<int>(to_int(w[3]))};
      auto at = w[4].find('@');
      e.action.kind = parse_action_name(w[4].substr(0, at));
      if (at != std::string::npos) e.action.layer = static_cast<std::uint8_t>(to_int(w[4].substr(at + 1)));
      if (w[5] != "-") e.action.reg = RegisterId::parse(w[5]);
      e.action.value = Value::parse(w[6]);
      e.observation = Value::parse(w[7]);
      t.events.push_back(std::move(e));
    }
  } catch (const std::invalid_argument& err) {
    throw TraceFormatError(err.what());
  }
  if (t.m <= 0 || t.n <= 0) throw TraceFormatError("trace header lacks m/n");
  try {
    t.pattern = parse_pattern(pattern, t.n);
  } catch (const FailureError& err) {
    throw TraceFormatError(err.what());
  }
  if (t.inputs.empty()) t.inputs.assign(t.m, Value());
  if (static_cast<int>(t.inputs.size()) != t.m) throw TraceFormatError("inputs arity differs from m");
  return t;
}

}  // namespace efd
