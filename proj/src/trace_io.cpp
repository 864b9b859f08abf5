#include "hi/trace_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace hi::tio {

namespace {

using nlohmann::json;

const char* intern_label(const std::string& s) {
  static std::set<std::string> pool;
  return pool.insert(s).first->c_str();
}

json word_json(const mem::CasWord& w) { return json::array({w.val, w.context}); }

mem::CasWord word_from(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw mem::EngineError("trace: malformed word");
  return {j[0].get<std::uint64_t>(), j[1].get<std::uint64_t>()};
}

json cell_json(const mem::ObjState& s) {
  return json::array({static_cast<int>(s.kind), s.w.val, s.w.context});
}

mem::ObjState cell_from(const json& j) {
  if (!j.is_array() || j.size() != 3)
    throw mem::EngineError("trace: malformed cell");
  return {static_cast<mem::ObjKind>(j[0].get<int>()),
          {j[1].get<std::uint64_t>(), j[2].get<std::uint64_t>()}};
}

const char* kind_name(mem::AccessKind k) {
  switch (k) {
    case mem::AccessKind::read:
      return "read";
    case mem::AccessKind::write:
      return "write";
    case mem::AccessKind::cas:
      return "cas";
  }
  return "?";
}

mem::AccessKind kind_from(const std::string& s) {
  if (s == "read") return mem::AccessKind::read;
  if (s == "write") return mem::AccessKind::write;
  if (s == "cas") return mem::AccessKind::cas;
  throw mem::EngineError("trace: unknown access kind " + s);
}

Side side_from(const std::string& s) {
  if (s == "M") return Side::main;
  if (s == "L") return Side::left;
  if (s == "R") return Side::right;
  throw mem::EngineError("trace: unknown side " + s);
}

json op_json(const seq::Op& o) {
  return json{{"arg", o.arg}, {"code", o.code}, {"proc", o.proc}};
}

seq::Op op_from(const json& j) {
  return {j.at("code").get<int>(), j.at("arg").get<std::int64_t>(),
          j.at("proc").get<int>()};
}

}  // namespace

TraceDoc make_trace(const AlgorithmObject& obj, const std::string& descriptor,
                    const std::vector<std::vector<seq::Op>>& programs,
                    const Execution& e, int section_fair_cap) {
  return TraceDoc{obj.name(),  descriptor, obj.spec().name(), obj.num_procs(),
                  section_fair_cap, programs,   e};
}

std::string to_jsonl(const TraceDoc& doc) {
  std::ostringstream os;
  json progs = json::array();
  for (const auto& prog : doc.programs) {
    json p = json::array();
    for (const seq::Op& o : prog) p.push_back(op_json(o));
    progs.push_back(std::move(p));
  }
  json initial = json::array();
  for (const mem::ObjState& s : doc.execution.initial)
    initial.push_back(cell_json(s));
  os << json{{"cap", doc.section_fair_cap},
             {"descriptor", doc.descriptor},
             {"initial", std::move(initial)},
             {"object", doc.object},
             {"procs", doc.procs},
             {"programs", std::move(progs)},
             {"spec", doc.spec},
             {"type", "header"}}
            .dump()
     << "\n";
  for (const StepRecord& r : doc.execution.steps) {
    json j{{"after", word_json(r.after)}, {"i", r.index},
           {"label", r.label},            {"op", r.op_id},
           {"p", r.process},              {"side", side_name(r.side)},
           {"type", "step"}};
    if (r.has_access) {
      j["acc"] = json{{"a0", word_json(r.acc.arg0)},
                      {"a1", word_json(r.acc.arg1)},
                      {"kind", kind_name(r.acc.kind)},
                      {"obj", r.acc.obj.index}};
      j["out"] = json{{"ok", r.out.ok}, {"val", word_json(r.out.value)}};
    }
    if (r.invoked) j["inv"] = true;
    if (r.responded) j["resp"] = r.resp;
    os << j.dump() << "\n";
  }
  for (const OpInstance& o : doc.execution.ops) {
    os << json{{"arg", o.op.arg},
               {"code", o.op.code},
               {"id", o.id},
               {"inv", o.inv_step},
               {"op_proc", o.op.proc},
               {"own", o.own_steps},
               {"p", o.process},
               {"resp", o.resp},
               {"resp_step", o.resp_step},
               {"type", "op"}}
              .dump()
       << "\n";
  }
  for (const auto& mk : doc.execution.markers)
    os << json{{"cfg", mk.first}, {"type", "marker"}}.dump() << "\n";
  return os.str();
}

namespace {

TraceDoc from_jsonl_impl(const std::string& text) {
  TraceDoc doc;
  std::istringstream is(text);
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, true);
    const std::string type = j.at("type").get<std::string>();
    if (type == "header") {
      if (have_header) throw mem::EngineError("trace: duplicate header");
      have_header = true;
      doc.section_fair_cap = j.at("cap").get<int>();
      doc.descriptor = j.at("descriptor").get<std::string>();
      doc.object = j.at("object").get<std::string>();
      doc.spec = j.at("spec").get<std::string>();
      doc.procs = j.at("procs").get<int>();
      for (const json& prog : j.at("programs")) {
        std::vector<seq::Op> ops;
        for (const json& o : prog) ops.push_back(op_from(o));
        doc.programs.push_back(std::move(ops));
      }
      for (const json& c : j.at("initial"))
        doc.execution.initial.push_back(cell_from(c));
      continue;
    }
    if (!have_header) throw mem::EngineError("trace: missing header line");
    if (type == "step") {
      StepRecord r;
      r.index = j.at("i").get<int>();
      r.process = j.at("p").get<int>();
      r.side = side_from(j.at("side").get<std::string>());
      r.op_id = j.at("op").get<int>();
      r.after = word_from(j.at("after"));
      r.label = intern_label(j.at("label").get<std::string>());
      if (j.contains("acc")) {
        r.has_access = true;
        const json& a = j["acc"];
        r.acc.obj = {a.at("obj").get<int>()};
        r.acc.kind = kind_from(a.at("kind").get<std::string>());
        r.acc.arg0 = word_from(a.at("a0"));
        r.acc.arg1 = word_from(a.at("a1"));
        const json& o = j.at("out");
        r.out.ok = o.at("ok").get<bool>();
        r.out.value = word_from(o.at("val"));
      }
      r.invoked = j.contains("inv");
      if (j.contains("resp")) {
        r.responded = true;
        r.resp = j["resp"].get<std::int64_t>();
      }
      doc.execution.steps.push_back(r);
    } else if (type == "op") {
      OpInstance o;
      o.id = j.at("id").get<int>();
      o.process = j.at("p").get<int>();
      o.op = {j.at("code").get<int>(), j.at("arg").get<std::int64_t>(),
              j.at("op_proc").get<int>()};
      o.inv_step = j.at("inv").get<int>();
      o.resp_step = j.at("resp_step").get<int>();
      o.resp = j.at("resp").get<std::int64_t>();
      o.own_steps = j.at("own").get<int>();
      doc.execution.ops.push_back(o);
    } else if (type == "marker") {
      int cfg = j.at("cfg").get<int>();
      doc.execution.markers.emplace_back(cfg, mem::MemorySnapshot{});
    } else {
      throw mem::EngineError("trace: unknown record type " + type);
    }
  }
  if (!have_header) throw mem::EngineError("trace: missing header line");
  for (auto& [cfg, snap] : doc.execution.markers)
    snap = doc.execution.snapshot_at(cfg);
  return doc;
}

}  // namespace

TraceDoc from_jsonl(const std::string& text) {
  try {
    return from_jsonl_impl(text);
  } catch (const json::exception& ex) {
    throw mem::EngineError(std::string("trace: malformed input: ") + ex.what());
  }
}

void write_trace_file(const std::string& path, const TraceDoc& doc) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw mem::EngineError("cannot write " + path);
  f << to_jsonl(doc);
}

TraceDoc read_trace_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw mem::EngineError("cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return from_jsonl(os.str());
}

Schedule schedule_of(const Execution& e) {
  Schedule s;
  std::size_t mi = 0;
  auto emit_markers = [&](int cfg) {
    while (mi < e.markers.size() && e.markers[mi].first == cfg) {
      s.push_back(marker());
      ++mi;
    }
  };
  emit_markers(0);
  for (const StepRecord& r : e.steps) {
    s.push_back(step_of(r.process, r.side));
    emit_markers(r.index);
  }
  return s;
}

namespace {

template <typename T>
std::string diff_str(const char* what, int where, const T& a, const T& b) {
  std::ostringstream os;
  os << what << " differs at " << where << ": recorded " << a << ", replay "
     << b;
  return os.str();
}

}  // namespace

ReplayResult replay_trace(const TraceDoc& doc, AlgorithmObject& obj) {
  if (obj.num_procs() != doc.procs)
    return {false, "object has " + std::to_string(obj.num_procs()) +
                       " processes, trace has " + std::to_string(doc.procs)};
  mem::EngineMemory m;
  obj.allocate(m);
  m.seal();
  Execution got = run(obj, m, doc.programs, schedule_of(doc.execution),
                      doc.section_fair_cap);
  const Execution& want = doc.execution;
  if (got.initial != want.initial)
    return {false, "initial memory differs; descriptor rebuilt another object"};
  if (got.steps.size() != want.steps.size())
    return {false, diff_str("step count", 0, want.steps.size(),
                            got.steps.size())};
  for (std::size_t i = 0; i < want.steps.size(); ++i) {
    const StepRecord& a = want.steps[i];
    const StepRecord& b = got.steps[i];
    int at = a.index;
    if (a.process != b.process || a.side != b.side)
      return {false, diff_str("scheduled process", at, a.process, b.process)};
    if (a.op_id != b.op_id) return {false, diff_str("op id", at, a.op_id, b.op_id)};
    if (a.has_access != b.has_access)
      return {false, diff_str("access presence", at, a.has_access, b.has_access)};
    if (a.has_access &&
        (!(a.acc.obj == b.acc.obj) || a.acc.kind != b.acc.kind ||
         !(a.acc.arg0 == b.acc.arg0) || !(a.acc.arg1 == b.acc.arg1)))
      return {false, "access differs at step " + std::to_string(at)};
    if (a.has_access && (!(a.out.value == b.out.value) || a.out.ok != b.out.ok))
      return {false, "outcome differs at step " + std::to_string(at)};
    if (!(a.after == b.after))
      return {false, "cell state differs at step " + std::to_string(at)};
    if (std::string(a.label) != b.label)
      return {false, diff_str("label", at, std::string(a.label),
                              std::string(b.label))};
    if (a.invoked != b.invoked || a.responded != b.responded ||
        (a.responded && a.resp != b.resp))
      return {false, "op lifecycle differs at step " + std::to_string(at)};
  }
  if (got.ops.size() != want.ops.size())
    return {false, diff_str("op count", 0, want.ops.size(), got.ops.size())};
  for (std::size_t i = 0; i < want.ops.size(); ++i) {
    const OpInstance& a = want.ops[i];
    const OpInstance& b = got.ops[i];
    if (a.id != b.id || a.process != b.process || !(a.op == b.op) ||
        a.inv_step != b.inv_step || a.resp_step != b.resp_step ||
        a.resp != b.resp || a.own_steps != b.own_steps)
      return {false, "op record " + std::to_string(a.id) + " differs"};
  }
  if (got.markers.size() != want.markers.size())
    return {false, "marker count differs"};
  for (std::size_t i = 0; i < want.markers.size(); ++i) {
    if (got.markers[i].first != want.markers[i].first)
      return {false, "marker position differs"};
    if (got.markers[i].second != want.markers[i].second)
      return {false, "marker snapshot differs"};
  }
  return {true, "replayed " + std::to_string(got.steps.size()) + " steps"};
}

}  // namespace hi::tio
