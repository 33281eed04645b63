#include "semconf/report.hpp"

#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

namespace semconf {

namespace {

std::string signature(const MethodDef& m, const Program& p) {
  bool valued = false;
  for_each_stmt(m.body, [&](const Stmt& s) {
    if (const auto* r = s.as<Return>(); r && r->value) valued = true;
  });
  std::string ret = "void";
  if (valued) ret = StaticTypes(p).return_type(m.id()).value_or("Object");
  std::string out = (m.kind == MethodKind::Constructor ? std::string() : ret + " ") + m.name + "(";
  for (std::size_t i = 0; i < m.params.size(); ++i) out += (i ? ", " : "") + m.params[i];
  return out + ")";
}

void flow(std::ostringstream& out, const WriteEvent& e) {
  for (std::size_t i = 0; i < e.frames.size(); ++i) {
    int line = i < e.call_path.size() ? e.call_path[i].line : e.position.line;
    out << "  at " << e.frames[i].str() << "():" << line << '\n';
  }
}

}  // namespace

std::string render_text(const ConflictReport& c, const Program& p) {
  const MethodDef& entry = p.method(c.entry);
  const int under = c.overridden.top_line();
  const int over = c.overriding.top_line();
  std::ostringstream out;
  out << "Interference in class " << entry.declaring_class << ", method " << signature(entry, p)
      << ", execution of line " << under << " overrides " << over << ", assigning to variable "
      << c.element << '\n';
  out << "Caused by line " << under << " flow:\n";
  flow(out, c.overridden);
  out << "And line " << over << " flow:\n";
  flow(out, c.overriding);
  return out.str();
}

OutcomeRecord make_record(const std::string& unit, Mode mode, const AnalysisOutcome& o) {
  OutcomeRecord r;
  r.unit = unit;
  r.mode = mode;
  r.verdict = o.verdict;
  for (const auto& c : o.conflicts)
    r.conflicts.push_back({c.element, c.overriding.top_line(), c.overridden.top_line()});
  for (const auto& m : o.miss_refs)
    r.missrefs.push_back({m.position.file, m.position.line, std::string(to_string(m.reason)),
                          m.on_conflict_path});
  r.visited = o.stats.visited;
  r.paths = o.stats.paths;
  r.elapsed_ms = o.stats.elapsed_ms;
  return r;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const OutcomeRecord& r) {
  ordered_json j;
  j["unit"] = r.unit;
  j["mode"] = to_string(r.mode);
  j["verdict"] = to_string(r.verdict);
  j["conflicts"] = ordered_json::array();
  for (const auto& c : r.conflicts)
    j["conflicts"].push_back({{"element", c.element}, {"over_line", c.over_line}, {"under_line", c.under_line}});
  j["missrefs"] = ordered_json::array();
  for (const auto& m : r.missrefs)
    j["missrefs"].push_back({{"file", m.file},
                             {"line", m.line},
                             {"reason", m.reason},
                             {"on_conflict_path", m.on_conflict_path}});
  j["visited"] = r.visited;
  j["paths"] = r.paths;
  j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

OutcomeRecord from_json(const nlohmann::json& j) {
  OutcomeRecord r;
  r.unit = j.at("unit").get<std::string>();
  r.mode = parse_mode(j.at("mode").get<std::string>());
  r.verdict = parse_verdict(j.at("verdict").get<std::string>());
  for (const auto& c : j.at("conflicts"))
    r.conflicts.push_back({c.at("element").get<std::string>(), c.at("over_line").get<int>(),
                           c.at("under_line").get<int>()});
  for (const auto& m : j.at("missrefs")) {
    auto reason = m.at("reason").get<std::string>();
    parse_reason(reason);
    r.missrefs.push_back({m.at("file").get<std::string>(), m.at("line").get<int>(), reason,
                          m.value("on_conflict_path", false)});
  }
  r.visited = j.at("visited").get<std::uint64_t>();
  r.paths = j.at("paths").get<std::uint64_t>();
  r.elapsed_ms = j.at("elapsed_ms").get<double>();
  return r;
}

}  // namespace

std::string emit_records(const std::vector<OutcomeRecord>& records) {
  std::string out;
  for (const auto& r : records) out += to_json(r).dump() + '\n';
  return out;
}

void emit_records(const std::vector<OutcomeRecord>& records, std::ostream& out) {
  out << emit_records(records);
  out.flush();
  if (!out) throw Error("failed to write records");
}

std::vector<OutcomeRecord> parse_records(const std::string& text) {
  std::vector<OutcomeRecord> out;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error("record line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace semconf
