// Command-line front end: single-unit analysis, corpus evaluation, and dumps.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "semconf/corpus.hpp"
#include "semconf/frontend.hpp"
#include "semconf/pointsto.hpp"
#include "semconf/report.hpp"

using namespace semconf;
namespace fs = std::filesystem;

namespace {

constexpr int kExitFalse = 0;
constexpr int kExitTrue = 1;
constexpr int kExitTimeout = 2;
constexpr int kExitUsage = 3;

struct Options {
  std::vector<std::string> inputs;
  std::vector<std::string> modes;
  int depth = AnalysisBudget{}.depth_limit;
  std::uint64_t fuel = AnalysisBudget{}.fuel;
  double timeout = AnalysisBudget{}.wall_clock_seconds;
  int reps = 10;
  std::string sidecar;
  std::string entry;
  std::string out;
};

AnalysisBudget budget_of(const Options& o) {
  AnalysisBudget b;
  b.depth_limit = o.depth;
  b.fuel = o.fuel;
  b.wall_clock_seconds = o.timeout;
  b.use_wall_clock = !deterministic_clock();
  return b;
}

std::vector<Mode> modes_of(const Options& o, std::vector<Mode> fallback) {
  if (o.modes.empty()) return fallback;
  std::vector<Mode> out;
  for (const auto& m : o.modes) {
    Mode mode = parse_mode(m);
    if (std::find(out.begin(), out.end(), mode) == out.end()) out.push_back(mode);
  }
  return out;
}

// The inputs as one unit: a scenario directory or manifest, or MIR files.
struct Loaded {
  std::string name;
  Program program;
  std::optional<std::string> entry;
};

Loaded load_inputs(const Options& o) {
  if (o.inputs.size() == 1 && (fs::is_directory(o.inputs[0]) || fs::path(o.inputs[0]).extension() == ".json")) {
    fs::path manifest = fs::is_directory(o.inputs[0]) ? fs::path(o.inputs[0]) / "scenario.json" : fs::path(o.inputs[0]);
    Scenario s = load_scenario(manifest);
    Loaded l{s.id, load_program(s), s.entry};
    if (!o.sidecar.empty()) l.program = apply_sidecar(l.program, ProvenanceMap::load(o.sidecar));
    return l;
  }
  std::vector<SourceUnit> units;
  for (const auto& f : o.inputs) {
    if (fs::is_directory(f)) throw Error(f + ": directory without scenario.json given with other inputs");
    units.push_back(SourceUnit::load(f, fs::path(f).filename().string()));
  }
  Loaded l{fs::path(o.inputs.front()).stem().string(), parse_program(units), std::nullopt};
  if (!o.sidecar.empty()) l.program = apply_sidecar(l.program, ProvenanceMap::load(o.sidecar));
  return l;
}

std::vector<UnitEntry> entries_of(const Loaded& l, const Options& o) {
  const std::string entry = !o.entry.empty() ? o.entry : l.entry.value_or("");
  if (!entry.empty()) return {{l.name, find_entry(l.program, entry).id()}};
  auto candidates = entry_candidates(l.program);
  if (candidates.empty()) throw Error("no method holds both LEFT and RIGHT changes; pass --entry");
  std::vector<UnitEntry> out;
  for (const auto* m : candidates)
    out.push_back({candidates.size() == 1 ? l.name : l.name + "#" + m->id().str(), m->id()});
  return out;
}

int analyze(const Options& o) {
  Loaded l = load_inputs(o);
  const AnalysisBudget budget = budget_of(o);
  const auto modes = modes_of(o, {Mode::NoPA});
  std::vector<OutcomeRecord> records;
  bool any_true = false, any_timeout = false;
  for (const auto& u : entries_of(l, o)) {
    const MethodDef& entry = l.program.method(u.entry);
    std::optional<AnalysisOutcome> nopa;
    std::vector<std::pair<Mode, AnalysisOutcome>> outcomes;
    for (Mode m : modes) {
      outcomes.emplace_back(m, detect(l.program, entry, m, budget));
      if (m == Mode::NoPA) nopa = outcomes.back().second;
    }
    for (auto& [m, out] : outcomes) {
      if (nopa && m != Mode::NoPA) annotate_missref_paths(*nopa, out);
      any_true = any_true || out.verdict == Verdict::True;
      any_timeout = any_timeout || out.verdict == Verdict::Timeout;
      std::cout << u.unit << " [" << to_string(m) << "]: " << to_string(out.verdict) << " ("
                << out.conflicts.size() << " conflicts, " << out.stats.visited << " statements visited, "
                << out.stats.paths << " paths)\n";
      for (const auto& c : out.conflicts) std::cout << render_text(c, l.program) << '\n';
      for (const auto& mr : out.miss_refs)
        std::cout << "  miss-reference at " << mr.position.str() << ": " << mr.expression << " ("
                  << to_string(mr.reason) << (mr.on_conflict_path ? ", on conflict path" : "") << ")\n";
      records.push_back(make_record(u.unit, m, out));
    }
  }
  if (o.out.empty()) {
    emit_records(records, std::cout);
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw Error("cannot write " + o.out);
    emit_records(records, f);
  }
  if (any_true) return kExitTrue;
  if (any_timeout) return kExitTimeout;
  return kExitFalse;
}

int corpus(const Options& o) {
  std::vector<fs::path> roots(o.inputs.begin(), o.inputs.end());
  auto scenarios = discover_corpus(roots);
  if (scenarios.empty()) throw Error("no scenario.json found");
  auto run = run_corpus(scenarios, modes_of(o, {Mode::NoPA, Mode::PA, Mode::Hybrid}), budget_of(o), o.reps);
  const fs::path dir = o.out.empty() ? fs::path("results") : fs::path(o.out);
  write_outputs(run, dir);
  std::cout << summarize(run) << "outputs written to " << dir.string() << '\n';
  return 0;
}

const MethodDef& graph_root(const Loaded& l, const Options& o) {
  if (!o.entry.empty()) return find_entry(l.program, o.entry);
  if (l.entry) return find_entry(l.program, *l.entry);
  for (const auto* m : l.program.all_methods())
    if (m->is_static && m->name == "main") return *m;
  auto c = entry_candidates(l.program);
  if (c.empty()) throw Error("no main method or entry candidate; pass --entry");
  return *c.front();
}

int dump_graph(const Options& o) {
  Loaded l = load_inputs(o);
  auto modes = modes_of(o, {Mode::NoPA});
  if (modes.size() != 1) throw Error("dump-graph takes a single --mode");
  if (modes[0] == Mode::NoPA)
    std::cout << build_cha_graph(l.program, graph_root(l, o)).dump();
  else
    std::cout << solve(l.program, pa_entry_points(l.program)).callgraph.dump();
  return 0;
}

int dump_pts(const Options& o) {
  Loaded l = load_inputs(o);
  std::cout << solve(l.program, pa_entry_points(l.program)).dump();
  return 0;
}

void common_flags(CLI::App* cmd, Options& o, bool budget) {
  cmd->add_option("inputs", o.inputs, "MIR files, or a scenario directory or manifest")->required();
  cmd->add_option("--mode", o.modes, "nopa, pa or hybrid (repeatable)")->check(CLI::IsMember({"nopa", "pa", "hybrid"}));
  cmd->add_option("--sidecar", o.sidecar, "provenance line map (JSON)");
  cmd->add_option("--entry", o.entry, "entry method as Class.method");
  if (!budget) return;
  cmd->add_option("--depth", o.depth, "call depth limit")->capture_default_str()->check(CLI::NonNegativeNumber);
  cmd->add_option("--fuel", o.fuel, "statement-visit budget")->capture_default_str();
  cmd->add_option("--timeout", o.timeout, "wall-clock budget in seconds")->capture_default_str()->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Override Assignment conflict detection for merged MIR programs"};
  app.require_subcommand(1);
  Options o;

  auto* analyze_cmd = app.add_subcommand("analyze", "analyze one merge unit");
  common_flags(analyze_cmd, o, true);
  analyze_cmd->add_option("--out", o.out, "write records here instead of stdout");

  auto* corpus_cmd = app.add_subcommand("corpus", "evaluate a scenario corpus");
  corpus_cmd->add_option("inputs", o.inputs, "corpus directories or manifests")->required();
  corpus_cmd->add_option("--mode", o.modes, "nopa, pa or hybrid (repeatable)")->check(CLI::IsMember({"nopa", "pa", "hybrid"}));
  corpus_cmd->add_option("--depth", o.depth, "call depth limit")->capture_default_str()->check(CLI::NonNegativeNumber);
  corpus_cmd->add_option("--fuel", o.fuel, "statement-visit budget")->capture_default_str();
  corpus_cmd->add_option("--timeout", o.timeout, "wall-clock budget in seconds")->capture_default_str()->check(CLI::PositiveNumber);
  corpus_cmd->add_option("--reps", o.reps, "timing repetitions per unit")->capture_default_str()->check(CLI::PositiveNumber);
  corpus_cmd->add_option("--out", o.out, "output directory (default: results)");

  auto* graph_cmd = app.add_subcommand("dump-graph", "print the CHA (nopa) or points-to (pa) call graph");
  common_flags(graph_cmd, o, false);
  auto* pts_cmd = app.add_subcommand("dump-pts", "print points-to sets");
  common_flags(pts_cmd, o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*analyze_cmd) return analyze(o);
    if (*corpus_cmd) return corpus(o);
    if (*graph_cmd) return dump_graph(o);
    if (*pts_cmd) return dump_pts(o);
  } catch (const std::exception& e) {
    std::cerr << "semconf: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
