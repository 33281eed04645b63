// Acceptance gate: one PASS/FAIL line per criterion. Usage: acceptance <semconf-cli>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "properties.hpp"
#include "semconf/corpus.hpp"
#include "semconf/evaluation.hpp"
#include "semconf/report.hpp"

using namespace semconf;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and limits.
constexpr double kMotivatingSeconds = 1.0;
constexpr double kReflectionSeconds = 1.0;
constexpr double kDeepSeconds = 5.0;
constexpr std::uint64_t kDeepFuel = 100000;
constexpr int kDeepImplementers = 32;
constexpr double kMetricTolerance = 0.005;
constexpr int kSoundnessPrograms = 100;
constexpr double kSoundnessSeconds = 60.0;
constexpr int kInclusionPrograms = 100;
constexpr std::uint64_t kMetamorphicFuel = 10000;
constexpr int kWilcoxonTrials = 2000;
constexpr int kWilcoxonMaxN = 10;
constexpr double kWilcoxonTolerance = 1e-12;
constexpr int kDeterminismReps = 2;
constexpr std::uint64_t kDeterminismFuel = 100000;

const char* const kEntry = "Text.generateReport";

// Collects reasons a criterion failed; empty means pass.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

AnalysisBudget budget(std::uint64_t fuel = AnalysisBudget{}.fuel) {
  AnalysisBudget b;
  b.fuel = fuel;
  b.use_wall_clock = false;
  return b;
}

Scenario scenario(const std::string& id) {
  return load_scenario(fs::path(SEMCONF_CORPUS_DIR) / id / "scenario.json");
}

Program load(const std::string& id) { return load_program(scenario(id)); }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void motivating(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  auto simple = load("fig1_simple");
  const std::string fig2 =
      "Interference in class Text, method void generateReport(), execution of line 8 overrides 10, "
      "assigning to variable this.<ReportSimple: int fixes>\n"
      "Caused by line 8 flow:\n"
      "  at Text.generateReport():8\n"
      "  at ReportSimple.countDupWords():4\n"
      "And line 10 flow:\n"
      "  at Text.generateReport():10\n"
      "  at ReportSimple.countDupWhiteSpace():9\n";
  for (Mode m : {Mode::NoPA, Mode::PA, Mode::Hybrid}) {
    const std::string tag = "fig1_simple " + std::string(to_string(m));
    auto o = detect(simple, kEntry, m, budget());
    c.expect(o.verdict == Verdict::True, tag + " verdict " + std::string(to_string(o.verdict)));
    c.expect(o.conflicts.size() == 1, tag + " conflict count " + std::to_string(o.conflicts.size()));
    if (!o.conflicts.empty()) {
      const auto& k = o.conflicts[0];
      c.expect(k.overridden.top_line() == 8 && k.overriding.top_line() == 10, tag + " lines");
      c.expect(render_text(k, simple) == fig2, tag + " report text");
    }
  }
  auto advanced = load("fig1_advanced");
  c.expect(detect(advanced, kEntry, Mode::NoPA, budget()).verdict == Verdict::True, "fig1_advanced nopa not TRUE");
  c.expect(detect(advanced, kEntry, Mode::PA, budget()).verdict == Verdict::False, "fig1_advanced pa not FALSE");
  const double s = seconds_since(t0);
  c.expect(s < kMotivatingSeconds, "took " + std::to_string(s) + " s");
}

void reflection(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  auto p = load("reflection");
  auto nopa = detect(p, kEntry, Mode::NoPA, budget());
  auto pa = detect(p, kEntry, Mode::PA, budget());
  auto hybrid = detect(p, kEntry, Mode::Hybrid, budget());
  annotate_missref_paths(nopa, pa);
  c.expect(nopa.verdict == Verdict::True, "nopa not TRUE");
  c.expect(pa.verdict == Verdict::False, "pa not FALSE");
  c.expect(hybrid.verdict == Verdict::True, "hybrid not TRUE");
  bool flagged = false;
  for (const auto& m : pa.miss_refs) flagged |= m.on_conflict_path;
  c.expect(flagged, "no pa miss-reference on the conflict path");
  const double s = seconds_since(t0);
  c.expect(s < kReflectionSeconds, "took " + std::to_string(s) + " s");
}

void deep_hierarchy(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  const auto s = scenario("deep-hierarchy");
  auto p = load_program(s);
  const auto units = units_of(s, p);
  c.expect(implementers_of("Node", p).size() >= static_cast<std::size_t>(kDeepImplementers),
           "fewer than " + std::to_string(kDeepImplementers) + " implementers");
  auto b = budget(kDeepFuel);
  c.expect(units.size() == 1, "expected one unit");
  const MethodDef& entry = p.method(units.front().entry);
  auto nopa1 = detect(p, entry, Mode::NoPA, b);
  auto nopa2 = detect(p, entry, Mode::NoPA, b);
  auto pa = detect(p, entry, Mode::PA, b);
  c.expect(nopa1.verdict == Verdict::Timeout, "nopa " + std::string(to_string(nopa1.verdict)));
  c.expect(pa.verdict == Verdict::False, "pa " + std::string(to_string(pa.verdict)));
  // Fuel alone must also run out, with the path cap lifted.
  auto uncapped = b;
  uncapped.path_cap = std::numeric_limits<std::uint64_t>::max();
  auto fuel_only = detect(p, entry, Mode::NoPA, uncapped);
  c.expect(fuel_only.verdict == Verdict::Timeout && fuel_only.stats.visited >= kDeepFuel,
           "fuel alone not exhausted: visited " + std::to_string(fuel_only.stats.visited));
  c.expect(nopa1.stats.visited == nopa2.stats.visited && nopa1.stats.paths == nopa2.stats.paths,
           "nopa runs differ");
  const double took = seconds_since(t0);
  c.expect(took < kDeepSeconds, "took " + std::to_string(took) + " s");
}

void metrics_table(Check& c) {
  const struct {
    const char* name;
    std::vector<std::pair<Verdict, GroundTruth>> units;
    double precision, recall, accuracy, f1;
  } rows[] = {
      {"nopa", fixtures::labeled_nopa(), 0.47, 0.28, 0.68, 0.35},
      {"pa", fixtures::labeled_pa(), 0.29, 0.07, 0.66, 0.11},
  };
  for (const auto& r : rows) {
    auto m = metrics(confusion(r.units));
    auto near = [&](const Ratio& x, double want, const char* what) {
      c.expect(x.defined && std::abs(x.value - want) <= kMetricTolerance,
               std::string(r.name) + " " + what + " " + std::to_string(x.value));
    };
    near(m.precision, r.precision, "precision");
    near(m.recall, r.recall, "recall");
    near(m.accuracy, r.accuracy, "accuracy");
    near(m.f1, r.f1, "f1");
  }
}

void transitions_table(Check& c) {
  auto [a, b] = fixtures::unlabeled_pair();
  auto t = transitions(a, b);
  const struct {
    Verdict from, to;
    int n;
  } cells[] = {{Verdict::True, Verdict::True, 234},     {Verdict::True, Verdict::False, 39},
               {Verdict::Timeout, Verdict::True, 9},    {Verdict::Timeout, Verdict::False, 24},
               {Verdict::Timeout, Verdict::Timeout, 2}, {Verdict::False, Verdict::False, 612}};
  for (const auto& k : cells)
    c.expect(t.at(k.from, k.to) == k.n, std::string(to_string(k.from)) + "->" + std::string(to_string(k.to)) +
                                            " = " + std::to_string(t.at(k.from, k.to)));
  c.expect(venn_band(t, Verdict::False).b_only == 63, "false band b-only");
  auto h = divergence_histogram(fixtures::divergence_units());
  c.expect(h == std::map<int, int>{{1, 20}, {2, 5}, {4, 1}, {5, 2}, {6, 2}, {9, 1}}, "histogram");
}

template <class Counts>
void details(Check& c, const Counts& k) {
  for (const auto& d : k.details) c.failures.push_back(d);
}

void soundness_property(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  auto k = props::soundness(base_seed(), kSoundnessPrograms);
  c.expect(k.programs == kSoundnessPrograms, "programs " + std::to_string(k.programs));
  c.expect(k.binding_violations == 0, std::to_string(k.binding_violations) + " bindings outside pts");
  c.expect(k.cha_dispatch_violations == 0, std::to_string(k.cha_dispatch_violations) + " dispatches outside CHA");
  c.expect(k.pts_dispatch_violations == 0, std::to_string(k.pts_dispatch_violations) + " dispatches outside PTS");
  c.expect(k.pts_not_in_cha == 0, std::to_string(k.pts_not_in_cha) + " PTS edges outside CHA");
  c.expect(k.bindings > 0 && k.dispatches > 0, "no observations");
  details(c, k);
  const double s = seconds_since(t0);
  c.expect(s < kSoundnessSeconds, "took " + std::to_string(s) + " s");
}

void inclusion_property(Check& c) {
  auto k = props::inclusion(discover_corpus({SEMCONF_CORPUS_DIR}), base_seed(), kInclusionPrograms);
  c.expect(k.violations == 0, std::to_string(k.violations) + " violations");
  c.expect(k.pa_conflicts > 0, "no PA conflicts observed");
  details(c, k);
}

void metamorphic_property(Check& c) {
  auto k = props::metamorphic(discover_corpus({SEMCONF_CORPUS_DIR}), props::fuel_budget(kMetamorphicFuel));
  c.expect(k.violations == 0, std::to_string(k.violations) + " violations");
  c.expect(k.injected + k.transformed > 0 && k.swaps > 0 && k.erasures > 0, "a relation was never exercised");
  details(c, k);
}

void determinism(Check& c, const std::string& cli) {
  if (cli.empty()) {
    c.expect(false, "no CLI path given");
    return;
  }
  const fs::path root = fs::temp_directory_path() / ("semconf_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  ::setenv("OA_SEED", std::to_string(base_seed()).c_str(), 1);
  std::vector<fs::path> outs;
  for (int run = 0; run < 2; ++run) {
    fs::path out = root / ("run" + std::to_string(run));
    const std::string cmd = "\"" + cli + "\" corpus \"" + std::string(SEMCONF_CORPUS_DIR) + "\" --reps " +
                            std::to_string(kDeterminismReps) + " --fuel " + std::to_string(kDeterminismFuel) +
                            " --out \"" + out.string() + "\" > /dev/null";
    const int rc = std::system(cmd.c_str());
    c.expect(rc == 0, "corpus run " + std::to_string(run) + " status " + std::to_string(rc));
    outs.push_back(out);
  }
  for (const char* f : {"records.jsonl", "confusion.csv", "metrics.csv", "transitions.csv", "histogram.csv",
                        "timing.csv"}) {
    const auto x = read_file(outs[0] / f), y = read_file(outs[1] / f);
    c.expect(!x.empty(), std::string(f) + " empty");
    c.expect(x == y, std::string(f) + " differs");
  }
  fs::remove_all(root);
}

void wilcoxon(Check& c) {
  auto hand = wilcoxon_signed_rank({{1, 0}, {0, 2}, {3, 0}, {0, 4}, {5, 0}});
  c.expect(hand.w == 6, "hand case W = " + std::to_string(hand.w));
  std::mt19937_64 rng(base_seed());
  int checked = 0;
  for (int trial = 0; trial < kWilcoxonTrials; ++trial) {
    const int n = 5 + static_cast<int>(rng() % (kWilcoxonMaxN - 4));
    std::vector<std::pair<double, double>> pairs;
    std::vector<double> diffs;
    for (int i = 0; i < n; ++i) {
      const double x = static_cast<double>(static_cast<int>(rng() % 13) - 6);
      pairs.push_back({x, 0});
      diffs.push_back(x);
    }
    int nonzero = 0;
    for (double x : diffs) nonzero += x != 0;
    if (nonzero < 5) continue;
    auto r = wilcoxon_signed_rank(pairs);
    const double want = oracles::wilcoxon_enumeration_p(diffs);
    c.expect(r.exact && std::abs(r.p - want) <= kWilcoxonTolerance,
             "trial " + std::to_string(trial) + " p " + std::to_string(r.p) + " vs " + std::to_string(want));
    ++checked;
  }
  c.expect(checked > kWilcoxonTrials / 2, "only " + std::to_string(checked) + " trials checked");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<const char*, std::function<void(Check&)>>> criteria = {
      {"motivating example", motivating},
      {"reflection miss-reference", reflection},
      {"timeout direction", deep_hierarchy},
      {"metrics reproduction", metrics_table},
      {"transition reproduction", transitions_table},
      {"points-to soundness", soundness_property},
      {"mode inclusion", inclusion_property},
      {"metamorphic relations", metamorphic_property},
      {"determinism", [&](Check& c) { determinism(c, cli); }},
      {"wilcoxon exactness", wilcoxon},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = c.failures.empty();
    failed += !ok;
    std::cout << (ok ? "PASS " : "FAIL ") << i + 1 << ": " << criteria[i].first << "\n";
    for (std::size_t k = 0; k < c.failures.size() && k < 10; ++k) std::cout << "    " << c.failures[k] << "\n";
  }
  return failed == 0 ? 0 : 1;
}
