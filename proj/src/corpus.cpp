#include "semconf/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "semconf/frontend.hpp"

namespace semconf {

namespace fs = std::filesystem;

Scenario load_scenario(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error("cannot read " + manifest.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(manifest.string() + ": " + e.what());
  }
  auto text = [&](const char* key) -> std::string {
    if (!j.contains(key) || !j[key].is_string()) throw Error(manifest.string() + ": missing string '" + key + "'");
    return j[key].get<std::string>();
  };
  Scenario s;
  s.dir = manifest.parent_path();
  s.id = text("id");
  s.project = text("project");
  if (!j.contains("sources") || !j["sources"].is_array() || j["sources"].empty())
    throw Error(manifest.string() + ": 'sources' must be a non-empty list");
  for (const auto& src : j["sources"]) s.sources.push_back(src.get<std::string>());
  if (j.contains("sidecar") && !j["sidecar"].is_null()) s.sidecar = j["sidecar"].get<std::string>();
  if (j.contains("entry") && !j["entry"].is_null()) s.entry = j["entry"].get<std::string>();
  const auto& t = j.value("ground_truth", nlohmann::json());
  if (t.is_null())
    s.truth = GroundTruth::Unlabeled;
  else if (t == "true")
    s.truth = GroundTruth::True;
  else if (t == "false")
    s.truth = GroundTruth::False;
  else
    throw Error(manifest.string() + ": ground_truth must be \"true\", \"false\" or null");
  return s;
}

std::vector<Scenario> discover_corpus(const std::vector<fs::path>& roots) {
  std::vector<Scenario> out;
  for (const auto& root : roots) {
    if (fs::is_regular_file(root)) {
      out.push_back(load_scenario(root));
    } else if (fs::is_directory(root)) {
      for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file() && e.path().filename() == "scenario.json") out.push_back(load_scenario(e.path()));
    } else {
      throw Error("no such corpus path: " + root.string());
    }
  }
  std::sort(out.begin(), out.end(), [](const Scenario& a, const Scenario& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].id == out[i - 1].id) throw Error("duplicate scenario id '" + out[i].id + "'");
  return out;
}

Program load_program(const Scenario& s) {
  std::vector<SourceUnit> units;
  for (const auto& src : s.sources) units.push_back(SourceUnit::load(s.dir / src, src));
  Program p = parse_program(units);
  if (s.sidecar) p = apply_sidecar(p, ProvenanceMap::load(s.dir / *s.sidecar));
  return p;
}

std::vector<UnitEntry> units_of(const Scenario& s, const Program& p) {
  if (s.entry) return {{s.id, find_entry(p, *s.entry).id()}};
  auto candidates = entry_candidates(p);
  if (candidates.empty()) throw Error("no method holds both LEFT and RIGHT changes");
  std::vector<UnitEntry> out;
  for (const auto* m : candidates)
    out.push_back({candidates.size() == 1 ? s.id : s.id + "#" + m->id().str(), m->id()});
  return out;
}

std::vector<std::string> CorpusRun::units() const {
  std::vector<std::string> out;
  for (const auto& r : runs)
    if (out.empty() || out.back() != r.unit) out.push_back(r.unit);
  return out;
}

const UnitRun* CorpusRun::find(const std::string& unit, Mode m) const {
  for (const auto& r : runs)
    if (r.unit == unit && r.mode == m) return &r;
  return nullptr;
}

CorpusRun run_corpus(const std::vector<Scenario>& corpus, const std::vector<Mode>& modes,
                     const AnalysisBudget& budget, int reps) {
  if (reps < 1) throw Error("reps must be at least 1");
  CorpusRun run;
  run.modes = modes;
  for (const auto& s : corpus) {
    Program p;
    std::vector<UnitEntry> units;
    try {
      p = load_program(s);
      units = units_of(s, p);
    } catch (const Error& e) {
      run.errors.push_back({s.id, e.what()});
      continue;
    }
    for (const auto& u : units) {
      const MethodDef& entry = p.method(u.entry);
      for (Mode m : modes) {
        UnitRun r{u.unit, s.project, s.truth, m, {}, {}};
        // Back-to-back reps on one thread.
        for (int i = 0; i < reps; ++i) {
          AnalysisOutcome o = detect(p, entry, m, budget);
          if (i > 0 && o.verdict != r.outcome.verdict)
            throw Error("verdict of " + u.unit + " under " + std::string(to_string(m)) + " differs across reps");
          r.timings.push_back(o.stats.elapsed_ms);
          if (i == 0) r.outcome = std::move(o);
        }
        run.runs.push_back(std::move(r));
      }
    }
  }
  annotate_missref_paths(run);
  return run;
}

bool annotate_missref_paths(const AnalysisOutcome& nopa, AnalysisOutcome& other) {
  if (nopa.verdict != Verdict::True || other.verdict != Verdict::False) return false;
  std::set<SourcePos> flow;
  for (const auto& c : nopa.conflicts)
    for (const WriteEvent* w : {&c.overriding, &c.overridden}) {
      flow.insert(w->call_path.begin(), w->call_path.end());
      flow.insert(w->position);
    }
  bool any = false;
  for (auto& m : other.miss_refs) {
    m.on_conflict_path = flow.contains(m.position);
    any = any || m.on_conflict_path;
  }
  return any;
}

void annotate_missref_paths(CorpusRun& run) {
  for (auto& r : run.runs) {
    if (r.mode == Mode::NoPA) continue;
    if (const UnitRun* base = run.find(r.unit, Mode::NoPA)) annotate_missref_paths(base->outcome, r.outcome);
  }
}

std::vector<OutcomeRecord> records_of(const CorpusRun& run) {
  std::vector<OutcomeRecord> out;
  for (const auto& r : run.runs) {
    OutcomeRecord rec = make_record(r.unit, r.mode, r.outcome);
    rec.elapsed_ms = describe(r.timings).mean;
    out.push_back(std::move(rec));
  }
  return out;
}

namespace {

bool any_timeout(const CorpusRun& run, const std::string& unit) {
  for (Mode m : run.modes)
    if (const UnitRun* r = run.find(unit, m); r && r->outcome.verdict == Verdict::Timeout) return true;
  return false;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string ratio(const Ratio& r) { return r.defined ? fixed(r.value, 4) : "undefined"; }

}  // namespace

ConfusionMatrix corpus_confusion(const CorpusRun& run, Mode m) {
  std::vector<std::pair<Verdict, GroundTruth>> labeled;
  for (const auto& r : run.runs) {
    if (r.mode != m || r.truth == GroundTruth::Unlabeled) continue;
    labeled.push_back({any_timeout(run, r.unit) ? Verdict::Timeout : r.outcome.verdict, r.truth});
  }
  return confusion(labeled);
}

std::map<std::string, Verdict> verdicts_of(const CorpusRun& run, Mode m) {
  std::map<std::string, Verdict> out;
  for (const auto& r : run.runs)
    if (r.mode == m) out[r.unit] = r.outcome.verdict;
  return out;
}

std::string confusion_csv(const CorpusRun& run) {
  std::ostringstream out;
  out << "mode,TP,FP,TN,FN,excluded\n";
  for (Mode m : run.modes) {
    auto c = corpus_confusion(run, m);
    out << to_string(m) << ',' << c.tp << ',' << c.fp << ',' << c.tn << ',' << c.fn << ',' << c.excluded << '\n';
  }
  return out.str();
}

std::string metrics_csv(const CorpusRun& run) {
  std::ostringstream out;
  out << "mode,precision,recall,accuracy,f1\n";
  for (Mode m : run.modes) {
    auto c = corpus_confusion(run, m);
    MetricsSummary s = c.total() > 0 ? metrics(c) : MetricsSummary{};
    out << to_string(m) << ',' << ratio(s.precision) << ',' << ratio(s.recall) << ',' << ratio(s.accuracy) << ','
        << ratio(s.f1) << '\n';
  }
  return out.str();
}

std::string transitions_csv(const CorpusRun& run) {
  static constexpr Verdict kAll[] = {Verdict::True, Verdict::False, Verdict::Timeout};
  std::ostringstream out;
  out << "mode_a,mode_b,a_verdict,b_verdict,count\n";
  for (std::size_t i = 0; i < run.modes.size(); ++i)
    for (std::size_t j = i + 1; j < run.modes.size(); ++j) {
      auto t = transitions(verdicts_of(run, run.modes[i]), verdicts_of(run, run.modes[j]));
      for (Verdict a : kAll)
        for (Verdict b : kAll)
          out << to_string(run.modes[i]) << ',' << to_string(run.modes[j]) << ',' << to_string(a) << ','
              << to_string(b) << ',' << t.at(a, b) << '\n';
    }
  return out.str();
}

namespace {

std::vector<UnitVerdicts> unit_verdicts(const CorpusRun& run) {
  std::vector<UnitVerdicts> out;
  for (const auto& u : run.units()) {
    UnitVerdicts v{{}, u, {}};
    for (Mode m : run.modes)
      if (const UnitRun* r = run.find(u, m)) {
        v.project = r->project;
        v.verdicts.push_back(r->outcome.verdict);
      }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

std::string histogram_csv(const CorpusRun& run) {
  std::ostringstream out;
  out << "divergences,projects\n";
  for (const auto& [d, n] : divergence_histogram(unit_verdicts(run))) out << d << ',' << n << '\n';
  return out.str();
}

std::string timing_csv(const CorpusRun& run) {
  std::ostringstream out;
  out << "unit,mode,reps,mean_ms,median_ms,stddev_ms,noisy\n";
  for (const auto& r : run.runs) {
    SampleStats s = describe(r.timings);
    out << r.unit << ',' << to_string(r.mode) << ',' << r.timings.size() << ',' << fixed(s.mean, 3) << ','
        << fixed(s.median, 3) << ',' << fixed(s.stddev, 3) << ',' << (s.noisy ? "true" : "false") << '\n';
  }
  return out.str();
}

void write_outputs(const CorpusRun& run, const fs::path& dir) {
  fs::create_directories(dir);
  auto put = [&](const char* name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir / name).string());
    f << text;
  };
  put("records.jsonl", emit_records(records_of(run)));
  put("confusion.csv", confusion_csv(run));
  put("metrics.csv", metrics_csv(run));
  put("transitions.csv", transitions_csv(run));
  put("histogram.csv", histogram_csv(run));
  put("timing.csv", timing_csv(run));
}

std::string summarize(const CorpusRun& run) {
  std::ostringstream out;
  const auto units = run.units();
  out << units.size() << " units, " << run.errors.size() << " corpus errors\n";
  for (const auto& e : run.errors) out << "  error: " << e.scenario << ": " << e.message << '\n';
  for (Mode m : run.modes) {
    int n[3] = {0, 0, 0};
    for (const auto& [u, v] : verdicts_of(run, m)) ++n[static_cast<int>(v)];
    out << to_string(m) << ": true " << n[0] << ", false " << n[1] << ", timeout " << n[2];
    auto c = corpus_confusion(run, m);
    if (c.total() > 0) {
      auto s = metrics(c);
      out << " | TP " << c.tp << " FP " << c.fp << " TN " << c.tn << " FN " << c.fn << " excluded " << c.excluded
          << " | precision " << ratio(s.precision) << " recall " << ratio(s.recall) << " accuracy "
          << ratio(s.accuracy) << " f1 " << ratio(s.f1);
    }
    out << '\n';
  }
  if (run.modes.size() >= 2 && !units.empty()) {
    std::vector<UnitTiming> timing;
    std::vector<std::pair<double, double>> pairs;
    for (const auto& u : units) {
      UnitTiming t{u, {}};
      for (Mode m : run.modes) t.samples.push_back(run.find(u, m)->timings);
      pairs.push_back({describe(t.samples[0]).mean, describe(t.samples[1]).mean});
      timing.push_back(std::move(t));
    }
    auto ts = timing_summary(timing, run.modes.size());
    out << "timing (mean ms over units):";
    for (std::size_t i = 0; i < run.modes.size(); ++i)
      out << ' ' << to_string(run.modes[i]) << ' ' << fixed(ts.grand[i].mean, 3) << " (faster in " << ts.wins[i]
          << ')';
    out << ", ties " << ts.ties << '\n';
    try {
      auto w = wilcoxon_signed_rank(pairs);
      out << "wilcoxon " << to_string(run.modes[0]) << " vs " << to_string(run.modes[1]) << ": W = " << fixed(w.w, 1)
          << ", p = " << fixed(w.p, 4) << (w.exact ? " (exact)" : " (normal)") << '\n';
    } catch (const Error& e) {
      out << "wilcoxon: " << e.what() << '\n';
    }
  }
  return out.str();
}

}  // namespace semconf
