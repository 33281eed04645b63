#pragma once

// Scenario corpora: manifests, per-unit runs across modes, and the CSV tables.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "semconf/engine.hpp"
#include "semconf/evaluation.hpp"
#include "semconf/report.hpp"

namespace semconf {

// scenario.json: {"id", "project", "sources": [...], "sidecar"?, "entry"?, "ground_truth": "true"|"false"|null}
struct Scenario {
  std::string id;
  std::string project;
  std::filesystem::path dir;         // manifest directory; paths below are relative to it
  std::vector<std::string> sources;
  std::optional<std::string> sidecar;
  std::optional<std::string> entry;  // "Class.method"
  GroundTruth truth = GroundTruth::Unlabeled;
};

Scenario load_scenario(const std::filesystem::path& manifest);

// Each root is a manifest file or a directory searched recursively for
// scenario.json. Sorted by id; duplicate ids are an error.
std::vector<Scenario> discover_corpus(const std::vector<std::filesystem::path>& roots);

// Parses the sources (positions use the manifest-relative names) and applies the sidecar.
Program load_program(const Scenario& s);

struct UnitEntry {
  std::string unit;  // scenario id, or "id#Class.method" when it has several entries
  MethodId entry;
};

// The manifest entry if given, else every entry candidate. Throws Error when there is none.
std::vector<UnitEntry> units_of(const Scenario& s, const Program& p);

struct UnitRun {
  std::string unit;
  std::string project;
  GroundTruth truth = GroundTruth::Unlabeled;
  Mode mode = Mode::NoPA;
  AnalysisOutcome outcome;     // from the first rep
  std::vector<double> timings;  // elapsed ms per rep
};

struct CorpusError {
  std::string scenario;
  std::string message;
};

struct CorpusRun {
  std::vector<Mode> modes;
  std::vector<UnitRun> runs;  // unit-major, modes in the order given
  std::vector<CorpusError> errors;

  std::vector<std::string> units() const;
  const UnitRun* find(const std::string& unit, Mode m) const;
};

// Verdicts differing across reps raise Error. Scenarios that fail to load
// are recorded in `errors` and contribute no units.
CorpusRun run_corpus(const std::vector<Scenario>& corpus, const std::vector<Mode>& modes,
                     const AnalysisBudget& budget, int reps);

// Where `nopa` is TRUE and `other` is FALSE, flags each of other's MissRefs
// lying on a noPA conflict flow (a call site or write position of either
// write). Returns whether any MissRef was flagged.
bool annotate_missref_paths(const AnalysisOutcome& nopa, AnalysisOutcome& other);
void annotate_missref_paths(CorpusRun& run);

std::vector<OutcomeRecord> records_of(const CorpusRun& run);

// Labeled units only; a unit timing out under any mode counts as excluded in every mode.
ConfusionMatrix corpus_confusion(const CorpusRun& run, Mode m);
std::map<std::string, Verdict> verdicts_of(const CorpusRun& run, Mode m);

std::string confusion_csv(const CorpusRun& run);
std::string metrics_csv(const CorpusRun& run);
std::string transitions_csv(const CorpusRun& run);
std::string histogram_csv(const CorpusRun& run);
std::string timing_csv(const CorpusRun& run);

// records.jsonl plus the five tables.
void write_outputs(const CorpusRun& run, const std::filesystem::path& dir);

// Human-readable summary for the terminal.
std::string summarize(const CorpusRun& run);

}  // namespace semconf
