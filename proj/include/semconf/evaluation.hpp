#pragma once

// Evaluation statistics over analysis verdicts and timings.

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "semconf/engine.hpp"

namespace semconf {

enum class GroundTruth : std::uint8_t { True, False, Unlabeled };
std::string_view to_string(GroundTruth g);

struct ConfusionMatrix {
  int tp = 0, fp = 0, tn = 0, fn = 0;
  int excluded = 0;  // TIMEOUT verdicts

  int total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

// Throws Error on an unlabeled unit.
ConfusionMatrix confusion(const std::vector<std::pair<Verdict, GroundTruth>>& labeled);

struct Ratio {
  double value = 0;
  bool defined = false;
};

struct MetricsSummary {
  Ratio precision, recall, accuracy, f1;
};

// Throws Error when the matrix is empty.
MetricsSummary metrics(const ConfusionMatrix& m);

// Cells indexed [verdict under A][verdict under B] in True, False, Timeout order.
struct TransitionTable {
  std::array<std::array<int, 3>, 3> cells{};

  int at(Verdict a, Verdict b) const { return cells[static_cast<int>(a)][static_cast<int>(b)]; }
  int row_total(Verdict a) const;
  int column_total(Verdict b) const;
  bool operator==(const TransitionTable&) const = default;
};

// Keyed by unit id; differing unit sets are an error.
TransitionTable transitions(const std::map<std::string, Verdict>& a, const std::map<std::string, Verdict>& b);

// Per-verdict overlap of two modes, as drawn in a two-set Venn diagram with
// one band per verdict: units with that verdict under A only, under both,
// and under B only.
struct VennBand {
  int a_only = 0, both = 0, b_only = 0;
  bool operator==(const VennBand&) const = default;
};
VennBand venn_band(const TransitionTable& t, Verdict v);

struct UnitVerdicts {
  std::string project;
  std::string unit;
  std::vector<Verdict> verdicts;  // one per mode
};

// Divergent units per project (modes disagree, TIMEOUT included), then how
// many projects have each count. Projects without divergences are omitted.
std::map<int, int> divergence_histogram(const std::vector<UnitVerdicts>& units);

struct SampleStats {
  double mean = 0, median = 0, stddev = 0;  // stddev uses n - 1
  bool noisy = false;                       // stddev above 10% of the mean
};
SampleStats describe(const std::vector<double>& samples);

struct UnitTiming {
  std::string unit;
  std::vector<std::vector<double>> samples;  // one sample list per mode
};

struct TimingSummary {
  std::vector<SampleStats> grand;  // per mode, over per-unit means
  std::vector<int> wins;           // per mode: units where its mean is strictly lowest
  int ties = 0;
  std::vector<std::vector<SampleStats>> per_unit;  // [unit][mode]
};
TimingSummary timing_summary(const std::vector<UnitTiming>& units, std::size_t modes);

struct WilcoxonResult {
  double w = 0;  // min(W+, W-)
  double w_plus = 0, w_minus = 0;
  int n = 0;  // non-zero differences
  double p = 1;
  bool exact = false;
};

// Two-sided signed-rank test on a - b. Exact for n <= 25, normal
// approximation with tie and continuity correction above. Throws Error
// ("insufficient pairs") below 5 non-zero differences.
WilcoxonResult wilcoxon_signed_rank(const std::vector<std::pair<double, double>>& pairs);

}  // namespace semconf
