#include "semconf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace semconf {

std::string_view to_string(GroundTruth g) {
  switch (g) {
    case GroundTruth::True: return "true";
    case GroundTruth::False: return "false";
    case GroundTruth::Unlabeled: return "unlabeled";
  }
  return "?";
}

ConfusionMatrix confusion(const std::vector<std::pair<Verdict, GroundTruth>>& labeled) {
  ConfusionMatrix m;
  for (const auto& [v, truth] : labeled) {
    if (truth == GroundTruth::Unlabeled) throw Error("confusion: unlabeled unit");
    if (v == Verdict::Timeout) {
      ++m.excluded;
    } else if (v == Verdict::True) {
      ++(truth == GroundTruth::True ? m.tp : m.fp);
    } else {
      ++(truth == GroundTruth::False ? m.tn : m.fn);
    }
  }
  return m;
}

MetricsSummary metrics(const ConfusionMatrix& m) {
  if (m.total() == 0) throw Error("metrics: empty confusion matrix");
  auto ratio = [](int num, int den) {
    return den > 0 ? Ratio{static_cast<double>(num) / den, true} : Ratio{};
  };
  return {ratio(m.tp, m.tp + m.fp), ratio(m.tp, m.tp + m.fn), ratio(m.tp + m.tn, m.total()),
          ratio(2 * m.tp, 2 * m.tp + m.fp + m.fn)};
}

int TransitionTable::row_total(Verdict a) const {
  const auto& row = cells[static_cast<int>(a)];
  return std::accumulate(row.begin(), row.end(), 0);
}

int TransitionTable::column_total(Verdict b) const {
  int n = 0;
  for (const auto& row : cells) n += row[static_cast<int>(b)];
  return n;
}

TransitionTable transitions(const std::map<std::string, Verdict>& a, const std::map<std::string, Verdict>& b) {
  if (a.size() != b.size()) throw Error("transitions: unit sets differ");
  TransitionTable t;
  for (const auto& [unit, va] : a) {
    auto it = b.find(unit);
    if (it == b.end()) throw Error("transitions: unit '" + unit + "' missing from second mode");
    ++t.cells[static_cast<int>(va)][static_cast<int>(it->second)];
  }
  return t;
}

VennBand venn_band(const TransitionTable& t, Verdict v) {
  VennBand out;
  out.both = t.at(v, v);
  out.a_only = t.row_total(v) - out.both;
  out.b_only = t.column_total(v) - out.both;
  return out;
}

std::map<int, int> divergence_histogram(const std::vector<UnitVerdicts>& units) {
  std::map<std::string, int> per_project;
  for (const auto& u : units) {
    std::set<Verdict> distinct(u.verdicts.begin(), u.verdicts.end());
    if (distinct.size() > 1) ++per_project[u.project];
  }
  std::map<int, int> out;
  for (const auto& [project, n] : per_project) ++out[n];
  return out;
}

SampleStats describe(const std::vector<double>& samples) {
  SampleStats s;
  if (samples.empty()) return s;
  const double n = static_cast<double>(samples.size());
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
  if (samples.size() > 1) {
    double ss = 0;
    for (double x : samples) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / (n - 1));
  }
  s.noisy = s.stddev > 0.10 * s.mean;
  return s;
}

TimingSummary timing_summary(const std::vector<UnitTiming>& units, std::size_t modes) {
  TimingSummary out;
  out.wins.assign(modes, 0);
  std::vector<std::vector<double>> means(modes);
  for (const auto& u : units) {
    if (u.samples.size() != modes) throw Error("timing_summary: unit '" + u.unit + "' lacks a mode");
    std::vector<SampleStats> row;
    for (std::size_t m = 0; m < modes; ++m) {
      row.push_back(describe(u.samples[m]));
      means[m].push_back(row.back().mean);
    }
    auto best = std::min_element(row.begin(), row.end(),
                                 [](const SampleStats& a, const SampleStats& b) { return a.mean < b.mean; });
    int at_best = static_cast<int>(std::count_if(row.begin(), row.end(), [&](const SampleStats& s) {
      return s.mean == best->mean;
    }));
    if (at_best > 1)
      ++out.ties;
    else
      ++out.wins[static_cast<std::size_t>(best - row.begin())];
    out.per_unit.push_back(std::move(row));
  }
  for (std::size_t m = 0; m < modes; ++m) {
    SampleStats g = describe(means[m]);
    g.noisy = false;
    out.grand.push_back(g);
  }
  return out;
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<double> d;
  for (const auto& [a, b] : pairs)
    if (a - b != 0) d.push_back(a - b);
  if (d.size() < 5) throw Error("insufficient pairs: need at least 5 non-zero differences");

  // Average ranks of |d|, doubled so that tied ranks stay integral.
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return std::abs(d[i]) < std::abs(d[j]); });
  std::vector<long> rank2(n);
  double tie_term = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    const long r2 = static_cast<long>(i + 1 + j + 1);  // 2 * average of ranks i+1..j+1
    for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = r2;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }

  WilcoxonResult r;
  r.n = static_cast<int>(n);
  long plus2 = 0, total2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += rank2[i];
    if (d[i] > 0) plus2 += rank2[i];
  }
  const long w2 = std::min(plus2, total2 - plus2);
  r.w_plus = plus2 / 2.0;
  r.w_minus = (total2 - plus2) / 2.0;
  r.w = w2 / 2.0;

  if (n <= 25) {
    // Null distribution of doubled W+ over all 2^n sign assignments.
    std::vector<double> count(static_cast<std::size_t>(total2) + 1, 0.0);
    count[0] = 1;
    long reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (long s = reach; s >= 0; --s)
        if (count[static_cast<std::size_t>(s)] != 0) count[static_cast<std::size_t>(s + rank2[i])] += count[static_cast<std::size_t>(s)];
      reach += rank2[i];
    }
    double extreme = 0;
    for (long s = 0; s <= total2; ++s)
      if (s <= w2 || s >= total2 - w2) extreme += count[static_cast<std::size_t>(s)];
    r.p = std::min(1.0, extreme / std::ldexp(1.0, static_cast<int>(n)));
    r.exact = true;
  } else {
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1) / 4;
    const double var = nn * (nn + 1) * (2 * nn + 1) / 24 - tie_term / 48;
    const double z = std::max(0.0, std::abs(r.w - mean) - 0.5) / std::sqrt(var);
    r.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  }
  return r;
}

}  // namespace semconf
