#pragma once

// Verdict vectors built from published dataset counts, shared by the unit
// tests and the acceptance suite.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "semconf/evaluation.hpp"

namespace fixtures {

using semconf::GroundTruth;
using semconf::Verdict;

inline void repeat(std::vector<std::pair<Verdict, GroundTruth>>& out, int n, Verdict v, GroundTruth t) {
  for (int i = 0; i < n; ++i) out.push_back({v, t});
}

// 99 labeled units. `timeouts` are spread over both labels.
inline std::vector<std::pair<Verdict, GroundTruth>> labeled(int tp, int fp, int tn, int fn, int timeouts) {
  std::vector<std::pair<Verdict, GroundTruth>> out;
  repeat(out, tp, Verdict::True, GroundTruth::True);
  repeat(out, fp, Verdict::True, GroundTruth::False);
  repeat(out, tn, Verdict::False, GroundTruth::False);
  repeat(out, fn, Verdict::False, GroundTruth::True);
  for (int i = 0; i < timeouts; ++i) out.push_back({Verdict::Timeout, i % 2 ? GroundTruth::True : GroundTruth::False});
  return out;
}

inline std::vector<std::pair<Verdict, GroundTruth>> labeled_nopa() { return labeled(8, 9, 55, 21, 6); }
inline std::vector<std::pair<Verdict, GroundTruth>> labeled_pa() { return labeled(2, 5, 59, 27, 6); }

// Unlabeled dataset: per-unit verdicts under noPA (first) and PA (second)
// with the published cell counts.
inline std::pair<std::map<std::string, Verdict>, std::map<std::string, Verdict>> unlabeled_pair() {
  const struct {
    Verdict a, b;
    int n;
  } cells[] = {
      {Verdict::True, Verdict::True, 234},      {Verdict::True, Verdict::False, 39},
      {Verdict::Timeout, Verdict::True, 9},     {Verdict::Timeout, Verdict::False, 24},
      {Verdict::Timeout, Verdict::Timeout, 2},  {Verdict::False, Verdict::False, 612},
  };
  std::map<std::string, Verdict> a, b;
  int id = 0;
  for (const auto& c : cells)
    for (int i = 0; i < c.n; ++i) {
      std::string u = "u" + std::to_string(id++);
      a[u] = c.a;
      b[u] = c.b;
    }
  return {a, b};
}

// Projects with 1, 2, 4, 5, 6 and 9 divergent units (20, 5, 1, 2, 2 and 1
// projects respectively), plus agreeing units and agreeing projects.
inline std::vector<semconf::UnitVerdicts> divergence_units() {
  const std::pair<int, int> shape[] = {{1, 20}, {2, 5}, {4, 1}, {5, 2}, {6, 2}, {9, 1}};
  std::vector<semconf::UnitVerdicts> out;
  int project = 0;
  const Verdict kinds[][2] = {{Verdict::True, Verdict::False},
                              {Verdict::Timeout, Verdict::False},
                              {Verdict::Timeout, Verdict::True}};
  for (const auto& [divergent, projects] : shape)
    for (int p = 0; p < projects; ++p, ++project) {
      const std::string name = "project" + std::to_string(project);
      for (int u = 0; u < divergent; ++u)
        out.push_back({name, name + "/d" + std::to_string(u), {kinds[u % 3][0], kinds[u % 3][1]}});
      out.push_back({name, name + "/same", {Verdict::False, Verdict::False}});
    }
  for (int p = 0; p < 7; ++p)
    out.push_back({"quiet" + std::to_string(p), "quiet/u", {Verdict::True, Verdict::True}});
  return out;
}

}  // namespace fixtures
