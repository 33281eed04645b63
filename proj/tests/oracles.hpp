#pragma once

// Independent reference computations used to check the statistics code.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracles {

// Brute force over every sign assignment, ranks computed pairwise.
inline double wilcoxon_enumeration_p(const std::vector<double>& diffs) {
  std::vector<double> d;
  for (double x : diffs)
    if (x != 0) d.push_back(x);
  const std::size_t n = d.size();
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double below = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(d[j]) < std::abs(d[i])) ++below;
      if (std::abs(d[j]) == std::abs(d[i])) ++equal;
    }
    rank[i] = below + (equal + 1) / 2;
  }
  double total = 0, plus = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rank[i];
    if (d[i] > 0) plus += rank[i];
  }
  const double w = std::min(plus, total - plus);
  int hits = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double p = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) p += rank[i];
    if (std::min(p, total - p) <= w + 1e-9) ++hits;
  }
  return static_cast<double>(hits) / (1u << n);
}

}  // namespace oracles
