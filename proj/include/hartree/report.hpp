#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace hartree {

/// Outcome of a numerical inequality check.
struct EstimateReport {
  std::string name;
  std::size_t samples = 0;
  double max_ratio = 0.0;
  std::size_t violations = 0;
  double empirical_constant = 0.0;
  /// Additional named diagnostics, kept in insertion order.
  std::vector<std::pair<std::string, double>> extra;

  bool passed() const { return violations == 0; }
  void note(std::string key, double value) { extra.emplace_back(std::move(key), value); }
  /// Flat key=value block, one entry per line.
  std::string to_text() const;
};

}  // namespace hartree
