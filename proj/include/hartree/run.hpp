#pragma once

// Configuration, orchestration and artifacts of the experiment driver.
//
// A config is plain text, one key=value per line, '#' starts a comment.
// Every run writes results.csv, summary.json and invariants.txt into its
// output directory; the exit status is 0 iff all asserted invariants hold.

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hartree/solver.hpp"

namespace hartree {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunMode { solve, sweep, verify, blowup };

RunMode parse_mode(const std::string& name);
std::string mode_name(RunMode m);

struct RunConfig {
  RunMode mode = RunMode::solve;
  /// verify mode only: convolution, duhamel, backend, inequalities,
  /// contraction or symmetry.
  std::string suite;
  double gamma = 1.0;
  double R = 1.0;
  double epsilon = 0.0;
  std::vector<double> epsilon_list;
  /// Defaults to R / 64.
  double h = 0.0;
  double t_max = 10.0;
  DataFamily family = DataFamily::bump_v1_only;
  std::string out = "out";
  unsigned long long seed = 20261016;
  unsigned threads = 1;
  /// Remaining keys, checked against the list of known names.
  std::map<std::string, std::string> extra;

  double num(const std::string& key, double fallback) const;
  std::vector<double> list(const std::string& key, std::vector<double> fallback) const;
  bool has(const std::string& key) const { return extra.count(key) != 0; }

  /// Throws ConfigError on missing mode-specific fields or values out of range.
  void validate() const;
  Params params() const;
  DataSpec data() const { return {family, epsilon, R}; }
};

/// Numbers may be written as fractions ("1/64").
double parse_number(const std::string& text);

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

struct Invariant {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct RunOutcome {
  /// 0 pass, 1 invariant failure, 2 config error, 3 numerical abort.
  int status = 0;
  std::vector<Invariant> invariants;
  std::string message;

  const Invariant* find(const std::string& name) const;
};

/// Runs the configured pipeline and writes its artifacts into out_dir
/// (config.out when empty).
RunOutcome run(const RunConfig& config, const std::filesystem::path& out_dir = {});

}  // namespace hartree
