// Command-line driver: hartree_lab --config FILE [--mode M] [--out DIR] [--seed N]

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "hartree/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Radial damped Hartree wave experiments"};
  std::string config_path, mode, out;
  unsigned long long seed = 0;
  unsigned threads = 0;
  app.add_option("--config", config_path, "key=value config file")->required();
  app.add_option("--mode", mode, "override the config mode (solve, sweep, verify, blowup)");
  app.add_option("--out", out, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "seed of the randomized verifiers");
  app.add_option("--threads", threads, "advisory; runs are sequential");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  hartree::RunConfig cfg;
  try {
    cfg = hartree::load_config(config_path);
    if (!mode.empty()) cfg.mode = hartree::parse_mode(mode);
  } catch (const hartree::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
  if (!out.empty()) cfg.out = out;
  if (*seed_opt) cfg.seed = seed;
  if (threads > 0) cfg.threads = threads;

  hartree::RunOutcome outcome;
  try {
    outcome = hartree::run(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  if (outcome.status == 2) {
    std::fprintf(stderr, "config error: %s\n", outcome.message.c_str());
    return 2;
  }
  for (const auto& inv : outcome.invariants)
    std::printf("%s %s (value %.6g, limit %.6g)\n", inv.passed ? "PASS" : "FAIL", inv.name.c_str(),
                inv.value, inv.limit);
  if (!outcome.message.empty()) std::fprintf(stderr, "%s\n", outcome.message.c_str());
  std::printf("status %d, artifacts in %s\n", outcome.status, cfg.out.c_str());
  return outcome.status;
}
