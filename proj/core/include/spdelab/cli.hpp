#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "spdelab/config.hpp"

namespace spdelab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitCertification = 2;
inline constexpr int kExitBoundFailure = 3;

/// Command-line overrides. Precedence for the master seed is
/// --seed flag, then SPDELAB_SEED, then the config value; --paths and
/// --out override the corresponding config entries the same way.
struct CliOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> paths;
  std::optional<std::string> out_dir;
  bool allow_grid = false;
};

/// Certifies the configured model and writes certificate.json.
/// Exit 0 when the merged status is accepted: verified always is,
/// grid-verified-only only under --allow-grid; falsified exits 2.
int cmd_certify(const ExperimentConfig& cfg, const CliOptions& opt);

/// Runs the ensemble, writes moments.csv and reports.json, and applies the
/// configured checks. Exit 3 when any check fails; 2 when a needed
/// certificate is falsified. Identical config and seed produce
/// byte-identical artifacts.
int cmd_simulate(const ExperimentConfig& cfg, const CliOptions& opt);

/// Contraction experiment on the truncated model: analytic budget,
/// iteration diagnostics, and the distance between the fixed point and the
/// integrator orbit, written to picard.json. Exit 3 when the iteration
/// fails to contract at or below the budget.
int cmd_picard(const ExperimentConfig& cfg, const CliOptions& opt);

/// Brownian self-test of the continuity moment bound, written to
/// kolmogorov.json. Exit 3 on a failed bound.
int cmd_kolmogorov(const ExperimentConfig& cfg, const CliOptions& opt);

/// Prints a summary of the artifacts found in the output directory.
/// Exit 3 if any stored verdict failed.
int cmd_report(const ExperimentConfig& cfg, const CliOptions& opt);

/// Full argument parser and dispatcher for the spdelab binary.
int run_cli(int argc, const char* const* argv);

}  // namespace spdelab
