#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spdelab/integrate.hpp"
#include "spdelab/noise.hpp"

namespace spdelab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BasisConfig {
  double L = 1.0;
  double a0 = 1.0;
  int N = 32;
  int G = 0;  // 0 selects the dealiased default grid size
};

struct NoiseConfig {
  NoiseFamily family = NoiseFamily::power_law(1.0, 2.0);
  std::optional<int> truncation_m;
};

struct ModelConfig {
  std::vector<double> f_coeffs{-1.0};
  std::vector<double> sigma_coeffs;
  double gamma = 1.0;
  double q = 8.0;
  std::optional<double> cutoff_n;
  std::vector<double> rho_list;  // empty selects {q, q*r}
};

struct EnsembleConfig {
  int paths = 2;
  std::uint64_t master_seed = 0;
};

/// Parameters for the contraction experiment. T0 == 0 runs at the analytic
/// budget from contraction_budget; alpha/gamma_t/xi_prime are the budget's
/// analytic exponents (gamma_t is the time regularity exponent, distinct
/// from the model's growth gamma).
struct PicardConfig {
  double T0 = 0.0;
  double tol = 1e-10;
  int max_iter = 64;
  int steps = 64;
  double alpha = 0.2;
  double gamma_t = 0.2;
  double xi_prime = 2.0;
};

/// Parameters for the Brownian self-test of the continuity bound.
struct KolmogorovConfig {
  double C = 3.0;
  double q = 4.0;
  double xi = 2.0;
  double eta = 0.125;
  double T = 1.0;
  int paths = 1000;
  int depth = 10;
};

struct ExperimentConfig {
  BasisConfig basis;
  NoiseConfig noise;
  ModelConfig model;
  StepperConfig stepper;
  EnsembleConfig ensemble;
  PicardConfig picard;
  KolmogorovConfig kolmogorov;
  std::vector<std::string> checks;  // subset of energy|dissipativity|regularity
  std::vector<double> u0_coeffs;    // zero-padded to the basis size
  std::string output_dir = "out";
};

/// Parses the JSON experiment description and validates referential
/// consistency (q > 6, admissible N and G, known check names, positive
/// steps). Throws ConfigError with a readable message on any violation.
ExperimentConfig parse_config(const std::string& text);

/// Canonical serialization; serialize/parse round trips are idempotent.
std::string serialize_config(const ExperimentConfig& cfg);

ExperimentConfig load_config_file(const std::string& path);

}  // namespace spdelab
