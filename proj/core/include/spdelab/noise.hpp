#pragma once

#include <optional>
#include <vector>

#include "spdelab/basis.hpp"
#include "spdelab/rng.hpp"

namespace spdelab {

/// Mode-variance family for the driving noise. Either a power law
/// mu_j = c * j^{-s} or an explicit list of nonnegative variances.
struct NoiseFamily {
  enum class Type { power, list };
  Type type = Type::power;
  double c = 1.0;
  double s = 2.0;
  std::vector<double> values;

  static NoiseFamily power_law(double c, double s);
  static NoiseFamily from_list(std::vector<double> values);
};

/// Covariance data for a Q-Wiener process expanded in the working basis.
///
/// theta collects sum_j mu_j * ||e_j||_sup^2 over the retained modes;
/// theta_delta is the delta-weighted variant sum_j lambda_j^delta mu_j
/// * ||e_j||_sup^2 for the stored delta (1/m after order-m truncation,
/// 0 for the untruncated process, so theta_delta == theta there).
/// tail_trace estimates the mass dropped by the finite mode cut for
/// power-law families and is zero for lists.
struct NoiseSpec {
  Vector mu;
  NoiseFamily family;
  double theta = 0.0;
  double theta_delta = 0.0;
  double delta = 0.0;
  std::optional<int> truncation_m;
  double tail_trace = 0.0;
};

/// Builds the covariance data for the first b.N modes. List families must
/// supply at least b.N entries, all nonnegative.
NoiseSpec build_noise(const NoiseFamily& family, const SpectralBasis& b);

/// Applies the order-m damping schedule: modes with lambda_j <= 1 keep
/// their variance, all others are scaled by lambda_j^{-1/m}. Requires
/// m >= 1. Traces are recomputed from the damped variances.
NoiseSpec truncate(const NoiseSpec& spec, const SpectralBasis& b, int m);

/// L1 distance between the order-m and order-n damped variances, weighted
/// by the squared sup norm of the modes. Zero when m == n, bounded by
/// 2 * theta, and shrinking as both orders grow.
double theta_mn(const NoiseSpec& spec, const SpectralBasis& b, int m, int n);

/// Draws one Wiener increment over a step of length dt: independent
/// N(0, mu_j * dt) coefficients, grid values synchronized before return.
/// Consumes exactly one rng event.
Field sample_increment(const NoiseSpec& spec, const SpectralBasis& b,
                       double dt, RngStream& rng);

}  // namespace spdelab
