#pragma once

#include <optional>
#include <vector>

#include "spdelab/basis.hpp"
#include "spdelab/model.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/rng.hpp"

namespace spdelab {

enum class Scheme { semi_implicit, exponential_euler, tamed_explicit };

const char* to_string(Scheme s);

/// Time-stepping parameters. stop_radius_n, when set, arms the discrete
/// stopping time: the path freezes at the first step boundary where the
/// sup norm reaches the radius. record_every controls the output stride;
/// the initial and final states are always recorded.
struct StepperConfig {
  Scheme scheme = Scheme::exponential_euler;
  double dt = 1e-3;
  double T = 1.0;
  std::optional<double> stop_radius_n;
  int record_every = 1;
};

/// One simulated trajectory. sup_history holds the refined sup norm at
/// each recorded instant. tau_n_hit is the first step boundary (time,
/// multiples of dt, possibly 0) where the sup norm reached the stop
/// radius; past it the recorded state repeats unchanged. blown_up marks
/// numeric overflow: the last finite state is frozen and the flag is set
/// instead of crashing or recording non-finite values.
struct PathResult {
  std::vector<double> times;
  std::vector<Field> states;
  std::optional<double> tau_n_hit;
  std::vector<double> sup_history;
  bool blown_up = false;
};

/// Advances one step of the chosen scheme. All drift terms are evaluated
/// pseudo-spectrally (grid values through f, then transformed); the noise
/// term is the grid-pointwise product sigma(u) * dW transformed back.
/// Mode-wise updates, with dW drawn from spec (one rng event):
///   semi_implicit:      u+ = (u + dt f + g) / (1 + dt lambda)
///   exponential_euler:  u+ = e^{-l dt} u + (1-e^{-l dt})/l f + e^{-l dt} g
///   tamed_explicit:     u+ = e^{-l dt} u + dt f/(1 + dt|f|) + g
Field step(const StepperConfig& cfg, const SpectralBasis& b,
           const PolyModel& m, const NoiseSpec& spec, const Field& u,
           RngStream& rng);

/// Runs one path from u0 to T, recording per cfg. The stopping radius is
/// checked at every step boundary, including t = 0.
PathResult run_path(const StepperConfig& cfg, const SpectralBasis& b,
                    const PolyModel& m, const NoiseSpec& spec,
                    const Field& u0, RngStream& rng);

/// Successive mild-formulation iterates and their contraction diagnostics.
/// distances[k] is the sup-over-time sup-norm gap between iterate k+1 and
/// iterate k; ratios[k] the corresponding consecutive quotient.
struct PicardResult {
  std::vector<double> times;
  std::vector<Field> trajectory;
  std::vector<double> distances;
  std::vector<double> ratios;
  bool converged = false;
  int iterations = 0;
};

/// Fixed-point iteration for the mild formulation on [0, T0] under a
/// frozen noise path (one increment per step, dt = T0 / frozen_path.size()).
/// Requires a model with an enabled cutoff so the coefficients are globally
/// Lipschitz. The drift convolution uses the exact per-step semigroup
/// quadrature with left-point evaluation, so the unique fixed point is the
/// exponential_euler orbit driven by the same increments; the returned
/// trajectory matches it to roundoff when converged. Non-convergence within
/// max_iter sets converged = false (horizon too long for contraction), it
/// does not throw.
PicardResult picard_solve(const SpectralBasis& b, const PolyModel& m,
                          const NoiseSpec& spec, const Field& u0,
                          const std::vector<Field>& frozen_path, double T0,
                          double tol, int max_iter);

/// Largest dyadic horizon T0 = 2^k with
///   C (T0^q + T0^{(1-2a)q/2} + T0^{xi'}) <= 1/2,
/// where C aggregates the contraction constants: C = max(Lip^q,
/// Lip^q 10^q max(1,theta)^{q/2} 2^{q-1} (F_a + F_ag * F_chain)) with
///   F_a  = (1-2a)^{-q/2} [Gamma(1-2a) (2 lambda_gap)^{2a-1}]^{q/2},
///   F_ag = [Gamma(1-2(a+g)) (2 lambda_gap)^{2(a+g)-1}]^{q/2},
///   F_chain = 4^q / (1 - 2^{-d})^q,  d = (2qg - 1 - xi') / q.
/// Admissibility: 2/q < 2g < 1-2a < 1-1/q and qg < xi' < 2qg - 1.
/// The dependence on lip is exactly lip^q, so doubling lip at least halves
/// the result. lip == 0 returns horizon_cap. Evaluated in log space; the
/// search stops at horizon_cap from above and returns 0 if even the
/// smallest representable dyadic fails (unreachable for finite C).
double contraction_budget(double lip, double q, double alpha, double gamma,
                          double xi_prime, double theta, double lambda_gap,
                          double horizon_cap = 64.0);

}  // namespace spdelab
