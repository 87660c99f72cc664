#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spdelab/integrate.hpp"
#include "spdelab/model.hpp"

namespace spdelab {

/// E ||u(t)||_{L^rho}^rho estimates for one configured rho.
struct RhoSeries {
  double rho = 0.0;
  std::vector<double> values;
  std::vector<double> stderrs;
};

/// Ensemble moment estimates over the recorded times: the sup-norm moment
/// E ||u(t)||_{C0}^q, the L^rho moments for each configured rho, and the
/// spatial-regularity moment E ||A^{1/2} u(t)||_{Lq}^q. Standard errors
/// are per-time sample std / sqrt(M) (zero when M == 1).
struct MomentSeries {
  std::vector<double> times;
  std::vector<double> m_c0_q;
  std::vector<double> se_c0_q;
  std::vector<RhoSeries> m_lrho_rho;
  std::vector<double> m_h1_q;
  std::vector<double> se_h1_q;
  int M = 0;
  double q = 0.0;
};

/// Outcome of one quantitative bound check. lhs/rhs are tabulated over
/// times (a single entry for scalar bounds); margin = min(rhs - lhs).
struct BoundReport {
  std::string bound_name;
  std::vector<double> times;
  std::vector<double> lhs;
  std::vector<double> rhs;
  double margin = 0.0;
  bool pass = false;
  std::string qualifier;
};

/// Empirical moments of an ensemble of recorded paths (all paths must share
/// the same record times). M == 1 is allowed and yields zero standard
/// errors.
MomentSeries estimate_moments(const std::vector<PathResult>& ensemble,
                              const SpectralBasis& b, double q,
                              const std::vector<double>& rho_list);

struct EnsembleResult {
  MomentSeries series;
  int tau_hit_count = 0;
  int blown_up_count = 0;
  std::vector<double> per_path_max_sup;
};

/// Simulates `paths` independent trajectories (path p uses RngStream
/// (master_seed, p)) and reduces their norms into a MomentSeries without
/// retaining states. Workers run in parallel; the reduction visits paths
/// in index order, so results are bit-identical for any thread count.
/// threads == 0 picks SPDELAB_THREADS or the hardware concurrency.
EnsembleResult run_ensemble(const StepperConfig& cfg, const SpectralBasis& b,
                            const PolyModel& m, const NoiseSpec& spec,
                            const Field& u0, int paths,
                            std::uint64_t master_seed, double q,
                            const std::vector<double>& rho_list,
                            int threads = 0);

/// Checks the moment-energy decay for one configured rho:
///   E ||u(t)||_rho^rho <= u0_moment e^{-ct1 t} + ct2/ct1,
/// with ct1 = rho c1 / 2 and
/// ct2 = 2 (2(rho-2)/(rho c1))^{(rho-2)/rho} c2^{rho/2} |O|.
/// Requires a verified certificate. Pass means lhs <= rhs + 2 stderr at
/// every recorded time.
BoundReport check_energy_inequality(const MomentSeries& series,
                                    const HypothesisCertificate& cert,
                                    double rho, double u0_moment,
                                    double domain_size);

/// Checks mean dissipativity of the sup-norm moment for t >= 1: fits the
/// smallest envelope constant with
///   m_c0_q(t) <= Chat (u0_qr_moment e^{-cbar1 (t-1)} + 1),
/// cbar1 = q r c1 / 2, and passes when Chat is finite and the envelope does
/// not expand over the second half of the horizon (within 2 stderr). The
/// series must reach t >= 1.
BoundReport check_dissipativity(const MomentSeries& series,
                                const HypothesisCertificate& cert, double q,
                                double r, double u0_qr_moment);

/// Holder seminorm estimate of a scalar track sampled on a dyadic grid
/// over [0, T] (size 2^depth + 1): the max over every level of adjacent
/// same-level increments |x_{k+1} - x_k| / (T 2^{-n})^eta. Pairs outside
/// the nested levels are skipped, so this underestimates the true
/// seminorm, which is the safe direction for the <= checks it feeds.
double holder_seminorm(const std::vector<double>& path, double eta, double T);

/// Moment bound for the Holder seminorm of a process with
/// E ||v_t - v_s||^q <= C |t-s|^xi:
///   B = 4^q C T^xi / (1 - 2^{-d})^q,  d = (xi-1)/q - eta.
/// Requires q > 1, xi > 1, 0 < eta < (xi-1)/q.
double kolmogorov_bound(double C, double q, double xi, double eta, double T);

/// Empirical check of the seminorm moment bound over an ensemble of scalar
/// dyadic tracks: mean K^q against kolmogorov_bound, and the supremum
/// variant E sup_t |v_t|^q <= 2^{q-1} (C Cq T^{xi'} + M0) with
/// Cq = 4^q / (1 - 2^{-d'})^q, d' = (2 xi - 1 - xi')/q, M0 the empirical
/// q-moment at t = 0. xi_prime <= 0 selects the midpoint default
/// (3 xi - 1)/2 of the admissible range (xi, 2 xi - 1).
BoundReport check_kolmogorov(const std::vector<std::vector<double>>& paths,
                             double C, double q, double xi, double eta,
                             double T, double xi_prime = 0.0);

/// Envelope fit of the spatial-regularity moment: scans kappa over
/// (0, min(kappa_max, q-1)) for the smallest constant with
/// m_h1_q(t) <= Chat (t^kappa + 1) and reports the minimizing pair.
/// Pass means the envelope is finite; the exponent is reported, not
/// asserted against a target.
BoundReport regularity_probe(const MomentSeries& series, double kappa_max);

}  // namespace spdelab
