#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spdelab/basis.hpp"

namespace spdelab {

/// Odd polynomial drift with polynomial diffusion:
///   f(u) = sum_{j=1}^{beta} b_j * u * |u|^{j-1},   b_beta < 0,
///   sigma(u) = sum_{k>=0} s_k * u^k.
/// gamma is the declared growth exponent of sigma and r = max(beta, gamma)
/// is the common growth exponent used by the certification routines.
/// When cutoff_n is set, eval_f and eval_sigma apply the smooth radial
/// cutoff chi_n(|u|) pointwise, which leaves both coefficients unchanged on
/// [-n, n] and zero outside [-2n, 2n].
struct PolyModel {
  Vector f_coeffs;
  Vector sigma_coeffs;
  int beta = 1;
  double gamma = 1.0;
  double r = 1.0;
  std::optional<double> cutoff_n;
};

/// Validates and assembles a model. f_coeffs holds b_1..b_beta (the last
/// entry must be strictly negative), sigma_coeffs holds s_0..s_deg (may be
/// empty for sigma == 0), and gamma must be >= 1. The drift/diffusion
/// degree balance is not enforced here; certify_H2 decides it and reports
/// falsified when the balance fails.
PolyModel make_model(const Vector& f_coeffs, const Vector& sigma_coeffs,
                     double gamma);

/// Copy of m with the smooth cutoff at radius n > 0 enabled.
PolyModel with_cutoff(const PolyModel& m, double n);

/// Pointwise drift and diffusion, cutoff included when enabled.
double f_scalar(const PolyModel& m, double x);
double sigma_scalar(const PolyModel& m, double x);

/// Pointwise application on the grid values followed by a transform, so
/// the result carries both representations.
Field eval_f(const PolyModel& m, const SpectralBasis& b, const Field& u);
Field eval_sigma(const PolyModel& m, const SpectralBasis& b, const Field& u);

/// Smooth cutoff weight: exactly 1 for s <= n, exactly 0 for s >= 2n,
/// and a strictly decreasing C-infinity transition between. Requires n > 0.
double cutoff_chi(double radius_n, double s);

enum class CertStatus { verified, falsified, grid_verified_only };

const char* to_string(CertStatus s);

/// Point (or pair) attaining one of the certified constants, with the
/// value of the defining expression there. v is unused (zero) for the
/// univariate constants.
struct Witness {
  std::string constant;
  double u = 0.0;
  double v = 0.0;
  double value = 0.0;
};

/// Constants certified for the dissipativity and one-sided Lipschitz
/// conditions. Each certification call fills the constants it is
/// responsible for and leaves the others at zero; merge_certificates
/// combines an H2 and an H3 result for reporting.
struct HypothesisCertificate {
  double q = 0.0;
  double r = 1.0;
  double theta = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double c5 = 0.0;
  std::vector<Witness> witnesses;
  CertStatus status = CertStatus::grid_verified_only;
};

/// Certifies the weak coercivity and growth condition
///   f(u)u + (q r^2 - 1) Theta sigma(u)^2 <= -c1 u^2 + c2
/// for the raw polynomial pair (the cutoff, if any, is ignored: the
/// truncated coefficients are Lipschitz, not coercive). Requires q > 6.
/// On the two half-lines the left side plus c1 u^2 is an honest polynomial,
/// so the certificate is exact: c1 follows the documented margin policy,
/// c2 is the global maximum located through critical points, and c3 bounds
/// |f| + |sigma| against |u|^r + 1 on a wide audit grid joined with the
/// asymptotic ratio. Status is verified on success; falsified (with the
/// offending leading coefficient as witness) when no c1 > 0 can work.
HypothesisCertificate certify_H2(const PolyModel& m, double q, double theta);

/// Estimates the one-sided Lipschitz constants on [-R, R]^2:
///   (f(u)-f(v))(u-v) + (q r^2 - 1) Theta (sigma(u)-sigma(v))^2
///       <= c4 (u-v)^2,
///   |f(u)-f(v)| + |sigma(u)-sigma(v)|
///       <= c5 (1 + |u|^{r-1} + |v|^{r-1}) |u-v|,
/// by dense grid maximization, with exact ray checks (u = -v and v = 0)
/// that detect a diverging quotient. Requires q > 6 and R > 0. Status is
/// grid-verified-only on success (the grid maximizer is a sound falsifier
/// but only a heuristic verifier) and falsified when a ray diverges.
HypothesisCertificate certify_H3(const PolyModel& m, double q, double theta,
                                 double R);

/// Union of an H2 and an H3 certificate over the same (q, r, theta).
/// The merged status is falsified if either input is, and otherwise
/// grid-verified-only (an H3 positive is never better than that).
HypothesisCertificate merge_certificates(const HypothesisCertificate& h2,
                                         const HypothesisCertificate& h3);

/// Global Lipschitz constant of the pair (f, sigma), as the maximum of
/// |f'| and |sigma'| in closed form on a dense grid. Requires either an
/// enabled cutoff (support in [-2n, 2n]) or degree <= 1 coefficients;
/// throws otherwise, since higher-degree polynomials are not globally
/// Lipschitz.
double lipschitz_bound(const PolyModel& m);

}  // namespace spdelab
