#include "spdelab/integrate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spdelab {

namespace {

void validate_stepper(const StepperConfig& cfg) {
  if (cfg.dt <= 0.0) throw std::invalid_argument("stepper: dt must be > 0");
  if (cfg.T < cfg.dt) throw std::invalid_argument("stepper: T must be >= dt");
  if (cfg.record_every < 1)
    throw std::invalid_argument("stepper: record_every must be >= 1");
}

// Shared per-run state: mode multipliers and work buffers, so the hot loop
// allocates nothing.
struct StepCore {
  const SpectralBasis& b;
  const PolyModel& m;
  const NoiseSpec& spec;
  Scheme scheme;
  double dt;
  Vector decay;
  Vector phi1;
  Vector resolvent;
  Vector sqrt_mudt;
  Vector xi, dwc, dw_vals, work_vals, fhat, ghat;

  StepCore(const StepperConfig& cfg, const SpectralBasis& basis,
           const PolyModel& model, const NoiseSpec& noise)
      : b(basis), m(model), spec(noise), scheme(cfg.scheme), dt(cfg.dt) {
    if (spec.mu.size() != b.N)
      throw std::invalid_argument("step: noise built for another basis");
    decay.resize(b.N);
    phi1.resize(b.N);
    resolvent.resize(b.N);
    sqrt_mudt.resize(b.N);
    for (int j = 0; j < b.N; ++j) {
      const double lam = b.lambda[j];
      decay[j] = std::exp(-lam * dt);
      phi1[j] = -std::expm1(-lam * dt) / lam;
      resolvent[j] = 1.0 / (1.0 + dt * lam);
      sqrt_mudt[j] = std::sqrt(spec.mu[j] * dt);
    }
    xi.resize(b.N);
    dwc.resize(b.N);
    dw_vals.resize(b.G);
    work_vals.resize(b.G);
    fhat.resize(b.N);
    ghat.resize(b.N);
  }

  // One step in place; false when the new state is not finite.
  bool advance(Vector& uhat, Vector& uvals, RngStream& rng) {
    rng.fill_normals(xi.data(), b.N);
    dwc.array() = sqrt_mudt.array() * xi.array();
    dw_vals.noalias() = b.modes * dwc;
    switch (scheme) {
      case Scheme::semi_implicit:
        for (int k = 0; k < b.G; ++k)
          work_vals[k] = dt * f_scalar(m, uvals[k]) +
                         sigma_scalar(m, uvals[k]) * dw_vals[k];
        fhat.noalias() = b.dx * (b.modes.transpose() * work_vals);
        uhat.array() = resolvent.array() * (uhat + fhat).array();
        break;
      case Scheme::exponential_euler:
        for (int k = 0; k < b.G; ++k) work_vals[k] = f_scalar(m, uvals[k]);
        fhat.noalias() = b.dx * (b.modes.transpose() * work_vals);
        for (int k = 0; k < b.G; ++k)
          work_vals[k] = sigma_scalar(m, uvals[k]) * dw_vals[k];
        ghat.noalias() = b.dx * (b.modes.transpose() * work_vals);
        uhat.array() = decay.array() * (uhat + ghat).array() +
                       phi1.array() * fhat.array();
        break;
      case Scheme::tamed_explicit:
        for (int k = 0; k < b.G; ++k) {
          const double fv = f_scalar(m, uvals[k]);
          work_vals[k] = dt * fv / (1.0 + dt * std::abs(fv)) +
                         sigma_scalar(m, uvals[k]) * dw_vals[k];
        }
        fhat.noalias() = b.dx * (b.modes.transpose() * work_vals);
        uhat.array() = decay.array() * uhat.array() + fhat.array();
        break;
    }
    uvals.noalias() = b.modes * uhat;
    return uvals.allFinite();
  }
};

}  // namespace

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::semi_implicit:
      return "semi_implicit";
    case Scheme::exponential_euler:
      return "exponential_euler";
    default:
      return "tamed_explicit";
  }
}

Field step(const StepperConfig& cfg, const SpectralBasis& b,
           const PolyModel& m, const NoiseSpec& spec, const Field& u,
           RngStream& rng) {
  validate_stepper(cfg);
  Field w = u;
  sync_coeffs(b, w);
  sync_values(b, w);
  StepCore core(cfg, b, m, spec);
  Vector uhat = w.coeffs;
  Vector uvals = w.values;
  core.advance(uhat, uvals, rng);
  Field out = field_from_coeffs(b, uhat);
  out.values = uvals;
  out.values_valid = true;
  return out;
}

PathResult run_path(const StepperConfig& cfg, const SpectralBasis& b,
                    const PolyModel& m, const NoiseSpec& spec,
                    const Field& u0, RngStream& rng) {
  validate_stepper(cfg);
  Field w = u0;
  sync_coeffs(b, w);
  sync_values(b, w);
  StepCore core(cfg, b, m, spec);

  const long long n = std::max(1LL, std::llround(cfg.T / cfg.dt));
  PathResult res;
  const std::size_t approx_records = std::size_t(n / cfg.record_every) + 2;
  res.times.reserve(approx_records);
  res.states.reserve(approx_records);
  res.sup_history.reserve(approx_records);

  Vector uhat = w.coeffs;
  Vector uvals = w.values;
  Vector uhat_prev = uhat;
  Vector uvals_prev = uvals;
  double cur_sup = sup_norm_values(b, uvals);
  bool frozen = false;

  if (cfg.stop_radius_n && cur_sup >= *cfg.stop_radius_n) {
    res.tau_n_hit = 0.0;
    frozen = true;
  }

  auto record = [&](long long k) {
    res.times.push_back(k * cfg.dt);
    Field f;
    f.coeffs = uhat;
    f.values = uvals;
    f.coeffs_valid = true;
    f.values_valid = true;
    f.basis_id = b.id;
    res.states.push_back(std::move(f));
    res.sup_history.push_back(cur_sup);
  };
  record(0);

  for (long long k = 1; k <= n; ++k) {
    if (!frozen && !res.blown_up) {
      uhat_prev = uhat;
      uvals_prev = uvals;
      if (!core.advance(uhat, uvals, rng)) {
        uhat = uhat_prev;
        uvals = uvals_prev;
        res.blown_up = true;
      } else {
        cur_sup = sup_norm_values(b, uvals);
        if (cfg.stop_radius_n && cur_sup >= *cfg.stop_radius_n) {
          res.tau_n_hit = k * cfg.dt;
          frozen = true;
        }
      }
    }
    if (k % cfg.record_every == 0 || k == n) record(k);
  }
  return res;
}

PicardResult picard_solve(const SpectralBasis& b, const PolyModel& m,
                          const NoiseSpec& spec, const Field& u0,
                          const std::vector<Field>& frozen_path, double T0,
                          double tol, int max_iter) {
  if (!m.cutoff_n)
    throw std::invalid_argument(
        "picard_solve: model must carry a cutoff (global Lipschitz)");
  if (frozen_path.empty())
    throw std::invalid_argument("picard_solve: empty noise path");
  if (T0 <= 0.0) throw std::invalid_argument("picard_solve: T0 must be > 0");
  if (tol <= 0.0) throw std::invalid_argument("picard_solve: tol must be > 0");
  if (max_iter < 1)
    throw std::invalid_argument("picard_solve: max_iter must be >= 1");

  const int steps = int(frozen_path.size());
  const double dt = T0 / steps;

  Field w = u0;
  sync_coeffs(b, w);

  // decay(l, j) = exp(-lambda_j l dt). The drift kernel for lag l is
  // phi1_j decay(l-1, j), the exact integral of the semigroup over one
  // step with left-point drift evaluation.
  Matrix decay(steps + 1, b.N);
  Vector phi1(b.N);
  for (int j = 0; j < b.N; ++j) {
    const double lam = b.lambda[j];
    phi1[j] = -std::expm1(-lam * dt) / lam;
    for (int l = 0; l <= steps; ++l) decay(l, j) = std::exp(-lam * l * dt);
  }

  // Grid values of the frozen increments; the diffusion term multiplies
  // them pointwise by sigma of the current iterate before transforming.
  Matrix dwv(steps, b.G);
  for (int i = 0; i < steps; ++i) {
    Field g = frozen_path[i];
    sync_values(b, g);
    dwv.row(i) = g.values.transpose();
  }

  Matrix base(steps + 1, b.N);
  for (int i = 0; i <= steps; ++i)
    base.row(i) = decay.row(i).cwiseProduct(w.coeffs.transpose());

  Matrix u(steps + 1, b.N);
  for (int i = 0; i <= steps; ++i)
    u.row(i) = decay.row(i).cwiseProduct(w.coeffs.transpose());

  PicardResult res;
  res.times.resize(steps + 1);
  for (int i = 0; i <= steps; ++i) res.times[i] = i * dt;

  Matrix fc(steps, b.N);
  Matrix sc(steps, b.N);
  Matrix u_next(steps + 1, b.N);
  Vector vals(b.G), fvals(b.G), svals(b.G), diff(b.G);

  for (int iter = 1; iter <= max_iter; ++iter) {
    for (int i = 0; i < steps; ++i) {
      vals.noalias() = b.modes * u.row(i).transpose();
      for (int k = 0; k < b.G; ++k) {
        fvals[k] = f_scalar(m, vals[k]);
        svals[k] = sigma_scalar(m, vals[k]) * dwv(i, k);
      }
      fc.row(i) = (b.dx * (b.modes.transpose() * fvals)).transpose();
      sc.row(i) = (b.dx * (b.modes.transpose() * svals)).transpose();
    }
    u_next.row(0) = base.row(0);
    for (int i = 1; i <= steps; ++i) {
      u_next.row(i) = base.row(i);
      for (int l = 1; l <= i; ++l) {
        u_next.row(i) += phi1.transpose().cwiseProduct(
            decay.row(l - 1).cwiseProduct(fc.row(i - l)));
        u_next.row(i) += decay.row(l).cwiseProduct(sc.row(i - l));
      }
    }
    double dist = 0.0;
    for (int i = 0; i <= steps; ++i) {
      diff.noalias() = b.modes * (u_next.row(i) - u.row(i)).transpose();
      dist = std::max(dist, sup_norm_values(b, diff));
    }
    res.distances.push_back(dist);
    u = u_next;
    res.iterations = iter;
    if (dist < tol) {
      res.converged = true;
      break;
    }
  }

  for (std::size_t i = 1; i < res.distances.size(); ++i)
    res.ratios.push_back(res.distances[i - 1] > 0.0
                             ? res.distances[i] / res.distances[i - 1]
                             : 0.0);

  res.trajectory.reserve(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    Field f = field_from_coeffs(b, u.row(i).transpose());
    sync_values(b, f);
    res.trajectory.push_back(std::move(f));
  }
  return res;
}

double contraction_budget(double lip, double q, double alpha, double gamma,
                          double xi_prime, double theta, double lambda_gap,
                          double horizon_cap) {
  if (q <= 2.0) throw std::invalid_argument("contraction_budget: q must be > 2");
  if (!(2.0 / q < 2.0 * gamma))
    throw std::invalid_argument("contraction_budget: needs 2/q < 2 gamma");
  if (!(2.0 * gamma < 1.0 - 2.0 * alpha))
    throw std::invalid_argument(
        "contraction_budget: needs 2 gamma < 1 - 2 alpha");
  if (!(2.0 * alpha > 1.0 / q))
    throw std::invalid_argument(
        "contraction_budget: needs 1 - 2 alpha < 1 - 1/q");
  if (!(q * gamma < xi_prime && xi_prime < 2.0 * q * gamma - 1.0))
    throw std::invalid_argument(
        "contraction_budget: needs q gamma < xi' < 2 q gamma - 1");
  if (lip < 0.0 || theta < 0.0 || lambda_gap <= 0.0 || horizon_cap <= 0.0)
    throw std::invalid_argument("contraction_budget: bad scale parameters");
  if (lip == 0.0) return horizon_cap;

  const double log2lam = std::log(2.0 * lambda_gap);
  const double log_fa =
      -(q / 2.0) * std::log(1.0 - 2.0 * alpha) +
      (q / 2.0) *
          (std::lgamma(1.0 - 2.0 * alpha) + (2.0 * alpha - 1.0) * log2lam);
  const double log_fag =
      (q / 2.0) * (std::lgamma(1.0 - 2.0 * (alpha + gamma)) +
                   (2.0 * (alpha + gamma) - 1.0) * log2lam);
  const double delta = (2.0 * q * gamma - 1.0 - xi_prime) / q;
  const double log_chain =
      q * std::log(4.0) - q * std::log(1.0 - std::pow(2.0, -delta));
  const double t1 = log_fa;
  const double t2 = log_fag + log_chain;
  const double tm = std::max(t1, t2);
  const double log_sum =
      tm + std::log(std::exp(t1 - tm) + std::exp(t2 - tm));
  const double arm1 = q * std::log(lip);
  const double arm2 = arm1 + q * std::log(10.0) +
                      (q / 2.0) * std::log(std::max(1.0, theta)) +
                      (q - 1.0) * std::log(2.0) + log_sum;
  const double log_c = std::max(arm1, arm2);

  const double exps[3] = {q, (1.0 - 2.0 * alpha) * q / 2.0, xi_prime};
  const double log_half = std::log(0.5);
  const int kmax = int(std::floor(std::log2(horizon_cap)));
  for (int k = kmax; k >= -1070; --k) {
    const double logt = k * std::log(2.0);
    double terms[3];
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      terms[i] = log_c + exps[i] * logt;
      m = std::max(m, terms[i]);
    }
    double s;
    if (m < -745.0) {
      s = m;  // the sum underflows to zero; certainly <= 1/2
    } else {
      s = m + std::log(std::exp(terms[0] - m) + std::exp(terms[1] - m) +
                       std::exp(terms[2] - m));
    }
    if (s <= log_half) return std::ldexp(1.0, k);
  }
  return 0.0;
}

}  // namespace spdelab
