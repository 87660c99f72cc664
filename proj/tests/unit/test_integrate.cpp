#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "spdelab/basis.hpp"
#include "spdelab/integrate.hpp"
#include "spdelab/model.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/rng.hpp"

using namespace spdelab;

namespace {

constexpr double kPi = std::numbers::pi;

Vector vec(std::initializer_list<double> xs) {
  Vector v(int(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// drift small enough to vanish numerically; the model class requires a
// strictly negative leading coefficient, so exact zero is not constructible
PolyModel null_model() { return make_model(vec({-1e-300}), Vector(), 1.0); }

StepperConfig cfg_of(Scheme s, double dt, double T, int stride = 1) {
  StepperConfig cfg;
  cfg.scheme = s;
  cfg.dt = dt;
  cfg.T = T;
  cfg.record_every = stride;
  return cfg;
}

}  // namespace

TEST_CASE("integrate: noiseless exponential step is the exact heat flow") {
  const SpectralBasis b = build_basis(1.0, 1.0, 8, dealiased_grid_size(8));
  const NoiseSpec spec = build_noise(NoiseFamily::power_law(1.0, 2.0), b);
  const PolyModel m = null_model();

  Vector c = Vector::Zero(b.N);
  c[0] = 1.0;
  c[2] = 0.5;
  Field u = field_from_coeffs(b, c);

  RngStream rng(1, 0);
  Field next = step(cfg_of(Scheme::exponential_euler, 0.01, 1.0), b, m, spec,
                    u, rng);
  sync_coeffs(b, next);
  Field flow = apply_semigroup(b, 0.01, u);
  sync_coeffs(b, flow);
  for (int j = 0; j < b.N; ++j)
    CHECK(next.coeffs[j] == doctest::Approx(flow.coeffs[j]).epsilon(1e-14));

  RngStream rng2(1, 0);
  Field tamed = step(cfg_of(Scheme::tamed_explicit, 0.01, 1.0), b, m, spec,
                     u, rng2);
  sync_coeffs(b, tamed);
  for (int j = 0; j < b.N; ++j)
    CHECK(tamed.coeffs[j] == doctest::Approx(flow.coeffs[j]).epsilon(1e-14));
}

TEST_CASE("integrate: semi-implicit step matches its defining update") {
  const SpectralBasis b = build_basis(1.0, 1.0, 4, dealiased_grid_size(4));
  const NoiseSpec spec = build_noise(NoiseFamily::power_law(1.0, 2.0), b);
  // linear drift stays band-limited, so the pseudo-spectral transform of
  // f(u) is exactly -0.5 uhat
  const PolyModel m = make_model(vec({-0.5}), Vector(), 1.0);
  const double dt = 0.02;

  Vector c(b.N);
  for (int j = 0; j < b.N; ++j) c[j] = 1.0 / (1 + j);
  Field u = field_from_coeffs(b, c);

  RngStream rng(3, 0);
  Field next = step(cfg_of(Scheme::semi_implicit, dt, 1.0), b, m, spec, u, rng);
  sync_coeffs(b, next);
  for (int j = 0; j < b.N; ++j) {
    const double expect = c[j] * (1.0 - 0.5 * dt) / (1.0 + dt * b.lambda[j]);
    CHECK(next.coeffs[j] == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("integrate: linear drift tracks the exact scalar flow") {
  const SpectralBasis b = build_basis(1.0, 1.0, 4, dealiased_grid_size(4));
  const NoiseSpec spec = build_noise(NoiseFamily::power_law(1.0, 2.0), b);
  const double a = 1.0, dt = 1e-3;
  const PolyModel m = make_model(vec({-a}), Vector(), 1.0);

  Vector c = Vector::Zero(b.N);
  c[0] = 1.0;
  Field u = field_from_coeffs(b, c);
  RngStream rng(4, 0);
  Field next = step(cfg_of(Scheme::exponential_euler, dt, 1.0), b, m, spec,
                    u, rng);
  sync_coeffs(b, next);
  const double exact = std::exp(-(b.lambda[0] + a) * dt);
  CHECK(std::abs(next.coeffs[0] - exact) < 2e-5);  // one-step defect O(dt^2)
}

TEST_CASE("integrate: constant diffusion reproduces the OU mode variance") {
  const SpectralBasis b = build_basis(1.0, 1.0, 4, dealiased_grid_size(4));
  const NoiseSpec spec = build_noise(NoiseFamily::power_law(1.0, 2.0), b);
  const PolyModel m = make_model(vec({-1e-300}), vec({0.5}), 1.0);
  const double dt = 5e-4, T = 0.25;
  const int paths = 10000;

  const StepperConfig cfg = cfg_of(Scheme::exponential_euler, dt, T, 500);
  double sum = 0.0, sumsq = 0.0;
  for (int p = 0; p < paths; ++p) {
    RngStream rng(314159, std::uint64_t(p));
    PathResult res = run_path(cfg, b, m, spec, zero_field(b), rng);
    Field last = res.states.back();
    sync_coeffs(b, last);
    sum += last.coeffs[0];
    sumsq += last.coeffs[0] * last.coeffs[0];
  }
  const double mean = sum / paths;
  const double var = sumsq / paths - mean * mean;
  const double lam = b.lambda[0];
  const double target =
      spec.mu[0] * 0.25 * (1.0 - std::exp(-2.0 * lam * T)) / (2.0 * lam);
  const double se = target * std::sqrt(2.0 / paths);
  CHECK(std::abs(var - target) < 3.0 * se);
  CHECK(std::abs(mean) < 3.0 * std::sqrt(target / paths));
}

TEST_CASE("integrate: strong order one on the deterministic problem") {
  const SpectralBasis b = build_basis(1.0, 1.0, 16, dealiased_grid_size(16));
  const NoiseSpec spec = build_noise(NoiseFamily::power_law(1.0, 2.0), b);
  const PolyModel m = make_model(vec({1.0, 0.0, -1.0}), Vector(), 1.0);
  const double T = 0.5;

  Vector c = Vector::Zero(b.N);
  c[0] = 0.1;
  c[1] = 0.05;
  const Field u0 = field_from_coeffs(b, c);

  for (Scheme s : {Scheme::semi_implicit, Scheme::exponential_euler,
                   Scheme::tamed_explicit}) {
    auto final_values = [&](double dt) {
      RngStream rng(9, 0);
      PathResult res = run_path(cfg_of(s, dt, T, 1 << 20), b, m, spec, u0, rng);
      Field last = res.states.back();
      sync_values(b, last);
      return Vector(last.values);
    };
    const Vector ref = final_values(T / 2048);
    double prev_err = -1.0;
    for (int k : {32, 64, 128}) {
      const double err = (final_values(T / k) - ref).cwiseAbs().maxCoeff();
      if (prev_err > 0.0) {
        const double order = std::log2(prev_err / err);
        CHECK(order >= 0.9);
      }
      prev_err = err;
    }
  }
}

TEST_CASE("integrate: recording grid and stop radius semantics") {
  const SpectralBasis b = build_basis(1.0, 1.0, 8, dealiased_grid_size(8));
  const NoiseSpec spec = build_noise(NoiseFamily::power_law(0.01, 2.0), b);
  const PolyModel m = make_model(vec({1.0, 0.0, -1.0}), vec({0.0, 0.1}), 1.0);

  Vector c = Vector::Zero(b.N);
  c[0] = 2.0;
  const Field u0 = field_from_coeffs(b, c);

  StepperConfig cfg = cfg_of(Scheme::semi_implicit, 0.1, 1.0, 3);
  RngStream rng(11, 0);
  PathResult res = run_path(cfg, b, m, spec, u0, rng);
  REQUIRE(res.times.size() == 5);
  CHECK(res.times[0] == 0.0);
  CHECK(res.times[1] == doctest::Approx(0.3));
  CHECK(res.times[4] == doctest::Approx(1.0));
  CHECK(res.sup_history.size() == res.times.size());
  CHECK_FALSE(res.tau_n_hit.has_value());
  CHECK_FALSE(res.blown_up);
  // recorded sup values match recomputation from the states
  for (std::size_t i = 0; i < res.states.size(); ++i)
    CHECK(res.sup_history[i] ==
          doctest::Approx(sup_norm(b, res.states[i])).epsilon(1e-10));

  // ||2 e_1|| = 2 sqrt(2) > 1.5: stopped at time zero, trajectory frozen
  cfg.stop_radius_n = 1.5;
  RngStream rng2(11, 0);
  PathResult stopped = run_path(cfg, b, m, spec, u0, rng2);
  REQUIRE(stopped.tau_n_hit.has_value());
  CHECK(*stopped.tau_n_hit == 0.0);
  for (std::size_t i = 0; i < stopped.states.size(); ++i) {
    Field fi = stopped.states[i];
    sync_coeffs(b, fi);
    CHECK(fi.coeffs[0] == doctest::Approx(2.0).epsilon(1e-15));
  }
}

TEST_CASE("integrate: numeric overflow freezes the last finite state") {
  const SpectralBasis b = build_basis(1.0, 1.0, 4, dealiased_grid_size(4));
  const NoiseSpec spec = build_noise(NoiseFamily::power_law(1.0, 2.0), b);
  // sigma = 1e150 u doubles the magnitude order every step until overflow
  const PolyModel m = make_model(vec({-1e-300}), vec({0.0, 1e150}), 1.0);

  Vector c = Vector::Zero(b.N);
  c[0] = 1.0;
  RngStream rng(17, 0);
  PathResult res = run_path(cfg_of(Scheme::exponential_euler, 0.01, 0.5), b,
                            m, spec, field_from_coeffs(b, c), rng);
  CHECK(res.blown_up);
  for (const Field& f : res.states) {
    Field fi = f;
    sync_values(b, fi);
    CHECK(fi.values.allFinite());
  }
  for (double s : res.sup_history) CHECK(std::isfinite(s));

  // the tamed scheme bounds the drift but not the diffusion; a tame drift
  // explosion instead stays finite
  const PolyModel wild = make_model(vec({1e6, 0.0, -1e-300}), Vector(), 1.0);
  RngStream rng2(17, 0);
  PathResult tamed = run_path(cfg_of(Scheme::tamed_explicit, 1.0, 50.0), b,
                              wild, spec, field_from_coeffs(b, c), rng2);
  CHECK_FALSE(tamed.blown_up);
}

TEST_CASE("integrate: picard iteration on a trivial map converges at once") {
  const SpectralBasis b = build_basis(1.0, 1.0, 8, dealiased_grid_size(8));
  const NoiseSpec spec = build_noise(NoiseFamily::power_law(1.0, 2.0), b);
  const PolyModel m = with_cutoff(null_model(), 1.0);

  Vector c = Vector::Zero(b.N);
  c[0] = 0.4;
  const Field u0 = field_from_coeffs(b, c);

  std::vector<Field> frozen;
  RngStream rng(23, 0);
  for (int i = 0; i < 16; ++i)
    frozen.push_back(sample_increment(spec, b, 0.05 / 16, rng));

  PicardResult res = picard_solve(b, m, spec, u0, frozen, 0.05, 1e-10, 20);
  CHECK(res.converged);
  CHECK(res.iterations == 1);
  REQUIRE(res.trajectory.size() == 17);
  for (int i = 0; i <= 16; ++i) {
    Field expect = apply_semigroup(b, res.times[i], u0);
    sync_coeffs(b, expect);
    Field got = res.trajectory[i];
    sync_coeffs(b, got);
    CHECK(std::abs(got.coeffs[0] - expect.coeffs[0]) < 1e-12);
  }
}

TEST_CASE("integrate: picard fixed point is the integrator orbit") {
  const SpectralBasis b = build_basis(1.0, 1.0, 16, dealiased_grid_size(16));
  const NoiseSpec spec = build_noise(NoiseFamily::power_law(0.1, 2.0), b);
  const PolyModel m =
      with_cutoff(make_model(vec({1.0, 0.0, -1.0}), vec({0.0, 0.25}), 1.0), 2.0);

  Vector c = Vector::Zero(b.N);
  c[0] = 0.5;
  const Field u0 = field_from_coeffs(b, c);
  const double T0 = 0.05;
  const int steps = 32;

  std::vector<Field> frozen;
  RngStream rng(31, 0);
  for (int i = 0; i < steps; ++i)
    frozen.push_back(sample_increment(spec, b, T0 / steps, rng));

  PicardResult res = picard_solve(b, m, spec, u0, frozen, T0, 1e-12, 50);
  REQUIRE(res.converged);
  for (double rho : res.ratios) CHECK(rho < 1.0);

  RngStream replay(31, 0);
  PathResult orbit = run_path(
      cfg_of(Scheme::exponential_euler, T0 / steps, T0, 1), b, m, spec, u0,
      replay);
  REQUIRE(orbit.states.size() == res.trajectory.size());
  double gap = 0.0;
  for (std::size_t i = 0; i < orbit.states.size(); ++i) {
    Field a = res.trajectory[i];
    Field o = orbit.states[i];
    sync_values(b, a);
    sync_values(b, o);
    gap = std::max(gap, (a.values - o.values).cwiseAbs().maxCoeff());
  }
  CHECK(gap < 1e-9);

  // horizon far beyond the contraction regime: the iteration must report
  // failure instead of converging
  std::vector<Field> long_frozen;
  RngStream rng2(31, 0);
  for (int i = 0; i < 64; ++i)
    long_frozen.push_back(sample_increment(spec, b, 50.0 / 64, rng2));
  PicardResult diverged =
      picard_solve(b, m, spec, u0, long_frozen, 50.0, 1e-12, 5);
  CHECK_FALSE(diverged.converged);

  PolyModel raw = make_model(vec({1.0, 0.0, -1.0}), vec({0.0, 0.25}), 1.0);
  CHECK_THROWS(picard_solve(b, raw, spec, u0, frozen, T0, 1e-12, 50));
}

TEST_CASE("integrate: contraction budget") {
  const double q = 8.0, alpha = 0.2, gamma = 0.2, xi_prime = 2.0;
  const double theta = 1.0, lam = kPi * kPi;

  const double t0 = contraction_budget(11.0, q, alpha, gamma, xi_prime,
                                       theta, lam);
  CHECK(t0 > 0.0);
  CHECK(t0 <= 64.0);
  // dyadic output
  CHECK(std::ldexp(1.0, int(std::lround(std::log2(t0)))) ==
        doctest::Approx(t0).epsilon(1e-15));

  CHECK(contraction_budget(0.0, q, alpha, gamma, xi_prime, theta, lam) ==
        64.0);

  const double half = contraction_budget(22.0, q, alpha, gamma, xi_prime,
                                         theta, lam);
  CHECK(half <= t0 / 2.0 * (1.0 + 1e-12));

  // inadmissible exponent combinations
  CHECK_THROWS(contraction_budget(1.0, q, alpha, 0.1, xi_prime, theta, lam));
  CHECK_THROWS(contraction_budget(1.0, q, alpha, gamma, 1.5, theta, lam));
  CHECK_THROWS(contraction_budget(1.0, q, alpha, gamma, 2.3, theta, lam));
  CHECK_THROWS(contraction_budget(1.0, q, 0.31, gamma, xi_prime, theta, lam));
  CHECK_THROWS(contraction_budget(1.0, 6.0, alpha, gamma, xi_prime, theta,
                                  lam));
}
