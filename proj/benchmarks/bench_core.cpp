#include <benchmark/benchmark.h>

#include "spdelab/basis.hpp"
#include "spdelab/integrate.hpp"
#include "spdelab/model.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/rng.hpp"

namespace {

using namespace spdelab;

SpectralBasis bench_basis(int n) {
  return build_basis(1.0, 1.0, n, dealiased_grid_size(n));
}

PolyModel bench_model() {
  Vector f(3);
  f << 1.0, 0.0, -1.0;
  Vector s(2);
  s << 0.0, 0.25;
  return make_model(f, s, 1.0);
}

void BM_transform_roundtrip(benchmark::State& state) {
  const SpectralBasis b = bench_basis(int(state.range(0)));
  Vector c(b.N);
  RngStream rng(1, 0);
  rng.fill_normals(c.data(), b.N);
  for (auto _ : state) {
    Vector back = to_spectral(b, to_grid(b, c));
    benchmark::DoNotOptimize(back);
  }
}
BENCHMARK(BM_transform_roundtrip)->Arg(32)->Arg(64)->Arg(256);

void BM_sup_norm(benchmark::State& state) {
  const SpectralBasis b = bench_basis(int(state.range(0)));
  Vector c(b.N);
  RngStream rng(2, 0);
  rng.fill_normals(c.data(), b.N);
  const Field u = field_from_coeffs(b, c);
  for (auto _ : state) benchmark::DoNotOptimize(sup_norm(b, u));
}
BENCHMARK(BM_sup_norm)->Arg(64)->Arg(256);

void BM_sample_increment(benchmark::State& state) {
  const SpectralBasis b = bench_basis(64);
  const NoiseSpec noise = build_noise(NoiseFamily::power_law(0.1, 2.0), b);
  RngStream rng(3, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_increment(noise, b, 1e-3, rng));
}
BENCHMARK(BM_sample_increment);

void BM_path_step(benchmark::State& state) {
  const SpectralBasis b = bench_basis(int(state.range(0)));
  const NoiseSpec noise = build_noise(NoiseFamily::power_law(0.1, 2.0), b);
  const PolyModel m = bench_model();
  Vector c = Vector::Zero(b.N);
  c[0] = 0.5;
  const Field u0 = field_from_coeffs(b, c);

  StepperConfig cfg;
  cfg.scheme = Scheme::semi_implicit;
  cfg.dt = 1e-3;
  cfg.T = 0.256;
  cfg.record_every = 1 << 20;

  const long long steps_per_path = 256;
  RngStream rng(4, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_path(cfg, b, m, noise, u0, rng));
  }
  state.SetItemsProcessed(state.iterations() * steps_per_path);
}
BENCHMARK(BM_path_step)->Arg(32)->Arg(64);

void BM_certify(benchmark::State& state) {
  const PolyModel m = bench_model();
  for (auto _ : state) benchmark::DoNotOptimize(certify_H2(m, 8.0, 0.3259));
}
BENCHMARK(BM_certify);

}  // namespace

BENCHMARK_MAIN();
