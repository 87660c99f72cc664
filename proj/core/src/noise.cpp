#include "spdelab/noise.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace spdelab {

namespace {

Vector base_mu(const NoiseFamily& family, const SpectralBasis& b) {
  Vector mu(b.N);
  if (family.type == NoiseFamily::Type::power) {
    if (family.c < 0.0)
      throw std::invalid_argument("noise family: power-law c must be >= 0");
    for (int j = 0; j < b.N; ++j)
      mu[j] = family.c * std::pow(double(j + 1), -family.s);
  } else {
    if (int(family.values.size()) < b.N)
      throw std::invalid_argument("noise family: list shorter than mode count");
    for (int j = 0; j < b.N; ++j) {
      if (family.values[j] < 0.0)
        throw std::invalid_argument("noise family: negative variance");
      mu[j] = family.values[j];
    }
  }
  return mu;
}

double mode_lambda(const SpectralBasis& b, int j1) {
  const double pi = 3.14159265358979323846;
  const double k = j1 * pi / b.L;
  return b.a0 * k * k;
}

// Tail of sum_{j > start} c * j^{-s} * w, with optional spectral damping
// lambda_j^{-1/m} applied per term. Direct summation over a long window,
// then a midpoint-rule integral for the remainder. The remainder assumes
// lambda_j > 1, which holds once j exceeds L / (pi sqrt(a0)); the direct
// window is far past that for any configuration this library accepts.
double power_tail(const SpectralBasis& b, double c, double s, double w,
                  int start, std::optional<int> m) {
  const double s_eff = m ? s + 2.0 / *m : s;
  if (s_eff <= 1.0) return std::numeric_limits<double>::infinity();
  const int K = 65536;
  double direct = 0.0;
  for (int j = start + K; j > start; --j) {
    double term = c * std::pow(double(j), -s);
    if (m) {
      const double lam = mode_lambda(b, j);
      if (lam > 1.0) term *= std::pow(lam, -1.0 / *m);
    }
    direct += term;
  }
  double c_eff = c;
  if (m) {
    const double pi = 3.14159265358979323846;
    c_eff *= std::pow(b.a0 * pi * pi / (b.L * b.L), -1.0 / *m);
  }
  const double M = double(start + K);
  const double rest = c_eff * std::pow(M + 0.5, 1.0 - s_eff) / (s_eff - 1.0);
  return w * (direct + rest);
}

void fill_traces(NoiseSpec& spec, const SpectralBasis& b) {
  const double w = b.supnorm_e * b.supnorm_e;
  spec.theta = 0.0;
  spec.theta_delta = 0.0;
  for (int j = 0; j < b.N; ++j) {
    spec.theta += spec.mu[j] * w;
    spec.theta_delta +=
        std::pow(b.lambda[j], spec.delta) * spec.mu[j] * w;
  }
  if (spec.family.type == NoiseFamily::Type::power)
    spec.tail_trace = power_tail(b, spec.family.c, spec.family.s, w, b.N,
                                 spec.truncation_m);
  else
    spec.tail_trace = 0.0;
}

Vector damped_mu(const Vector& mu, const SpectralBasis& b, int m) {
  Vector out = mu;
  for (int j = 0; j < b.N; ++j)
    if (b.lambda[j] > 1.0) out[j] *= std::pow(b.lambda[j], -1.0 / m);
  return out;
}

}  // namespace

NoiseFamily NoiseFamily::power_law(double c, double s) {
  NoiseFamily f;
  f.type = Type::power;
  f.c = c;
  f.s = s;
  return f;
}

NoiseFamily NoiseFamily::from_list(std::vector<double> values) {
  NoiseFamily f;
  f.type = Type::list;
  f.values = std::move(values);
  return f;
}

NoiseSpec build_noise(const NoiseFamily& family, const SpectralBasis& b) {
  NoiseSpec spec;
  spec.family = family;
  spec.mu = base_mu(family, b);
  spec.delta = 0.0;
  spec.truncation_m = std::nullopt;
  fill_traces(spec, b);
  return spec;
}

NoiseSpec truncate(const NoiseSpec& spec, const SpectralBasis& b, int m) {
  if (m < 1) throw std::invalid_argument("truncate: m must be >= 1");
  NoiseSpec out;
  out.family = spec.family;
  out.mu = damped_mu(base_mu(spec.family, b), b, m);
  out.delta = 1.0 / m;
  out.truncation_m = m;
  fill_traces(out, b);
  return out;
}

double theta_mn(const NoiseSpec& spec, const SpectralBasis& b, int m, int n) {
  if (m < 1 || n < 1) throw std::invalid_argument("theta_mn: orders must be >= 1");
  const Vector base = base_mu(spec.family, b);
  const Vector mum = damped_mu(base, b, m);
  const Vector mun = damped_mu(base, b, n);
  const double w = b.supnorm_e * b.supnorm_e;
  double s = 0.0;
  for (int j = 0; j < b.N; ++j) s += std::abs(mum[j] - mun[j]) * w;
  return s;
}

Field sample_increment(const NoiseSpec& spec, const SpectralBasis& b,
                       double dt, RngStream& rng) {
  if (dt <= 0.0) throw std::invalid_argument("sample_increment: dt must be > 0");
  if (spec.mu.size() != b.N)
    throw std::invalid_argument("sample_increment: spec built for another basis");
  Vector xi(b.N);
  rng.fill_normals(xi.data(), b.N);
  Vector coeffs(b.N);
  for (int j = 0; j < b.N; ++j) coeffs[j] = std::sqrt(spec.mu[j] * dt) * xi[j];
  Field dw = field_from_coeffs(b, coeffs);
  sync_values(b, dw);
  return dw;
}

}  // namespace spdelab
