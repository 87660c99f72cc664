#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spdelab/basis.hpp"

using namespace spdelab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("basis: closed-form eigenvalues and mode sup norms") {
  const SpectralBasis b = build_basis(1.0, 1.0, 4, 8);
  CHECK(b.lambda[0] == doctest::Approx(kPi * kPi).epsilon(1e-14));
  CHECK(b.lambda[1] == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-14));
  CHECK(b.lambda[2] == doctest::Approx(9.0 * kPi * kPi).epsilon(1e-14));
  CHECK(b.lambda[3] == doctest::Approx(16.0 * kPi * kPi).epsilon(1e-14));
  CHECK(b.supnorm_e == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(b.dx == doctest::Approx(1.0 / 9.0).epsilon(1e-15));

  const SpectralBasis b2 = build_basis(2.0, 0.5, 1, 4);
  CHECK(b2.lambda[0] == doctest::Approx(kPi * kPi / 8.0).epsilon(1e-14));
  CHECK(b2.supnorm_e == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("basis: construction rejects bad parameters") {
  CHECK_THROWS(build_basis(0.0, 1.0, 4, 8));
  CHECK_THROWS(build_basis(1.0, -1.0, 4, 8));
  CHECK_THROWS(build_basis(1.0, 1.0, 0, 8));
  // alias-unsafe grid: below the 3/2 rule for N = 4
  CHECK_THROWS(build_basis(1.0, 1.0, 4, 5));
  CHECK_NOTHROW(build_basis(1.0, 1.0, 4, dealiased_grid_size(4)));
  CHECK(dealiased_grid_size(4) == 6);
  CHECK(dealiased_grid_size(64) == 96);
}

TEST_CASE("basis: sampled modes are discretely orthonormal") {
  const SpectralBasis b = build_basis(1.0, 1.0, 16, dealiased_grid_size(16));
  const Matrix gram = b.dx * (b.modes.transpose() * b.modes);
  for (int i = 0; i < b.N; ++i)
    for (int j = 0; j < b.N; ++j)
      CHECK(gram(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("basis: transforms invert each other on band-limited data") {
  const SpectralBasis b = build_basis(1.0, 1.0, 16, dealiased_grid_size(16));

  Vector c = Vector::Zero(b.N);
  c[1] = 1.0;
  const Vector vals = to_grid(b, c);
  const Vector back = to_spectral(b, vals);
  for (int j = 0; j < b.N; ++j)
    CHECK(back[j] == doctest::Approx(c[j]).epsilon(1e-13));

  Vector mix = Vector::Zero(b.N);
  mix[0] = 3.0;
  mix[2] = -2.0;
  const Vector mixed = to_spectral(b, to_grid(b, mix));
  CHECK(mixed[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(mixed[1]) < 1e-12);
  CHECK(mixed[2] == doctest::Approx(-2.0).epsilon(1e-12));

  Vector rnd(b.N);
  for (int j = 0; j < b.N; ++j) rnd[j] = std::sin(1.0 + j) * (j % 3 - 1);
  const Vector round = to_spectral(b, to_grid(b, rnd));
  for (int j = 0; j < b.N; ++j)
    CHECK(std::abs(round[j] - rnd[j]) < 1e-12);

  CHECK(to_spectral(b, Vector::Zero(b.G)).isZero(0.0));
  CHECK_THROWS(to_spectral(b, Vector::Zero(b.G + 1)));
  CHECK_THROWS(to_grid(b, Vector::Zero(b.N + 2)));
}

TEST_CASE("basis: field synchronization is lazy and validated") {
  const SpectralBasis b = build_basis(1.0, 1.0, 8, dealiased_grid_size(8));
  Field u = zero_field(b);
  CHECK(u.coeffs_valid);
  sync_values(b, u);
  CHECK(u.values.isZero(0.0));

  Field bad;
  CHECK_THROWS(sync_coeffs(b, bad));

  const SpectralBasis other = build_basis(2.0, 1.0, 8, dealiased_grid_size(8));
  Field w = field_from_coeffs(other, Vector::Ones(other.N));
  CHECK_THROWS(sync_values(b, w));
}

TEST_CASE("basis: semigroup acts diagonally and obeys the flow law") {
  const SpectralBasis b = build_basis(1.0, 1.0, 8, dealiased_grid_size(8));
  Vector c = Vector::Zero(b.N);
  c[0] = 1.0;
  const Field e1 = field_from_coeffs(b, c);

  Field same = apply_semigroup(b, 0.0, e1);
  sync_coeffs(b, same);
  CHECK(same.coeffs[0] == doctest::Approx(1.0).epsilon(1e-15));

  Field decayed = apply_semigroup(b, 0.1, e1);
  sync_coeffs(b, decayed);
  CHECK(decayed.coeffs[0] ==
        doctest::Approx(std::exp(-kPi * kPi * 0.1)).epsilon(1e-14));
  CHECK(decayed.coeffs[0] == doctest::Approx(0.37272).epsilon(1e-4));

  Vector full(b.N);
  for (int j = 0; j < b.N; ++j) full[j] = 1.0 / (1.0 + j);
  const Field u = field_from_coeffs(b, full);
  Field two_steps = apply_semigroup(b, 0.03, apply_semigroup(b, 0.07, u));
  Field one_step = apply_semigroup(b, 0.1, u);
  sync_coeffs(b, two_steps);
  sync_coeffs(b, one_step);
  for (int j = 0; j < b.N; ++j)
    CHECK(two_steps.coeffs[j] ==
          doctest::Approx(one_step.coeffs[j]).epsilon(1e-12));

  CHECK_THROWS(apply_semigroup(b, -0.1, u));
}

TEST_CASE("basis: fractional powers scale modes and add exponents") {
  const SpectralBasis b = build_basis(1.0, 1.0, 8, dealiased_grid_size(8));
  Vector c = Vector::Zero(b.N);
  c[0] = 1.0;
  const Field e1 = field_from_coeffs(b, c);

  Field id = apply_fractional(b, 0.0, e1);
  sync_coeffs(b, id);
  CHECK(id.coeffs[0] == 1.0);

  Field half = apply_fractional(b, 0.5, e1);
  sync_coeffs(b, half);
  CHECK(half.coeffs[0] == doctest::Approx(kPi).epsilon(1e-13));

  Vector full(b.N);
  for (int j = 0; j < b.N; ++j) full[j] = std::cos(double(j));
  const Field u = field_from_coeffs(b, full);
  Field twice = apply_fractional(b, 0.5, apply_fractional(b, 0.5, u));
  Field once = apply_fractional(b, 1.0, u);
  sync_coeffs(b, twice);
  sync_coeffs(b, once);
  for (int j = 0; j < b.N; ++j)
    CHECK(twice.coeffs[j] == doctest::Approx(once.coeffs[j]).epsilon(1e-12));

  // commutes with the semigroup exactly (both are diagonal)
  Field ab = apply_fractional(b, 0.5, apply_semigroup(b, 0.2, u));
  Field ba = apply_semigroup(b, 0.2, apply_fractional(b, 0.5, u));
  sync_coeffs(b, ab);
  sync_coeffs(b, ba);
  for (int j = 0; j < b.N; ++j)
    CHECK(ab.coeffs[j] == doctest::Approx(ba.coeffs[j]).epsilon(1e-13));
}

TEST_CASE("basis: discrete Lq norms reproduce analytic mode integrals") {
  const SpectralBasis b = build_basis(1.0, 1.0, 16, dealiased_grid_size(16));
  Vector c = Vector::Zero(b.N);
  c[0] = 1.0;
  const Field e1 = field_from_coeffs(b, c);

  CHECK(lq_norm(b, e1, 2.0) == doctest::Approx(1.0).epsilon(1e-13));
  // int_0^1 (sqrt(2) sin(pi x))^4 dx = 4 * 3/8 = 3/2, and the interior-point
  // quadrature is exact for this trigonometric polynomial
  CHECK(lq_norm(b, e1, 4.0) ==
        doctest::Approx(std::pow(1.5, 0.25)).epsilon(1e-13));
  CHECK(lq_norm(b, zero_field(b), 2.0) == 0.0);
  CHECK_THROWS(lq_norm(b, e1, 0.5));
}

TEST_CASE("basis: refined sup norm against dense-search oracles") {
  const SpectralBasis b = build_basis(1.0, 1.0, 64, dealiased_grid_size(64));

  CHECK(sup_norm(b, zero_field(b)) == 0.0);

  Vector c = Vector::Zero(b.N);
  c[0] = 1.0;
  const Field e1 = field_from_coeffs(b, c);
  CHECK(sup_norm(b, e1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-4));

  // max of sqrt(2)(sin pi x + sin 2 pi x): stationary point at
  // cos(pi x) = (sqrt(33) - 1)/8, value sqrt(2) sqrt(1 - c^2) (1 + 2c)
  c[1] = 1.0;
  Field e12 = field_from_coeffs(b, c);
  const double cc = (std::sqrt(33.0) - 1.0) / 8.0;
  const double oracle = std::sqrt(2.0) * std::sqrt(1.0 - cc * cc) * (1 + 2 * cc);
  CHECK(oracle == doctest::Approx(2.4892599532).epsilon(1e-9));
  const double est = sup_norm(b, e12);
  CHECK(est == doctest::Approx(oracle).epsilon(1e-3));

  // the quadratic refinement must not fall below the plain grid max
  sync_values(b, e12);
  CHECK(est >= e12.values.cwiseAbs().maxCoeff());
  CHECK(sup_norm_values(b, e12.values) == est);
}

TEST_CASE("basis: smoothing bound matches the scalar calculus maximum") {
  const SpectralBasis b = build_basis(1.0, 1.0, 64, dealiased_grid_size(64));

  // monotone tail: maximizer below lambda_1
  const double t = 0.2;
  CHECK(semigroup_operator_bound(b, 1.0, t) ==
        doctest::Approx(b.lambda[0] * std::exp(-b.lambda[0] * t))
            .epsilon(1e-14));

  // alpha = 0 degenerates to the semigroup norm itself
  CHECK(semigroup_operator_bound(b, 0.0, 0.3) ==
        doctest::Approx(std::exp(-b.lambda[0] * 0.3)).epsilon(1e-14));

  // t^alpha max_j lambda_j^alpha e^{-lambda_j t} <= (alpha/e)^alpha, the
  // supremum of lambda^alpha e^{-lambda t} over the whole half-line
  for (double alpha : {0.25, 0.5, 1.0}) {
    const double cap = std::pow(alpha, alpha) * std::exp(-alpha);
    for (double tt = 1e-5; tt < 2.0; tt *= 3.0) {
      const double scaled =
          std::pow(tt, alpha) * semigroup_operator_bound(b, alpha, tt);
      CHECK(scaled <= cap + 1e-9);
      // sharp when the continuum maximizer alpha/t falls inside the
      // resolved spectrum
      const double lam_star = alpha / tt;
      if (lam_star >= b.lambda[0] && lam_star <= b.lambda[b.N - 1])
        CHECK(scaled >= 0.9 * cap);
    }
  }

  CHECK_THROWS(semigroup_operator_bound(b, 1.0, 0.0));
  CHECK_THROWS(semigroup_operator_bound(b, 1.5, 0.1));
}
