#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace spdelab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Sine eigenbasis of the Dirichlet operator A = -a0 * d^2/dx^2 on (0, L).
//
// Eigenpairs are closed-form: lambda_j = a0 (j pi / L)^2 and
// e_j(x) = sqrt(2/L) sin(j pi x / L), j = 1..N. Grid collocation uses the
// G interior points x_k = k L / (G + 1); on that grid the sampled modes are
// exactly orthonormal under the weight dx = L / (G + 1), so the two
// transforms below invert each other to rounding error for band-limited
// data. G >= ceil(3N/2) keeps cubic nonlinearities alias-safe.
struct SpectralBasis {
  double L = 0.0;
  double a0 = 0.0;
  int N = 0;
  int G = 0;
  Vector lambda;     // eigenvalues, strictly increasing
  Vector grid;       // interior collocation points
  double supnorm_e;  // sup norm of every mode, sqrt(2/L)
  double dx;         // quadrature weight L / (G + 1)
  Matrix modes;      // G x N sample matrix, modes(k, j) = e_{j+1}(x_k)
  std::uint64_t id = 0;
};

// A function on (0, L) carried in both representations. Either side may be
// out of date; the *_valid flags say which one is authoritative. Operations
// synchronize lazily through the basis transforms.
struct Field {
  Vector coeffs;
  Vector values;
  bool coeffs_valid = false;
  bool values_valid = false;
  std::uint64_t basis_id = 0;
};

SpectralBasis build_basis(double L, double a0, int N, int G);

// Default alias-safe grid size for N modes.
int dealiased_grid_size(int N);

Field field_from_coeffs(const SpectralBasis& b, const Vector& coeffs);
Field field_from_values(const SpectralBasis& b, const Vector& values);
Field zero_field(const SpectralBasis& b);

// Forward/inverse collocation transforms.
Vector to_spectral(const SpectralBasis& b, const Vector& values);
Vector to_grid(const SpectralBasis& b, const Vector& coeffs);

// Ensure the requested representation is present (in place).
void sync_coeffs(const SpectralBasis& b, Field& u);
void sync_values(const SpectralBasis& b, Field& u);

// Heat semigroup S(t): coefficients scaled by exp(-lambda_j t). t >= 0.
Field apply_semigroup(const SpectralBasis& b, double t, const Field& u);

// Fractional power A^alpha: coefficients scaled by lambda_j^alpha. Negative
// alpha gives the smoothing inverse powers; additivity in alpha is exact.
Field apply_fractional(const SpectralBasis& b, double alpha, const Field& u);

// Discrete L^q norm (sum |u(x_k)|^q dx)^(1/q); endpoint values vanish, so
// midpoint and trapezoid weights agree. q >= 1.
double lq_norm(const SpectralBasis& b, const Field& u, double q);

// Discrete sup norm: grid max of |u|, sharpened by one quadratic fit around
// the argmax (the raw grid max undershoots by O(dx^2)).
double sup_norm(const SpectralBasis& b, const Field& u);

// Same estimate applied directly to a grid-value vector of length b.G.
double sup_norm_values(const SpectralBasis& b, const Vector& values);

// Exact operator norm of A^alpha S(t) on the N-mode space:
// max_j lambda_j^alpha exp(-lambda_j t). Requires t > 0, 0 <= alpha <= 1.
double semigroup_operator_bound(const SpectralBasis& b, double alpha,
                                double t);

}  // namespace spdelab
