#pragma once

#include <utility>
#include <vector>

// Internal univariate polynomial helpers. Coefficients are stored in
// ascending order: p[k] multiplies x^k. Not part of the installed API.

namespace spdelab::poly {

using Coeffs = std::vector<double>;

double eval(const Coeffs& p, double x);

Coeffs derivative(const Coeffs& p);

Coeffs add(const Coeffs& a, const Coeffs& b);

Coeffs multiply(const Coeffs& a, const Coeffs& b);

/// Drops trailing coefficients with |c| <= tol so degree(p) is honest.
Coeffs trim(const Coeffs& p, double tol = 0.0);

int degree(const Coeffs& p);

double leading(const Coeffs& p);

/// Cauchy bound: every real root lies in [-R, R] with
/// R = 1 + max_i |p_i / p_d|. Returns 1 for constants.
double cauchy_bound(const Coeffs& p);

/// Real roots of p inside [lo, hi], located by sign-change bracketing on a
/// uniform grid and refined by bisection. Tangent roots without a sign
/// change are invisible to this scheme; callers that care pair it with a
/// critical-point scan of p'.
std::vector<double> roots(const Coeffs& p, double lo, double hi,
                          int grid = 4096);

/// Maximum of p over [lo, hi]: evaluates at both endpoints and at every
/// bracketed root of p'. Returns {argmax, max}.
std::pair<double, double> max_on_interval(const Coeffs& p, double lo,
                                          double hi);

}  // namespace spdelab::poly
