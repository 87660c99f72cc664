#include "polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace spdelab::poly {

double eval(const Coeffs& p, double x) {
  double v = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
  return v;
}

Coeffs derivative(const Coeffs& p) {
  if (p.size() <= 1) return {0.0};
  Coeffs d(p.size() - 1);
  for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = double(k) * p[k];
  return d;
}

Coeffs add(const Coeffs& a, const Coeffs& b) {
  Coeffs out(std::max(a.size(), b.size()), 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) out[k] += a[k];
  for (std::size_t k = 0; k < b.size(); ++k) out[k] += b[k];
  return out;
}

Coeffs multiply(const Coeffs& a, const Coeffs& b) {
  if (a.empty() || b.empty()) return {0.0};
  Coeffs out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Coeffs trim(const Coeffs& p, double tol) {
  Coeffs q = p;
  while (q.size() > 1 && std::abs(q.back()) <= tol) q.pop_back();
  return q;
}

int degree(const Coeffs& p) { return int(trim(p).size()) - 1; }

double leading(const Coeffs& p) { return trim(p).back(); }

double cauchy_bound(const Coeffs& p) {
  const Coeffs q = trim(p);
  if (q.size() <= 1) return 1.0;
  const double lead = std::abs(q.back());
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < q.size(); ++k)
    m = std::max(m, std::abs(q[k]) / lead);
  return 1.0 + m;
}

namespace {

double bisect(const Coeffs& p, double a, double b) {
  double fa = eval(p, a);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) break;
    const double fm = eval(p, mid);
    if (fm == 0.0) return mid;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
    if (b - a < 1e-12 * std::max(1.0, std::abs(a) + std::abs(b))) break;
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<double> roots(const Coeffs& p, double lo, double hi, int grid) {
  std::vector<double> out;
  if (!(hi > lo)) return out;
  const double h = (hi - lo) / grid;
  double xa = lo;
  double fa = eval(p, xa);
  for (int i = 1; i <= grid; ++i) {
    const double xb = lo + i * h;
    const double fb = eval(p, xb);
    if (fa == 0.0)
      out.push_back(xa);
    else if ((fa < 0.0) != (fb < 0.0))
      out.push_back(bisect(p, xa, xb));
    xa = xb;
    fa = fb;
  }
  if (fa == 0.0) out.push_back(xa);
  return out;
}

std::pair<double, double> max_on_interval(const Coeffs& p, double lo,
                                          double hi) {
  double best_x = lo;
  double best = eval(p, lo);
  const double at_hi = eval(p, hi);
  if (at_hi > best) {
    best = at_hi;
    best_x = hi;
  }
  for (double x : roots(derivative(p), lo, hi)) {
    const double v = eval(p, x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  return {best_x, best};
}

}  // namespace spdelab::poly
