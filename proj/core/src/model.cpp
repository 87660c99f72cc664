#include "spdelab/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polynomial.hpp"

namespace spdelab {

namespace {

double f_raw(const PolyModel& m, double x) {
  const double a = std::abs(x);
  double s = 0.0;
  for (int j = m.beta; j >= 1; --j) s = s * a + m.f_coeffs[j - 1];
  return x * s;
}

double f_raw_prime(const PolyModel& m, double x) {
  const double a = std::abs(x);
  double s = 0.0;
  for (int j = m.beta; j >= 1; --j) s = s * a + double(j) * m.f_coeffs[j - 1];
  return s;
}

double sigma_raw(const PolyModel& m, double x) {
  double s = 0.0;
  for (int k = int(m.sigma_coeffs.size()) - 1; k >= 0; --k)
    s = s * x + m.sigma_coeffs[k];
  return s;
}

double sigma_raw_prime(const PolyModel& m, double x) {
  double s = 0.0;
  for (int k = int(m.sigma_coeffs.size()) - 1; k >= 1; --k)
    s = s * x + double(k) * m.sigma_coeffs[k];
  return s;
}

double phi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double phi_prime(double x) {
  return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0;
}

// d/ds of cutoff_chi(n, s); zero outside the open transition band (n, 2n).
double chi_prime(double n, double s) {
  const double x = (2.0 * n - s) / n;
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double a = phi(x);
  const double b = phi(1.0 - x);
  const double hp =
      (phi_prime(x) * b + a * phi_prime(1.0 - x)) / ((a + b) * (a + b));
  return -hp / n;
}

int sigma_degree(const PolyModel& m) {
  poly::Coeffs s(m.sigma_coeffs.data(),
                 m.sigma_coeffs.data() + m.sigma_coeffs.size());
  if (s.empty()) return 0;
  const poly::Coeffs t = poly::trim(s);
  return t.size() == 1 && t[0] == 0.0 ? 0 : int(t.size()) - 1;
}

poly::Coeffs scaled(poly::Coeffs c, double k) {
  for (double& x : c) x *= k;
  return c;
}

// f(u)u restricted to a half-line, as a polynomial in w = |u| (the same on
// both half-lines since f is odd).
poly::Coeffs drift_power_poly(const PolyModel& m) {
  poly::Coeffs fu(std::size_t(m.beta) + 2, 0.0);
  for (int j = 1; j <= m.beta; ++j) fu[j + 1] = m.f_coeffs[j - 1];
  return fu;
}

// sigma(sign * w) as a polynomial in w >= 0.
poly::Coeffs sigma_halfline_poly(const PolyModel& m, double sign) {
  poly::Coeffs s(std::max<std::size_t>(m.sigma_coeffs.size(), 1), 0.0);
  double p = 1.0;
  for (int k = 0; k < int(m.sigma_coeffs.size()); ++k) {
    s[k] = m.sigma_coeffs[k] * p;
    p *= sign;
  }
  return s;
}

// Audits |f| + |sigma| <= c3 (|u|^r + 1): dense grid on [-Rg, Rg] joined
// with the exact limit of the ratio at infinity.
Witness growth_audit(const PolyModel& m, double& c3_out) {
  double rg = 10.0;
  for (double sign : {1.0, -1.0}) {
    const poly::Coeffs base = poly::trim(
        poly::add(drift_power_poly(m), sigma_halfline_poly(m, sign)));
    rg = std::max(rg, 10.0 * poly::cauchy_bound(base));
  }
  const int pts = 100001;
  double best = 0.0;
  double best_u = 0.0;
  for (int i = 0; i < pts; ++i) {
    const double u = -rg + 2.0 * rg * i / (pts - 1);
    const double ratio = (std::abs(f_raw(m, u)) + std::abs(sigma_raw(m, u))) /
                         (std::pow(std::abs(u), m.r) + 1.0);
    if (ratio > best) {
      best = ratio;
      best_u = u;
    }
  }
  double asym = 0.0;
  if (double(m.beta) == m.r) asym += std::abs(m.f_coeffs[m.beta - 1]);
  const int ds = sigma_degree(m);
  if (ds > 0 && double(ds) == m.r) asym += std::abs(m.sigma_coeffs[ds]);
  c3_out = std::max(best, asym);
  return Witness{"c3", best_u, 0.0, best};
}

}  // namespace

const char* to_string(CertStatus s) {
  switch (s) {
    case CertStatus::verified:
      return "verified";
    case CertStatus::falsified:
      return "falsified";
    default:
      return "grid-verified-only";
  }
}

PolyModel make_model(const Vector& f_coeffs, const Vector& sigma_coeffs,
                     double gamma) {
  if (f_coeffs.size() < 1)
    throw std::invalid_argument("make_model: drift needs at least b_1");
  if (f_coeffs[f_coeffs.size() - 1] >= 0.0)
    throw std::invalid_argument("make_model: leading drift coefficient must "
                                "be negative");
  if (gamma < 1.0)
    throw std::invalid_argument("make_model: gamma must be >= 1");
  PolyModel m;
  m.f_coeffs = f_coeffs;
  m.sigma_coeffs = sigma_coeffs;
  m.beta = int(f_coeffs.size());
  m.gamma = gamma;
  m.r = std::max(double(m.beta), gamma);
  if (sigma_degree(m) > gamma)
    throw std::invalid_argument("make_model: sigma degree exceeds gamma");
  return m;
}

PolyModel with_cutoff(const PolyModel& m, double n) {
  if (n <= 0.0) throw std::invalid_argument("with_cutoff: n must be > 0");
  PolyModel out = m;
  out.cutoff_n = n;
  return out;
}

double cutoff_chi(double radius_n, double s) {
  if (radius_n <= 0.0)
    throw std::invalid_argument("cutoff_chi: radius must be > 0");
  const double x = (2.0 * radius_n - s) / radius_n;
  if (x >= 1.0) return 1.0;
  if (x <= 0.0) return 0.0;
  const double a = phi(x);
  return a / (a + phi(1.0 - x));
}

double f_scalar(const PolyModel& m, double x) {
  if (m.cutoff_n) {
    const double a = std::abs(x);
    if (a >= 2.0 * *m.cutoff_n) return 0.0;
    return cutoff_chi(*m.cutoff_n, a) * f_raw(m, x);
  }
  return f_raw(m, x);
}

double sigma_scalar(const PolyModel& m, double x) {
  if (m.cutoff_n) {
    const double a = std::abs(x);
    if (a >= 2.0 * *m.cutoff_n) return 0.0;
    return cutoff_chi(*m.cutoff_n, a) * sigma_raw(m, x);
  }
  return sigma_raw(m, x);
}

Field eval_f(const PolyModel& m, const SpectralBasis& b, const Field& u) {
  Field w = u;
  sync_values(b, w);
  Vector vals(b.G);
  for (int k = 0; k < b.G; ++k) vals[k] = f_scalar(m, w.values[k]);
  Field out = field_from_values(b, vals);
  sync_coeffs(b, out);
  return out;
}

Field eval_sigma(const PolyModel& m, const SpectralBasis& b, const Field& u) {
  Field w = u;
  sync_values(b, w);
  Vector vals(b.G);
  for (int k = 0; k < b.G; ++k) vals[k] = sigma_scalar(m, w.values[k]);
  Field out = field_from_values(b, vals);
  sync_coeffs(b, out);
  return out;
}

HypothesisCertificate certify_H2(const PolyModel& m, double q, double theta) {
  if (q <= 6.0) throw std::invalid_argument("certify_H2: requires q > 6");
  if (theta < 0.0) throw std::invalid_argument("certify_H2: negative trace");
  HypothesisCertificate cert;
  cert.q = q;
  cert.r = m.r;
  cert.theta = theta;
  const double K = (q * m.r * m.r - 1.0) * theta;

  // On each half-line u = sign * w, w >= 0, the left side of the condition
  // is the polynomial base(w) = f(u)u + K sigma(u)^2; adding c1 u^2 only
  // shifts the w^2 coefficient.
  std::array<poly::Coeffs, 2> bases;
  const std::array<double, 2> signs{1.0, -1.0};
  for (int i = 0; i < 2; ++i) {
    const poly::Coeffs sig = sigma_halfline_poly(m, signs[i]);
    bases[i] = poly::trim(
        poly::add(drift_power_poly(m), scaled(poly::multiply(sig, sig), K)));
  }

  double cap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2; ++i) {
    const poly::Coeffs& base = bases[i];
    const int d = poly::degree(base);
    if (d > 2) {
      const double lead = poly::leading(base);
      if (lead > 0.0) {
        cert.status = CertStatus::falsified;
        cert.witnesses.push_back(Witness{"h2_leading", signs[i], 0.0, lead});
        return cert;
      }
      const double rstar = poly::cauchy_bound(base);
      cap = std::min(cap, 0.5 * (-lead) * std::pow(rstar, d - 2));
    } else {
      const double a2 = base.size() > 2 ? base[2] : 0.0;
      if (a2 >= 0.0) {
        cert.status = CertStatus::falsified;
        cert.witnesses.push_back(Witness{"h2_leading", signs[i], 0.0, a2});
        return cert;
      }
      cap = std::min(cap, -a2);
    }
  }
  cert.c1 = 0.5 * cap;

  double c2 = -std::numeric_limits<double>::infinity();
  Witness w2{"c2", 0.0, 0.0, 0.0};
  for (int i = 0; i < 2; ++i) {
    poly::Coeffs p = bases[i];
    if (p.size() < 3) p.resize(3, 0.0);
    p[2] += cert.c1;
    const double reach =
        std::max(poly::cauchy_bound(p), poly::cauchy_bound(poly::derivative(p)));
    const auto [xm, vm] = poly::max_on_interval(p, 0.0, reach);
    if (vm > c2) {
      c2 = vm;
      w2.u = signs[i] * xm;
      w2.value = vm;
    }
  }
  cert.c2 = std::max(c2, 1e-12);
  cert.witnesses.push_back(w2);
  cert.witnesses.push_back(growth_audit(m, cert.c3));
  cert.status = CertStatus::verified;
  return cert;
}

HypothesisCertificate certify_H3(const PolyModel& m, double q, double theta,
                                 double R) {
  if (q <= 6.0) throw std::invalid_argument("certify_H3: requires q > 6");
  if (theta < 0.0) throw std::invalid_argument("certify_H3: negative trace");
  if (R <= 0.0) throw std::invalid_argument("certify_H3: radius must be > 0");
  HypothesisCertificate cert;
  cert.q = q;
  cert.r = m.r;
  cert.theta = theta;
  const double K = (q * m.r * m.r - 1.0) * theta;

  // Ray u = -v: the quotient reduces to
  // [f(w)w + K sigma_odd(w)^2] / w^2, a rational function whose numerator
  // degree decides boundedness exactly.
  {
    poly::Coeffs sig_odd(std::max<std::size_t>(m.sigma_coeffs.size(), 1), 0.0);
    for (int k = 1; k < int(m.sigma_coeffs.size()); k += 2)
      sig_odd[k] = m.sigma_coeffs[k];
    const poly::Coeffs num = poly::trim(poly::add(
        drift_power_poly(m), scaled(poly::multiply(sig_odd, sig_odd), K)));
    if (poly::degree(num) > 2 && poly::leading(num) > 0.0) {
      cert.status = CertStatus::falsified;
      cert.witnesses.push_back(
          Witness{"h3_ray_opposite", 1.0, -1.0, poly::leading(num)});
      return cert;
    }
  }
  // Ray v = 0, both directions of u.
  for (double sign : {1.0, -1.0}) {
    poly::Coeffs dsig = sigma_halfline_poly(m, sign);
    dsig[0] -= m.sigma_coeffs.size() > 0 ? m.sigma_coeffs[0] : 0.0;
    const poly::Coeffs num = poly::trim(poly::add(
        drift_power_poly(m), scaled(poly::multiply(dsig, dsig), K)));
    if (poly::degree(num) > 2 && poly::leading(num) > 0.0) {
      cert.status = CertStatus::falsified;
      cert.witnesses.push_back(
          Witness{"h3_ray_axis", sign, 0.0, poly::leading(num)});
      return cert;
    }
  }

  const int pts = 801;
  double c4 = -std::numeric_limits<double>::infinity();
  double c5 = -std::numeric_limits<double>::infinity();
  Witness w4{"c4", 0.0, 0.0, 0.0};
  Witness w5{"c5", 0.0, 0.0, 0.0};
  for (int i = 0; i < pts; ++i) {
    const double u = -R + 2.0 * R * i / (pts - 1);
    const double fu = f_raw(m, u);
    const double su = sigma_raw(m, u);
    for (int j = 0; j < pts; ++j) {
      if (j == i) continue;
      const double v = -R + 2.0 * R * j / (pts - 1);
      const double du = u - v;
      const double dfx = fu - f_raw(m, v);
      const double dsx = su - sigma_raw(m, v);
      const double quot4 = (dfx * du + K * dsx * dsx) / (du * du);
      if (quot4 > c4) {
        c4 = quot4;
        w4 = Witness{"c4", u, v, quot4};
      }
      const double denom5 =
          (1.0 + std::pow(std::abs(u), m.r - 1.0) +
           std::pow(std::abs(v), m.r - 1.0)) *
          std::abs(du);
      const double quot5 = (std::abs(dfx) + std::abs(dsx)) / denom5;
      if (quot5 > c5) {
        c5 = quot5;
        w5 = Witness{"c5", u, v, quot5};
      }
    }
  }
  cert.c4 = std::max(c4, 1e-12);
  cert.c5 = std::max(c5, 1e-12);
  cert.witnesses.push_back(w4);
  cert.witnesses.push_back(w5);
  growth_audit(m, cert.c3);
  cert.status = CertStatus::grid_verified_only;
  return cert;
}

HypothesisCertificate merge_certificates(const HypothesisCertificate& h2,
                                         const HypothesisCertificate& h3) {
  if (h2.q != h3.q || h2.r != h3.r || h2.theta != h3.theta)
    throw std::invalid_argument(
        "merge_certificates: certificates disagree on (q, r, theta)");
  HypothesisCertificate out;
  out.q = h2.q;
  out.r = h2.r;
  out.theta = h2.theta;
  out.c1 = h2.c1;
  out.c2 = h2.c2;
  out.c3 = std::max(h2.c3, h3.c3);
  out.c4 = h3.c4;
  out.c5 = h3.c5;
  out.witnesses = h2.witnesses;
  out.witnesses.insert(out.witnesses.end(), h3.witnesses.begin(),
                       h3.witnesses.end());
  if (h2.status == CertStatus::falsified ||
      h3.status == CertStatus::falsified)
    out.status = CertStatus::falsified;
  else
    out.status = CertStatus::grid_verified_only;
  return out;
}

double lipschitz_bound(const PolyModel& m) {
  if (!m.cutoff_n) {
    if (m.beta == 1 && sigma_degree(m) <= 1) {
      const double sf = std::abs(m.f_coeffs[0]);
      const double ss =
          m.sigma_coeffs.size() > 1 ? std::abs(m.sigma_coeffs[1]) : 0.0;
      return std::max(sf, ss);
    }
    throw std::invalid_argument(
        "lipschitz_bound: needs a cutoff for superlinear coefficients");
  }
  const double n = *m.cutoff_n;
  const int pts = 40001;
  double best = 0.0;
  for (int i = 0; i < pts; ++i) {
    const double u = -2.0 * n + 4.0 * n * i / (pts - 1);
    const double a = std::abs(u);
    const double chi = cutoff_chi(n, a);
    const double chip = chi_prime(n, a);
    const double sgn = u >= 0.0 ? 1.0 : -1.0;
    const double fp = chip * sgn * f_raw(m, u) + chi * f_raw_prime(m, u);
    const double sp =
        chip * sgn * sigma_raw(m, u) + chi * sigma_raw_prime(m, u);
    best = std::max({best, std::abs(fp), std::abs(sp)});
  }
  return best;
}

}  // namespace spdelab
