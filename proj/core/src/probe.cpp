#include "spdelab/probe.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace spdelab {

namespace {

struct NormTrack {
  std::vector<double> c0q;
  std::vector<std::vector<double>> lrho;
  std::vector<double> h1q;
  double max_sup = 0.0;
  bool tau_hit = false;
  bool blown = false;
};

NormTrack extract_track(const PathResult& pr, const SpectralBasis& b,
                        double q, const std::vector<double>& rho_list) {
  NormTrack t;
  const std::size_t nrec = pr.states.size();
  t.c0q.reserve(nrec);
  t.h1q.reserve(nrec);
  t.lrho.resize(rho_list.size());
  for (auto& v : t.lrho) v.reserve(nrec);
  for (std::size_t i = 0; i < nrec; ++i) {
    const double sup = pr.sup_history[i];
    t.max_sup = std::max(t.max_sup, sup);
    t.c0q.push_back(std::pow(sup, q));
    for (std::size_t r = 0; r < rho_list.size(); ++r)
      t.lrho[r].push_back(
          std::pow(lq_norm(b, pr.states[i], rho_list[r]), rho_list[r]));
    const Field h1 = apply_fractional(b, 0.5, pr.states[i]);
    t.h1q.push_back(std::pow(lq_norm(b, h1, q), q));
  }
  t.tau_hit = pr.tau_n_hit.has_value();
  t.blown = pr.blown_up;
  return t;
}

struct Welford {
  long long count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }
  double stderr_of_mean() const {
    if (count < 2) return 0.0;
    return std::sqrt(m2 / (count - 1)) / std::sqrt(double(count));
  }
};

MomentSeries reduce_tracks(const std::vector<NormTrack>& tracks,
                           const std::vector<double>& times, double q,
                           const std::vector<double>& rho_list) {
  const std::size_t nt = times.size();
  std::vector<Welford> wc(nt), wh(nt);
  std::vector<std::vector<Welford>> wr(rho_list.size(),
                                       std::vector<Welford>(nt));
  for (const NormTrack& t : tracks) {
    for (std::size_t i = 0; i < nt; ++i) {
      wc[i].add(t.c0q[i]);
      wh[i].add(t.h1q[i]);
      for (std::size_t r = 0; r < rho_list.size(); ++r)
        wr[r][i].add(t.lrho[r][i]);
    }
  }
  MomentSeries s;
  s.times = times;
  s.M = int(tracks.size());
  s.q = q;
  s.m_c0_q.resize(nt);
  s.se_c0_q.resize(nt);
  s.m_h1_q.resize(nt);
  s.se_h1_q.resize(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    s.m_c0_q[i] = wc[i].mean;
    s.se_c0_q[i] = wc[i].stderr_of_mean();
    s.m_h1_q[i] = wh[i].mean;
    s.se_h1_q[i] = wh[i].stderr_of_mean();
  }
  s.m_lrho_rho.resize(rho_list.size());
  for (std::size_t r = 0; r < rho_list.size(); ++r) {
    RhoSeries& rs = s.m_lrho_rho[r];
    rs.rho = rho_list[r];
    rs.values.resize(nt);
    rs.stderrs.resize(nt);
    for (std::size_t i = 0; i < nt; ++i) {
      rs.values[i] = wr[r][i].mean;
      rs.stderrs[i] = wr[r][i].stderr_of_mean();
    }
  }
  return s;
}

int resolve_threads(int threads) {
  if (threads <= 0) {
    if (const char* env = std::getenv("SPDELAB_THREADS")) {
      const int parsed = std::atoi(env);
      if (parsed > 0) threads = parsed;
    }
  }
  if (threads <= 0) threads = int(std::thread::hardware_concurrency());
  return std::clamp(threads, 1, 256);
}

const RhoSeries& find_rho(const MomentSeries& series, double rho) {
  for (const RhoSeries& rs : series.m_lrho_rho)
    if (std::abs(rs.rho - rho) < 1e-9) return rs;
  throw std::invalid_argument("moment series does not cover requested rho");
}

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

MomentSeries estimate_moments(const std::vector<PathResult>& ensemble,
                              const SpectralBasis& b, double q,
                              const std::vector<double>& rho_list) {
  if (ensemble.empty())
    throw std::invalid_argument("estimate_moments: empty ensemble");
  const std::vector<double>& times = ensemble.front().times;
  for (const PathResult& pr : ensemble) {
    if (pr.times.size() != times.size())
      throw std::invalid_argument("estimate_moments: mismatched record grids");
    for (std::size_t i = 0; i < times.size(); ++i)
      if (std::abs(pr.times[i] - times[i]) > 1e-12)
        throw std::invalid_argument(
            "estimate_moments: mismatched record times");
  }
  std::vector<NormTrack> tracks;
  tracks.reserve(ensemble.size());
  for (const PathResult& pr : ensemble)
    tracks.push_back(extract_track(pr, b, q, rho_list));
  return reduce_tracks(tracks, times, q, rho_list);
}

EnsembleResult run_ensemble(const StepperConfig& cfg, const SpectralBasis& b,
                            const PolyModel& m, const NoiseSpec& spec,
                            const Field& u0, int paths,
                            std::uint64_t master_seed, double q,
                            const std::vector<double>& rho_list,
                            int threads) {
  if (paths < 1) throw std::invalid_argument("run_ensemble: paths must be >= 1");
  const int nw = std::min(resolve_threads(threads), paths);

  std::vector<NormTrack> tracks(paths);
  std::vector<std::vector<double>> times_of(paths);
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;

  auto worker = [&]() {
    while (true) {
      const int p = next.fetch_add(1);
      if (p >= paths || failed.load()) break;
      try {
        RngStream rng(master_seed, std::uint64_t(p));
        const PathResult pr = run_path(cfg, b, m, spec, u0, rng);
        tracks[p] = extract_track(pr, b, q, rho_list);
        times_of[p] = pr.times;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed.store(true);
        if (error_message.empty()) error_message = e.what();
      }
    }
  };

  if (nw == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error("run_ensemble: " + error_message);

  EnsembleResult res;
  res.series = reduce_tracks(tracks, times_of[0], q, rho_list);
  res.per_path_max_sup.reserve(paths);
  for (const NormTrack& t : tracks) {
    res.tau_hit_count += t.tau_hit ? 1 : 0;
    res.blown_up_count += t.blown ? 1 : 0;
    res.per_path_max_sup.push_back(t.max_sup);
  }
  return res;
}

BoundReport check_energy_inequality(const MomentSeries& series,
                                    const HypothesisCertificate& cert,
                                    double rho, double u0_moment,
                                    double domain_size) {
  if (cert.status != CertStatus::verified)
    throw std::invalid_argument(
        "check_energy_inequality: requires a verified certificate");
  if (rho < 2.0)
    throw std::invalid_argument("check_energy_inequality: rho must be >= 2");
  if (domain_size <= 0.0)
    throw std::invalid_argument(
        "check_energy_inequality: domain size must be > 0");
  const RhoSeries& rs = find_rho(series, rho);

  const double ct1 = rho * cert.c1 / 2.0;
  const double ct2 = 2.0 *
                     std::pow(2.0 * (rho - 2.0) / (rho * cert.c1),
                              (rho - 2.0) / rho) *
                     std::pow(cert.c2, rho / 2.0) * domain_size;

  BoundReport rep;
  rep.bound_name = "energy_rho_" + format_double(rho);
  rep.times = series.times;
  rep.lhs = rs.values;
  rep.rhs.resize(series.times.size());
  rep.pass = true;
  rep.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    rep.rhs[i] = u0_moment * std::exp(-ct1 * series.times[i]) + ct2 / ct1;
    rep.margin = std::min(rep.margin, rep.rhs[i] - rep.lhs[i]);
    if (!(rep.lhs[i] <= rep.rhs[i] + 2.0 * rs.stderrs[i])) rep.pass = false;
  }
  rep.qualifier = "decay rate " + format_double(ct1) + ", offset " +
                  format_double(ct2 / ct1) + ", tolerance 2 stderr";
  return rep;
}

BoundReport check_dissipativity(const MomentSeries& series,
                                const HypothesisCertificate& cert, double q,
                                double r, double u0_qr_moment) {
  if (cert.status != CertStatus::verified)
    throw std::invalid_argument(
        "check_dissipativity: requires a verified certificate");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < series.times.size(); ++i)
    if (series.times[i] >= 1.0) idx.push_back(i);
  if (idx.empty())
    throw std::invalid_argument(
        "check_dissipativity: series does not reach t >= 1");

  const double cbar1 = q * r * cert.c1 / 2.0;
  BoundReport rep;
  rep.bound_name = "dissipativity";
  double chat = 0.0;
  std::vector<double> env(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double t = series.times[idx[k]];
    env[k] = u0_qr_moment * std::exp(-cbar1 * (t - 1.0)) + 1.0;
    chat = std::max(chat, series.m_c0_q[idx[k]] / env[k]);
  }

  const std::size_t mid = (idx.size() + 1) / 2;
  double chat_first = 0.0;
  double chat_second = 0.0;
  double se_ratio = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double ratio = series.m_c0_q[idx[k]] / env[k];
    if (k < mid)
      chat_first = std::max(chat_first, ratio);
    else
      chat_second = std::max(chat_second, ratio);
    se_ratio = std::max(se_ratio, 2.0 * series.se_c0_q[idx[k]] / env[k]);
  }

  rep.times.reserve(idx.size());
  rep.lhs.reserve(idx.size());
  rep.rhs.reserve(idx.size());
  rep.margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    rep.times.push_back(series.times[idx[k]]);
    rep.lhs.push_back(series.m_c0_q[idx[k]]);
    rep.rhs.push_back(chat * env[k]);
    rep.margin = std::min(rep.margin, rep.rhs.back() - rep.lhs.back());
  }
  const bool stable =
      idx.size() < 2 || chat_second <= chat_first + se_ratio;
  rep.pass = std::isfinite(chat) && stable;
  rep.qualifier = "envelope " + format_double(chat) + ", rate " +
                  format_double(cbar1) + ", halves " +
                  format_double(chat_first) + " / " +
                  format_double(chat_second);
  return rep;
}

double holder_seminorm(const std::vector<double>& path, double eta,
                       double T) {
  if (path.size() < 2)
    throw std::invalid_argument("holder_seminorm: fewer than 2 samples");
  if (T <= 0.0) throw std::invalid_argument("holder_seminorm: T must be > 0");
  if (eta <= 0.0 || eta > 1.0)
    throw std::invalid_argument("holder_seminorm: eta must lie in (0, 1]");
  const std::size_t segments = path.size() - 1;
  if ((segments & (segments - 1)) != 0)
    throw std::invalid_argument(
        "holder_seminorm: sample count must be dyadic (2^n + 1)");
  int depth = 0;
  while ((std::size_t(1) << depth) < segments) ++depth;

  double best = 0.0;
  for (int level = 0; level <= depth; ++level) {
    const std::size_t stride = segments >> level;
    const double denom = std::pow(T * std::ldexp(1.0, -level), eta);
    for (std::size_t k = 0; (k + 1) * stride <= segments; ++k) {
      const double inc =
          std::abs(path[(k + 1) * stride] - path[k * stride]);
      best = std::max(best, inc / denom);
    }
  }
  return best;
}

double kolmogorov_bound(double C, double q, double xi, double eta, double T) {
  if (q <= 1.0 || xi <= 1.0)
    throw std::invalid_argument("kolmogorov_bound: needs q > 1 and xi > 1");
  if (C < 0.0 || T < 0.0)
    throw std::invalid_argument("kolmogorov_bound: C and T must be >= 0");
  const double dmax = (xi - 1.0) / q;
  if (eta <= 0.0 || eta >= dmax)
    throw std::invalid_argument(
        "kolmogorov_bound: eta must lie in (0, (xi-1)/q)");
  const double delta = dmax - eta;
  return std::pow(4.0, q) * C * std::pow(T, xi) /
         std::pow(1.0 - std::pow(2.0, -delta), q);
}

BoundReport check_kolmogorov(const std::vector<std::vector<double>>& paths,
                             double C, double q, double xi, double eta,
                             double T, double xi_prime) {
  if (paths.empty())
    throw std::invalid_argument("check_kolmogorov: empty ensemble");
  if (xi_prime <= 0.0) xi_prime = (3.0 * xi - 1.0) / 2.0;
  if (!(xi < xi_prime && xi_prime < 2.0 * xi - 1.0))
    throw std::invalid_argument(
        "check_kolmogorov: xi' must lie in (xi, 2 xi - 1)");

  Welford wk, wsup, w0;
  for (const auto& p : paths) {
    wk.add(std::pow(holder_seminorm(p, eta, T), q));
    double sup = 0.0;
    for (double x : p) sup = std::max(sup, std::abs(x));
    wsup.add(std::pow(sup, q));
    w0.add(std::pow(std::abs(p.front()), q));
  }

  const double B = kolmogorov_bound(C, q, xi, eta, T);
  const double dprime = (2.0 * xi - 1.0 - xi_prime) / q;
  const double cq =
      std::pow(4.0, q) / std::pow(1.0 - std::pow(2.0, -dprime), q);
  const double sup_rhs =
      std::pow(2.0, q - 1.0) * (C * cq * std::pow(T, xi_prime) + w0.mean);

  BoundReport rep;
  rep.bound_name = "kolmogorov";
  rep.lhs = {wk.mean, wsup.mean};
  rep.rhs = {B, sup_rhs};
  rep.margin = std::min(B - wk.mean, sup_rhs - wsup.mean);
  rep.pass = wk.mean <= B && wsup.mean <= sup_rhs;
  rep.qualifier = "entries: seminorm moment vs B, sup moment vs corollary; "
                  "seminorm stderr " +
                  format_double(wk.stderr_of_mean());
  return rep;
}

BoundReport regularity_probe(const MomentSeries& series, double kappa_max) {
  if (series.m_h1_q.empty())
    throw std::invalid_argument("regularity_probe: series lacks H1 moments");
  if (kappa_max <= 0.0)
    throw std::invalid_argument("regularity_probe: kappa_max must be > 0");
  const double hi = std::min(kappa_max, series.q - 1.0);
  if (hi <= 0.0)
    throw std::invalid_argument("regularity_probe: admissible range empty");

  const int grid = 200;
  double best_chat = std::numeric_limits<double>::infinity();
  double best_kappa = hi / 2.0;
  for (int i = 1; i < grid; ++i) {
    const double kappa = hi * i / grid;
    double chat = 0.0;
    for (std::size_t k = 0; k < series.times.size(); ++k)
      chat = std::max(chat, series.m_h1_q[k] /
                                (std::pow(series.times[k], kappa) + 1.0));
    if (chat < best_chat) {
      best_chat = chat;
      best_kappa = kappa;
    }
  }

  BoundReport rep;
  rep.bound_name = "regularity";
  rep.times = series.times;
  rep.lhs = series.m_h1_q;
  rep.rhs.resize(series.times.size());
  rep.margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    rep.rhs[k] = best_chat * (std::pow(series.times[k], best_kappa) + 1.0);
    rep.margin = std::min(rep.margin, rep.rhs[k] - rep.lhs[k]);
  }
  rep.pass = std::isfinite(best_chat);
  rep.qualifier = "envelope " + format_double(best_chat) + ", exponent " +
                  format_double(best_kappa);
  return rep;
}

}  // namespace spdelab
