#include "spdelab/cli.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spdelab/basis.hpp"
#include "spdelab/integrate.hpp"
#include "spdelab/model.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/probe.hpp"

namespace spdelab {

namespace {

using nlohmann::json;

constexpr double kAuditRadius = 10.0;

struct Runtime {
  SpectralBasis basis;
  NoiseSpec noise;
  PolyModel model;
  Field u0;
  std::vector<double> rho_list;
  std::uint64_t seed = 0;
  int paths = 1;
  std::string out_dir;
};

std::uint64_t resolve_seed(const ExperimentConfig& cfg,
                           const CliOptions& opt) {
  if (opt.seed) return *opt.seed;
  if (const char* env = std::getenv("SPDELAB_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return v;
    throw ConfigError("SPDELAB_SEED is not an unsigned integer");
  }
  return cfg.ensemble.master_seed;
}

Runtime assemble(const ExperimentConfig& cfg, const CliOptions& opt) {
  Runtime rt;
  const int G = cfg.basis.G == 0 ? dealiased_grid_size(cfg.basis.N)
                                 : cfg.basis.G;
  rt.basis = build_basis(cfg.basis.L, cfg.basis.a0, cfg.basis.N, G);
  rt.noise = build_noise(cfg.noise.family, rt.basis);
  if (cfg.noise.truncation_m)
    rt.noise = truncate(rt.noise, rt.basis, *cfg.noise.truncation_m);

  Vector fc(cfg.model.f_coeffs.size());
  for (std::size_t i = 0; i < cfg.model.f_coeffs.size(); ++i)
    fc[i] = cfg.model.f_coeffs[i];
  Vector sc(cfg.model.sigma_coeffs.size());
  for (std::size_t i = 0; i < cfg.model.sigma_coeffs.size(); ++i)
    sc[i] = cfg.model.sigma_coeffs[i];
  rt.model = make_model(fc, sc, cfg.model.gamma);
  if (cfg.model.cutoff_n) rt.model = with_cutoff(rt.model, *cfg.model.cutoff_n);

  if (int(cfg.u0_coeffs.size()) > rt.basis.N)
    throw ConfigError("config: u0_coeffs longer than the basis");
  Vector u0c = Vector::Zero(rt.basis.N);
  for (std::size_t i = 0; i < cfg.u0_coeffs.size(); ++i)
    u0c[i] = cfg.u0_coeffs[i];
  rt.u0 = field_from_coeffs(rt.basis, u0c);
  sync_values(rt.basis, rt.u0);

  rt.rho_list = cfg.model.rho_list;
  if (rt.rho_list.empty())
    rt.rho_list = {cfg.model.q, cfg.model.q * rt.model.r};

  rt.seed = resolve_seed(cfg, opt);
  rt.paths = opt.paths ? *opt.paths : cfg.ensemble.paths;
  if (rt.paths < 1) throw ConfigError("paths must be >= 1");
  rt.out_dir = opt.out_dir ? *opt.out_dir : cfg.output_dir;
  return rt;
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& content) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json witness_json(const Witness& w) {
  return json{{"constant", w.constant},
              {"u", w.u},
              {"v", w.v},
              {"value", w.value}};
}

json certificate_json(const HypothesisCertificate& merged,
                      const HypothesisCertificate& h2,
                      const HypothesisCertificate& h3) {
  json witnesses = json::array();
  for (const Witness& w : merged.witnesses) witnesses.push_back(witness_json(w));
  return json{{"q", merged.q},
              {"r", merged.r},
              {"theta", merged.theta},
              {"c1", merged.c1},
              {"c2", merged.c2},
              {"c3", merged.c3},
              {"c4", merged.c4},
              {"c5", merged.c5},
              {"witnesses", witnesses},
              {"status",
               {{"h2", to_string(h2.status)},
                {"h3", to_string(h3.status)},
                {"overall", to_string(merged.status)}}}};
}

json report_json(const BoundReport& rep) {
  return json{{"bound_name", rep.bound_name}, {"times", rep.times},
              {"lhs", rep.lhs},               {"rhs", rep.rhs},
              {"margin", rep.margin},         {"pass", rep.pass},
              {"qualifier", rep.qualifier}};
}

std::string moments_csv(const MomentSeries& s) {
  std::ostringstream out;
  out << "t,norm_id,rho,estimate,stderr\n";
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    out << fmt(s.times[i]) << ",c0," << fmt(s.q) << ','
        << fmt(s.m_c0_q[i]) << ',' << fmt(s.se_c0_q[i]) << '\n';
    for (const RhoSeries& rs : s.m_lrho_rho)
      out << fmt(s.times[i]) << ",lq," << fmt(rs.rho) << ','
          << fmt(rs.values[i]) << ',' << fmt(rs.stderrs[i]) << '\n';
    out << fmt(s.times[i]) << ",h1," << fmt(s.q) << ','
        << fmt(s.m_h1_q[i]) << ',' << fmt(s.se_h1_q[i]) << '\n';
  }
  return out.str();
}

bool status_accepted(CertStatus status, bool allow_grid) {
  if (status == CertStatus::verified) return true;
  return status == CertStatus::grid_verified_only && allow_grid;
}

}  // namespace

int cmd_certify(const ExperimentConfig& cfg, const CliOptions& opt) {
  const Runtime rt = assemble(cfg, opt);
  const HypothesisCertificate h2 =
      certify_H2(rt.model, cfg.model.q, rt.noise.theta);
  const HypothesisCertificate h3 =
      certify_H3(rt.model, cfg.model.q, rt.noise.theta, kAuditRadius);
  const HypothesisCertificate merged = merge_certificates(h2, h3);

  write_file(rt.out_dir, "certificate.json",
             certificate_json(merged, h2, h3).dump(2) + "\n");
  std::cout << "certify: h2=" << to_string(h2.status)
            << " h3=" << to_string(h3.status)
            << " c1=" << fmt(merged.c1) << " c2=" << fmt(merged.c2) << "\n";

  if (merged.status == CertStatus::falsified) return kExitCertification;
  return status_accepted(merged.status, opt.allow_grid)
             ? kExitOk
             : kExitCertification;
}

int cmd_simulate(const ExperimentConfig& cfg, const CliOptions& opt) {
  const Runtime rt = assemble(cfg, opt);

  bool needs_cert = false;
  for (const std::string& c : cfg.checks)
    if (c == "energy" || c == "dissipativity") needs_cert = true;
  HypothesisCertificate h2;
  if (needs_cert) {
    h2 = certify_H2(rt.model, cfg.model.q, rt.noise.theta);
    if (h2.status != CertStatus::verified) {
      std::cout << "simulate: coercivity certificate "
                << to_string(h2.status) << ", cannot run moment checks\n";
      return kExitCertification;
    }
  }

  const EnsembleResult ens =
      run_ensemble(cfg.stepper, rt.basis, rt.model, rt.noise, rt.u0,
                   rt.paths, rt.seed, cfg.model.q, rt.rho_list);

  std::vector<BoundReport> reports;
  for (const std::string& check : cfg.checks) {
    if (check == "energy") {
      for (double rho : rt.rho_list) {
        const double u0_moment =
            std::pow(lq_norm(rt.basis, rt.u0, rho), rho);
        reports.push_back(check_energy_inequality(ens.series, h2, rho,
                                                  u0_moment, rt.basis.L));
      }
    } else if (check == "dissipativity") {
      const double u0_qr = std::pow(sup_norm(rt.basis, rt.u0),
                                    cfg.model.q * rt.model.r);
      reports.push_back(check_dissipativity(ens.series, h2, cfg.model.q,
                                            rt.model.r, u0_qr));
    } else if (check == "regularity") {
      reports.push_back(regularity_probe(ens.series, cfg.model.q - 1.0));
    }
  }

  json jreports = json::array();
  for (const BoundReport& rep : reports) jreports.push_back(report_json(rep));
  json meta{{"paths", rt.paths},
            {"seed", rt.seed},
            {"tau_hit_count", ens.tau_hit_count},
            {"blown_up_count", ens.blown_up_count},
            {"scheme", to_string(cfg.stepper.scheme)}};
  write_file(rt.out_dir, "moments.csv", moments_csv(ens.series));
  write_file(rt.out_dir, "reports.json",
             json{{"meta", meta}, {"reports", jreports}}.dump(2) + "\n");

  bool all_pass = true;
  for (const BoundReport& rep : reports) {
    std::cout << "simulate: " << rep.bound_name << " "
              << (rep.pass ? "pass" : "FAIL") << " margin=" << fmt(rep.margin)
              << "\n";
    all_pass = all_pass && rep.pass;
  }
  std::cout << "simulate: paths=" << rt.paths
            << " tau_hits=" << ens.tau_hit_count
            << " blowups=" << ens.blown_up_count << "\n";
  return all_pass ? kExitOk : kExitBoundFailure;
}

int cmd_picard(const ExperimentConfig& cfg, const CliOptions& opt) {
  const Runtime rt = assemble(cfg, opt);
  if (!rt.model.cutoff_n)
    throw ConfigError("picard: model.cutoff_n is required");

  const double lip = lipschitz_bound(rt.model);
  const double budget = contraction_budget(
      lip, cfg.model.q, cfg.picard.alpha, cfg.picard.gamma_t,
      cfg.picard.xi_prime, rt.noise.theta, rt.basis.lambda[0]);
  const double t0 = cfg.picard.T0 > 0.0 ? cfg.picard.T0 : budget;
  const int steps = cfg.picard.steps;
  const double dt = t0 / steps;

  RngStream rng(rt.seed, 0);
  std::vector<Field> frozen;
  frozen.reserve(steps);
  for (int i = 0; i < steps; ++i)
    frozen.push_back(sample_increment(rt.noise, rt.basis, dt, rng));

  const PicardResult pr =
      picard_solve(rt.basis, rt.model, rt.noise, rt.u0, frozen, t0,
                   cfg.picard.tol, cfg.picard.max_iter);

  StepperConfig orbit_cfg;
  orbit_cfg.scheme = Scheme::exponential_euler;
  orbit_cfg.dt = dt;
  orbit_cfg.T = t0;
  orbit_cfg.record_every = 1;
  RngStream rng_orbit(rt.seed, 0);
  const PathResult orbit =
      run_path(orbit_cfg, rt.basis, rt.model, rt.noise, rt.u0, rng_orbit);

  double gap = 0.0;
  for (std::size_t i = 0; i < pr.trajectory.size(); ++i) {
    Field diff = pr.trajectory[i];
    sync_values(rt.basis, diff);
    Field o = orbit.states[i];
    sync_values(rt.basis, o);
    Vector d = diff.values - o.values;
    gap = std::max(gap, sup_norm_values(rt.basis, d));
  }

  double rho_max = 0.0;
  for (double r : pr.ratios) rho_max = std::max(rho_max, r);

  json j{{"lip", lip},
         {"budget", budget},
         {"T0", t0},
         {"steps", steps},
         {"distances", pr.distances},
         {"ratios", pr.ratios},
         {"converged", pr.converged},
         {"iterations", pr.iterations},
         {"fixed_point_gap", gap}};
  const Runtime& r = rt;
  write_file(r.out_dir, "picard.json", j.dump(2) + "\n");
  std::cout << "picard: T0=" << fmt(t0) << " budget=" << fmt(budget)
            << " converged=" << (pr.converged ? "yes" : "no")
            << " rho_max=" << fmt(rho_max) << " gap=" << fmt(gap) << "\n";

  const bool below_budget = t0 <= budget;
  if (below_budget && (!pr.converged || rho_max >= 1.0))
    return kExitBoundFailure;
  return kExitOk;
}

int cmd_kolmogorov(const ExperimentConfig& cfg, const CliOptions& opt) {
  const CliOptions o = opt;
  const std::uint64_t seed = resolve_seed(cfg, opt);
  const std::string out_dir = o.out_dir ? *o.out_dir : cfg.output_dir;
  const KolmogorovConfig& kc = cfg.kolmogorov;
  const int paths = o.paths ? *o.paths : kc.paths;

  const std::size_t n = std::size_t(1) << kc.depth;
  const double dt = kc.T / double(n);
  std::vector<std::vector<double>> tracks(paths);
  std::vector<double> xi(n);
  for (int p = 0; p < paths; ++p) {
    RngStream rng(seed, std::uint64_t(p));
    rng.fill_normals(xi.data(), int(n));
    std::vector<double>& track = tracks[p];
    track.resize(n + 1);
    track[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      track[k + 1] = track[k] + std::sqrt(dt) * xi[k];
  }

  const BoundReport rep =
      check_kolmogorov(tracks, kc.C, kc.q, kc.xi, kc.eta, kc.T);
  const double B = kolmogorov_bound(kc.C, kc.q, kc.xi, kc.eta, kc.T);

  json j{{"report", report_json(rep)},
         {"B", B},
         {"paths", paths},
         {"depth", kc.depth},
         {"seed", seed}};
  write_file(out_dir, "kolmogorov.json", j.dump(2) + "\n");
  std::cout << "kolmogorov: " << (rep.pass ? "pass" : "FAIL")
            << " EK^q=" << fmt(rep.lhs[0]) << " B=" << fmt(B) << "\n";
  return rep.pass ? kExitOk : kExitBoundFailure;
}

int cmd_report(const ExperimentConfig& cfg, const CliOptions& opt) {
  const std::string out_dir = opt.out_dir ? *opt.out_dir : cfg.output_dir;
  bool found = false;
  bool all_pass = true;

  auto load = [&](const std::string& name) -> json {
    std::ifstream in(out_dir + "/" + name);
    if (!in) return json();
    found = true;
    json j;
    in >> j;
    return j;
  };

  const json cert = load("certificate.json");
  if (!cert.is_null()) {
    const std::string overall = cert.at("status").at("overall");
    std::cout << "certificate: " << overall << " c1=" << cert.at("c1").dump()
              << " c2=" << cert.at("c2").dump() << "\n";
    if (overall == "falsified") all_pass = false;
  }
  const json reports = load("reports.json");
  if (!reports.is_null()) {
    for (const json& rep : reports.at("reports")) {
      const bool pass = rep.at("pass").get<bool>();
      std::cout << "check: " << rep.at("bound_name").get<std::string>()
                << " " << (pass ? "pass" : "FAIL")
                << " margin=" << rep.at("margin").dump() << "\n";
      all_pass = all_pass && pass;
    }
  }
  const json picard = load("picard.json");
  if (!picard.is_null()) {
    const bool conv = picard.at("converged").get<bool>();
    std::cout << "picard: converged=" << (conv ? "yes" : "no")
              << " budget=" << picard.at("budget").dump() << "\n";
    all_pass = all_pass && conv;
  }
  const json kolmo = load("kolmogorov.json");
  if (!kolmo.is_null()) {
    const bool pass = kolmo.at("report").at("pass").get<bool>();
    std::cout << "kolmogorov: " << (pass ? "pass" : "FAIL") << "\n";
    all_pass = all_pass && pass;
  }

  if (!found) {
    std::cout << "report: no artifacts in " << out_dir << "\n";
    return kExitOk;
  }
  return all_pass ? kExitOk : kExitBoundFailure;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"spdelab: a numerical laboratory for dissipative stochastic "
               "reaction-diffusion equations"};
  app.require_subcommand(1);

  CliOptions opt;
  std::string config_path;
  std::uint64_t seed_value = 0;
  int paths_value = 0;
  std::string out_value;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", config_path,
                              "experiment configuration (JSON)");
    if (config_required) c->required();
    sub->add_option("--seed", seed_value, "master seed override");
    sub->add_option("--paths", paths_value, "path count override");
    sub->add_option("--out", out_value, "output directory override");
    return sub;
  };

  CLI::App* certify = add_common(app.add_subcommand("certify"), true);
  certify->add_flag("--allow-grid", opt.allow_grid,
                    "accept grid-verified-only certificates");
  CLI::App* simulate = add_common(app.add_subcommand("simulate"), true);
  CLI::App* picard = add_common(app.add_subcommand("picard"), true);
  CLI::App* kolmogorov = add_common(app.add_subcommand("kolmogorov"), true);
  CLI::App* report = add_common(app.add_subcommand("report"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);

    CLI::App* active = app.get_subcommands().front();
    if (active->count("--seed")) opt.seed = seed_value;
    if (active->count("--paths")) opt.paths = paths_value;
    if (active->count("--out")) opt.out_dir = out_value;
    opt.config_path = config_path;

    if (active == certify) return cmd_certify(cfg, opt);
    if (active == simulate) return cmd_simulate(cfg, opt);
    if (active == picard) return cmd_picard(cfg, opt);
    if (active == kolmogorov) return cmd_kolmogorov(cfg, opt);
    if (active == report) return cmd_report(cfg, opt);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace spdelab
