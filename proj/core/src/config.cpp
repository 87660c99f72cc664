#include "spdelab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "spdelab/basis.hpp"

namespace spdelab {

namespace {

using nlohmann::json;

void require_known_keys(const json& j, const std::set<std::string>& allowed,
                        const std::string& section) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("config: unknown key '" + it.key() + "' in " +
                        section);
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "semi_implicit") return Scheme::semi_implicit;
  if (s == "exponential_euler") return Scheme::exponential_euler;
  if (s == "tamed_explicit") return Scheme::tamed_explicit;
  throw ConfigError("config: unknown scheme '" + s + "'");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key +
                      "': " + e.what());
  }
}

void parse_basis(const json& j, BasisConfig& out) {
  require_known_keys(j, {"L", "a0", "N", "G"}, "basis");
  out.L = get_or(j, "L", out.L);
  out.a0 = get_or(j, "a0", out.a0);
  out.N = get_or(j, "N", out.N);
  out.G = get_or(j, "G", out.G);
}

void parse_noise(const json& j, NoiseConfig& out) {
  require_known_keys(j, {"family", "truncation_m"}, "noise");
  if (j.contains("family")) {
    const json& f = j.at("family");
    require_known_keys(f, {"type", "c", "s", "values"}, "noise.family");
    const std::string type = get_or<std::string>(f, "type", "power");
    if (type == "power") {
      out.family = NoiseFamily::power_law(get_or(f, "c", 1.0),
                                          get_or(f, "s", 2.0));
    } else if (type == "list") {
      out.family = NoiseFamily::from_list(
          get_or(f, "values", std::vector<double>{}));
    } else {
      throw ConfigError("config: unknown noise family type '" + type + "'");
    }
  }
  if (j.contains("truncation_m"))
    out.truncation_m = get_or(j, "truncation_m", 1);
}

void parse_model(const json& j, ModelConfig& out) {
  require_known_keys(
      j, {"f_coeffs", "sigma_coeffs", "gamma", "q", "cutoff_n", "rho_list"},
      "model");
  out.f_coeffs = get_or(j, "f_coeffs", out.f_coeffs);
  out.sigma_coeffs = get_or(j, "sigma_coeffs", out.sigma_coeffs);
  out.gamma = get_or(j, "gamma", out.gamma);
  out.q = get_or(j, "q", out.q);
  if (j.contains("cutoff_n")) out.cutoff_n = get_or(j, "cutoff_n", 1.0);
  out.rho_list = get_or(j, "rho_list", out.rho_list);
}

void parse_stepper(const json& j, StepperConfig& out) {
  require_known_keys(j, {"scheme", "dt", "T", "stop_radius", "record_every"},
                     "stepper");
  if (j.contains("scheme"))
    out.scheme = scheme_from_string(j.at("scheme").get<std::string>());
  out.dt = get_or(j, "dt", out.dt);
  out.T = get_or(j, "T", out.T);
  if (j.contains("stop_radius"))
    out.stop_radius_n = get_or(j, "stop_radius", 0.0);
  out.record_every = get_or(j, "record_every", out.record_every);
}

void parse_ensemble(const json& j, EnsembleConfig& out) {
  require_known_keys(j, {"paths", "master_seed"}, "ensemble");
  out.paths = get_or(j, "paths", out.paths);
  out.master_seed = get_or(j, "master_seed", out.master_seed);
}

void parse_picard(const json& j, PicardConfig& out) {
  require_known_keys(
      j, {"T0", "tol", "max_iter", "steps", "alpha", "gamma_t", "xi_prime"},
      "picard");
  out.T0 = get_or(j, "T0", out.T0);
  out.tol = get_or(j, "tol", out.tol);
  out.max_iter = get_or(j, "max_iter", out.max_iter);
  out.steps = get_or(j, "steps", out.steps);
  out.alpha = get_or(j, "alpha", out.alpha);
  out.gamma_t = get_or(j, "gamma_t", out.gamma_t);
  out.xi_prime = get_or(j, "xi_prime", out.xi_prime);
}

void parse_kolmogorov(const json& j, KolmogorovConfig& out) {
  require_known_keys(j, {"C", "q", "xi", "eta", "T", "paths", "depth"},
                     "kolmogorov");
  out.C = get_or(j, "C", out.C);
  out.q = get_or(j, "q", out.q);
  out.xi = get_or(j, "xi", out.xi);
  out.eta = get_or(j, "eta", out.eta);
  out.T = get_or(j, "T", out.T);
  out.paths = get_or(j, "paths", out.paths);
  out.depth = get_or(j, "depth", out.depth);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.basis.L <= 0.0 || cfg.basis.a0 <= 0.0)
    throw ConfigError("config: basis L and a0 must be positive");
  if (cfg.basis.N < 1) throw ConfigError("config: basis N must be >= 1");
  if (cfg.basis.G != 0 && cfg.basis.G < dealiased_grid_size(cfg.basis.N))
    throw ConfigError("config: basis G below the dealiased minimum");
  if (cfg.model.q <= 6.0) throw ConfigError("config: model q must be > 6");
  if (cfg.model.f_coeffs.empty() || cfg.model.f_coeffs.back() >= 0.0)
    throw ConfigError(
        "config: drift needs a negative leading coefficient");
  if (cfg.model.gamma < 1.0)
    throw ConfigError("config: model gamma must be >= 1");
  for (double rho : cfg.model.rho_list)
    if (rho < 2.0) throw ConfigError("config: rho values must be >= 2");
  if (cfg.stepper.dt <= 0.0) throw ConfigError("config: stepper dt must be > 0");
  if (cfg.stepper.T < cfg.stepper.dt)
    throw ConfigError("config: stepper T must be >= dt");
  if (cfg.stepper.record_every < 1)
    throw ConfigError("config: record_every must be >= 1");
  if (cfg.ensemble.paths < 1)
    throw ConfigError("config: ensemble paths must be >= 1");
  if (cfg.picard.steps < 1 || cfg.picard.max_iter < 1)
    throw ConfigError("config: picard steps and max_iter must be >= 1");
  if (cfg.kolmogorov.depth < 1 || cfg.kolmogorov.paths < 1)
    throw ConfigError("config: kolmogorov depth and paths must be >= 1");
  static const std::set<std::string> known_checks{"energy", "dissipativity",
                                                  "regularity"};
  for (const std::string& c : cfg.checks)
    if (!known_checks.count(c))
      throw ConfigError("config: unknown check '" + c + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: parse failure: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  require_known_keys(j,
                     {"basis", "noise", "model", "stepper", "ensemble",
                      "picard", "kolmogorov", "checks", "u0_coeffs",
                      "output_dir"},
                     "top level");
  ExperimentConfig cfg;
  try {
    if (j.contains("basis")) parse_basis(j.at("basis"), cfg.basis);
    if (j.contains("noise")) parse_noise(j.at("noise"), cfg.noise);
    if (j.contains("model")) parse_model(j.at("model"), cfg.model);
    if (j.contains("stepper")) parse_stepper(j.at("stepper"), cfg.stepper);
    if (j.contains("ensemble")) parse_ensemble(j.at("ensemble"), cfg.ensemble);
    if (j.contains("picard")) parse_picard(j.at("picard"), cfg.picard);
    if (j.contains("kolmogorov"))
      parse_kolmogorov(j.at("kolmogorov"), cfg.kolmogorov);
    cfg.checks = get_or(j, "checks", cfg.checks);
    cfg.u0_coeffs = get_or(j, "u0_coeffs", cfg.u0_coeffs);
    cfg.output_dir = get_or(j, "output_dir", cfg.output_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json j;
  j["basis"] = {{"L", cfg.basis.L},
                {"a0", cfg.basis.a0},
                {"N", cfg.basis.N},
                {"G", cfg.basis.G}};
  json family;
  if (cfg.noise.family.type == NoiseFamily::Type::power)
    family = {{"type", "power"}, {"c", cfg.noise.family.c},
              {"s", cfg.noise.family.s}};
  else
    family = {{"type", "list"}, {"values", cfg.noise.family.values}};
  j["noise"] = {{"family", family}};
  if (cfg.noise.truncation_m)
    j["noise"]["truncation_m"] = *cfg.noise.truncation_m;
  j["model"] = {{"f_coeffs", cfg.model.f_coeffs},
                {"sigma_coeffs", cfg.model.sigma_coeffs},
                {"gamma", cfg.model.gamma},
                {"q", cfg.model.q},
                {"rho_list", cfg.model.rho_list}};
  if (cfg.model.cutoff_n) j["model"]["cutoff_n"] = *cfg.model.cutoff_n;
  j["stepper"] = {{"scheme", to_string(cfg.stepper.scheme)},
                  {"dt", cfg.stepper.dt},
                  {"T", cfg.stepper.T},
                  {"record_every", cfg.stepper.record_every}};
  if (cfg.stepper.stop_radius_n)
    j["stepper"]["stop_radius"] = *cfg.stepper.stop_radius_n;
  j["ensemble"] = {{"paths", cfg.ensemble.paths},
                   {"master_seed", cfg.ensemble.master_seed}};
  j["picard"] = {{"T0", cfg.picard.T0},       {"tol", cfg.picard.tol},
                 {"max_iter", cfg.picard.max_iter},
                 {"steps", cfg.picard.steps}, {"alpha", cfg.picard.alpha},
                 {"gamma_t", cfg.picard.gamma_t},
                 {"xi_prime", cfg.picard.xi_prime}};
  j["kolmogorov"] = {{"C", cfg.kolmogorov.C},
                     {"q", cfg.kolmogorov.q},
                     {"xi", cfg.kolmogorov.xi},
                     {"eta", cfg.kolmogorov.eta},
                     {"T", cfg.kolmogorov.T},
                     {"paths", cfg.kolmogorov.paths},
                     {"depth", cfg.kolmogorov.depth}};
  j["checks"] = cfg.checks;
  j["u0_coeffs"] = cfg.u0_coeffs;
  j["output_dir"] = cfg.output_dir;
  return j.dump(2) + "\n";
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace spdelab
