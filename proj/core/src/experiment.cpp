#include "pia/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pia/errors.hpp"
#include "pia/rng.hpp"

namespace pia {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

double as_number(const json& v, const std::string& key) {
  if (!v.is_number())
    throw ConfigError(key + ": expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer())
    throw ConfigError(key + ": expected an integer");
  return v.get<int>();
}

std::uint64_t as_seed(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError(key + ": expected a non-negative integer");
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string())
    throw ConfigError(key + ": expected a string");
  return v.get<std::string>();
}

void require_known(const json& body, const std::string& section,
                   std::initializer_list<const char*> known) {
  for (const auto& item : body.items())
    if (std::find_if(known.begin(), known.end(), [&](const char* k) {
          return item.key() == k;
        }) == known.end())
      throw ConfigError(section + "." + item.key() + ": unknown key");
}

void reject_both(const json& body, const std::string& section,
                 const char* meters, const char* lambdas) {
  if (body.contains(meters) && body.contains(lambdas))
    throw ConfigError(section + "." + meters + " and " + section + "." +
                      lambdas + " are both set; give one");
}

// Reads a length that may be given in meters or in carrier wavelengths.
void read_length(const json& body, const std::string& section,
                 const char* meters, const char* lambdas, double lambda,
                 double& target) {
  reject_both(body, section, meters, lambdas);
  if (body.contains(meters))
    target = as_number(body[meters], section + "." + meters);
  else if (body.contains(lambdas))
    target = lambda * as_number(body[lambdas], section + "." + lambdas);
}

// Default lengths are wavelength multiples, so they track the carrier
// unless set explicitly.
void apply_wavelength_defaults(ExperimentConfig& cfg) {
  const double lambda = cfg.scenario.wavelength();
  cfg.scenario.ue_spacing_m = lambda;
  cfg.scenario.rho_min_m = 20.0 * lambda;
  cfg.scenario.rho_max_m = 5000.0 * lambda;
  cfg.grid.pitch = 5.0 * lambda;
  cfg.grid.center_height = 40.0 * lambda;
  cfg.grid.region_width = 5.0 * lambda;
  cfg.grid.region_height = 5.0 * lambda;
  cfg.grid.min_separation = 0.5 * lambda;
  cfg.grid.wavelength = lambda;
}

void apply_scenario(const json& body, ScenarioConfig& s, double lambda) {
  if (!body.is_object()) throw ConfigError("scenario: expected an object");
  require_known(body, "scenario",
                {"f_c_hz", "k", "n", "delta_m", "delta_lambda", "h0_m",
                 "rho_min_m", "rho_min_lambda", "rho_max_m", "rho_max_lambda",
                 "phi_min_rad", "phi_max_rad", "sigma2_w", "p_max_w",
                 "bandwidth_hz"});
  if (body.contains("f_c_hz"))
    s.carrier_hz = as_number(body["f_c_hz"], "scenario.f_c_hz");
  if (body.contains("k")) s.users = as_int(body["k"], "scenario.k");
  if (body.contains("n")) s.ue_antennas = as_int(body["n"], "scenario.n");
  read_length(body, "scenario", "delta_m", "delta_lambda", lambda,
              s.ue_spacing_m);
  if (body.contains("h0_m"))
    s.ue_height_m = as_number(body["h0_m"], "scenario.h0_m");
  read_length(body, "scenario", "rho_min_m", "rho_min_lambda", lambda,
              s.rho_min_m);
  read_length(body, "scenario", "rho_max_m", "rho_max_lambda", lambda,
              s.rho_max_m);
  if (body.contains("phi_min_rad"))
    s.phi_min_rad = as_number(body["phi_min_rad"], "scenario.phi_min_rad");
  if (body.contains("phi_max_rad"))
    s.phi_max_rad = as_number(body["phi_max_rad"], "scenario.phi_max_rad");
  if (body.contains("sigma2_w"))
    s.noise_w = as_number(body["sigma2_w"], "scenario.sigma2_w");
  if (body.contains("p_max_w"))
    s.power_w = as_number(body["p_max_w"], "scenario.p_max_w");
  if (body.contains("bandwidth_hz"))
    s.bandwidth_hz = as_number(body["bandwidth_hz"], "scenario.bandwidth_hz");
}

void apply_grid(const json& body, GridSpec& g, double lambda) {
  if (!body.is_object()) throw ConfigError("grid: expected an object");
  require_known(body, "grid",
                {"m_h", "m_v", "pitch_m", "pitch_lambda", "h_bs_m",
                 "h_bs_lambda", "l_h_m", "l_h_lambda", "l_v_m", "l_v_lambda",
                 "min_sep_m", "min_sep_lambda"});
  if (body.contains("m_h")) g.columns = as_int(body["m_h"], "grid.m_h");
  if (body.contains("m_v")) g.rows = as_int(body["m_v"], "grid.m_v");
  read_length(body, "grid", "pitch_m", "pitch_lambda", lambda, g.pitch);
  read_length(body, "grid", "h_bs_m", "h_bs_lambda", lambda, g.center_height);
  read_length(body, "grid", "l_h_m", "l_h_lambda", lambda, g.region_width);
  read_length(body, "grid", "l_v_m", "l_v_lambda", lambda, g.region_height);
  read_length(body, "grid", "min_sep_m", "min_sep_lambda", lambda,
              g.min_separation);
}

void apply_pso(const json& body, PsoConfig& p) {
  if (!body.is_object()) throw ConfigError("pso: expected an object");
  require_known(body, "pso",
                {"n_p", "n_pso", "inertia", "c1", "c2", "v_max_m", "seed", "q",
                 "constraints"});
  if (body.contains("n_p")) p.particles = as_int(body["n_p"], "pso.n_p");
  if (body.contains("n_pso"))
    p.iterations = as_int(body["n_pso"], "pso.n_pso");
  if (body.contains("inertia"))
    p.inertia = as_number(body["inertia"], "pso.inertia");
  if (body.contains("c1")) p.cognitive = as_number(body["c1"], "pso.c1");
  if (body.contains("c2")) p.social = as_number(body["c2"], "pso.c2");
  if (body.contains("v_max_m"))
    p.v_max = as_number(body["v_max_m"], "pso.v_max_m");
  if (body.contains("seed")) p.seed = as_seed(body["seed"], "pso.seed");
  if (body.contains("q")) p.drops_per_iteration = as_int(body["q"], "pso.q");
  if (body.contains("constraints")) {
    const std::string mode = as_string(body["constraints"], "pso.constraints");
    if (mode == "repair")
      p.constraints = ConstraintMode::repair;
    else if (mode == "penalty")
      p.constraints = ConstraintMode::penalty;
    else
      throw ConfigError("pso.constraints: expected \"repair\" or \"penalty\"");
  }
}

void apply_eval(const json& body, EvalConfig& e) {
  if (!body.is_object()) throw ConfigError("eval: expected an object");
  require_known(body, "eval", {"n_drops", "seed"});
  if (body.contains("n_drops"))
    e.n_drops = as_int(body["n_drops"], "eval.n_drops");
  if (body.contains("seed")) e.seed = as_seed(body["seed"], "eval.seed");
}

void apply_output(const json& body, OutputConfig& o) {
  if (!body.is_object()) throw ConfigError("output: expected an object");
  require_known(body, "output", {"dir", "formats"});
  if (body.contains("dir")) o.dir = as_string(body["dir"], "output.dir");
  if (body.contains("formats")) {
    if (!body["formats"].is_array())
      throw ConfigError("output.formats: expected an array of strings");
    o.formats.clear();
    for (const auto& f : body["formats"])
      o.formats.push_back(as_string(f, "output.formats"));
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  scenario.validate();
  grid.validate();
  pso.validate();
  if (eval.n_drops < 1) throw ConfigError("eval.n_drops: need at least one drop");
  if (output.formats.empty())
    throw ConfigError("output.formats: need at least one format");
  for (const std::string& f : output.formats)
    if (f != "json" && f != "csv")
      throw ConfigError("output.formats: unknown format \"" + f + "\"");
  if (std::abs(grid.wavelength - scenario.wavelength()) >
      1e-9 * scenario.wavelength())
    throw ConfigError("grid.wavelength disagrees with scenario.f_c_hz");
}

ExperimentConfig default_experiment() {
  ExperimentConfig cfg;
  cfg.scenario = default_scenario();
  apply_wavelength_defaults(cfg);
  return cfg;
}

ExperimentConfig experiment_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object())
    throw ConfigError("config: top level must be an object");

  ExperimentConfig cfg = default_experiment();
  // The carrier decides the scale of every wavelength-multiple key and
  // default, so it resolves before anything else is read.
  if (root.contains("scenario") && root["scenario"].is_object() &&
      root["scenario"].contains("f_c_hz")) {
    cfg.scenario.carrier_hz =
        as_number(root["scenario"]["f_c_hz"], "scenario.f_c_hz");
    if (!(cfg.scenario.carrier_hz > 0.0))
      throw ConfigError("scenario.f_c_hz: must be positive");
    apply_wavelength_defaults(cfg);
  }
  const double lambda = cfg.scenario.wavelength();

  for (const auto& item : root.items()) {
    const std::string& section = item.key();
    const json& body = item.value();
    if (section == "scenario")
      apply_scenario(body, cfg.scenario, lambda);
    else if (section == "grid")
      apply_grid(body, cfg.grid, lambda);
    else if (section == "pso")
      apply_pso(body, cfg.pso);
    else if (section == "eval")
      apply_eval(body, cfg.eval);
    else if (section == "output")
      apply_output(body, cfg.output);
    else
      throw ConfigError(section + ": unknown key");
  }
  cfg.validate();
  return cfg;
}

std::string experiment_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["scenario"]["f_c_hz"] = cfg.scenario.carrier_hz;
  j["scenario"]["k"] = cfg.scenario.users;
  j["scenario"]["n"] = cfg.scenario.ue_antennas;
  j["scenario"]["delta_m"] = cfg.scenario.ue_spacing_m;
  j["scenario"]["h0_m"] = cfg.scenario.ue_height_m;
  j["scenario"]["rho_min_m"] = cfg.scenario.rho_min_m;
  j["scenario"]["rho_max_m"] = cfg.scenario.rho_max_m;
  j["scenario"]["phi_min_rad"] = cfg.scenario.phi_min_rad;
  j["scenario"]["phi_max_rad"] = cfg.scenario.phi_max_rad;
  j["scenario"]["sigma2_w"] = cfg.scenario.noise_w;
  j["scenario"]["p_max_w"] = cfg.scenario.power_w;
  j["scenario"]["bandwidth_hz"] = cfg.scenario.bandwidth_hz;
  j["grid"]["m_h"] = cfg.grid.columns;
  j["grid"]["m_v"] = cfg.grid.rows;
  j["grid"]["pitch_m"] = cfg.grid.pitch;
  j["grid"]["h_bs_m"] = cfg.grid.center_height;
  j["grid"]["l_h_m"] = cfg.grid.region_width;
  j["grid"]["l_v_m"] = cfg.grid.region_height;
  j["grid"]["min_sep_m"] = cfg.grid.separation_limit();
  j["pso"]["n_p"] = cfg.pso.particles;
  j["pso"]["n_pso"] = cfg.pso.iterations;
  j["pso"]["inertia"] = cfg.pso.inertia;
  j["pso"]["c1"] = cfg.pso.cognitive;
  j["pso"]["c2"] = cfg.pso.social;
  j["pso"]["v_max_m"] = cfg.pso.v_max;
  j["pso"]["seed"] = cfg.pso.seed;
  j["pso"]["q"] = cfg.pso.drops_per_iteration;
  j["pso"]["constraints"] =
      cfg.pso.constraints == ConstraintMode::repair ? "repair" : "penalty";
  j["eval"]["n_drops"] = cfg.eval.n_drops;
  j["eval"]["seed"] = cfg.eval.seed;
  j["output"]["dir"] = cfg.output.dir;
  j["output"]["formats"] = cfg.output.formats;
  return j.dump(2) + "\n";
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return experiment_from_json(buffer.str());
}

void save_experiment(const ExperimentConfig& config, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("config: cannot write " + path);
  out << experiment_to_json(config);
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  const std::string canonical = experiment_to_json(config);
  return fnv1a(canonical.data(), canonical.size());
}

std::string manifest_json(const ExperimentConfig& config,
                          const std::string& command, int threads) {
  ordered_json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["config_hash"] = config_hash(config);
  m["threads"] = threads;
  m["seeds"]["pso"] = config.pso.seed;
  m["seeds"]["eval"] = config.eval.seed;
  m["config"] = ordered_json::parse(experiment_to_json(config));
  return m.dump(2) + "\n";
}

}  // namespace pia
