#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pia/channel.hpp"
#include "pia/geometry.hpp"
#include "pia/optimizer.hpp"

namespace pia {

inline constexpr const char* kVersion = "0.1.0";

struct EvalConfig {
  int n_drops = 100;
  std::uint64_t seed = 1;
};

struct OutputConfig {
  std::string dir = "out";
  std::vector<std::string> formats = {"json", "csv"};
};

// One experiment: scenario physics, reference grid, swarm budget,
// evaluation budget, output routing.
struct ExperimentConfig {
  ScenarioConfig scenario;
  GridSpec grid;
  PsoConfig pso;
  EvalConfig eval;
  OutputConfig output;

  void validate() const;
};

ExperimentConfig default_experiment();

// JSON round-trip. Lengths may be given as meter keys (delta_m, pitch_m,
// h_bs_m, ...) or wavelength-multiple keys (delta_lambda, pitch_lambda,
// h_bs_lambda, ...); the carrier is resolved first and lambda keys are
// converted at load. Giving both variants of one length, or any unknown
// key, is an error naming the key. Unset lengths default to their
// wavelength-multiple defaults, so they scale with the carrier.
// Serialization is canonical: resolved meter keys only, fixed order.
ExperimentConfig experiment_from_json(const std::string& text);
std::string experiment_to_json(const ExperimentConfig& config);

ExperimentConfig load_experiment(const std::string& path);
void save_experiment(const ExperimentConfig& config, const std::string& path);

// Hash of the canonical serialization.
std::uint64_t config_hash(const ExperimentConfig& config);

// Reproducibility record written next to every run's outputs. Contains no
// clock or host state, so reruns produce identical manifests.
std::string manifest_json(const ExperimentConfig& config,
                          const std::string& command, int threads);

}  // namespace pia
