#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pia/channel.hpp"
#include "pia/geometry.hpp"
#include "pia/optimizer.hpp"

namespace pia {

struct CdfPoint {
  double value = 0.0;
  double probability = 0.0;
};

// Per-drop sum rates (bit/s/Hz) for one scheme, with the seeds that produced
// the drops. Reports scored on the same seed list are directly comparable
// drop by drop.
struct EvalReport {
  std::string scheme;
  std::vector<double> values;
  std::vector<std::uint64_t> drop_seeds;
  double mean = 0.0;
  double stddev = 0.0;       // population standard deviation
  double variability = 0.0;  // stddev / mean when mean > 0

  int drops() const { return static_cast<int>(values.size()); }
  std::vector<CdfPoint> cdf() const;
  std::uint64_t fingerprint() const;
};

// Computes the aggregate statistics from raw per-drop values.
EvalReport finalize_report(std::string scheme, std::vector<double> values,
                           std::vector<std::uint64_t> drop_seeds);

// Held-out drops live in their own seed stream so they never collide with
// the drops an optimizer saw.
struct EvalDrops {
  std::vector<UserDrop> drops;
  std::vector<std::uint64_t> seeds;
};
EvalDrops sample_eval_drops(const ScenarioConfig& scenario, int n_drops,
                            std::uint64_t seed);

// Scores a fixed layout on n_drops held-out drops.
EvalReport evaluate_fixed(const ArrayLayout& layout,
                          const ScenarioConfig& scenario, int n_drops,
                          std::uint64_t seed, int threads = 0,
                          std::string scheme = "fixed");

// Re-optimizes the array per drop, then scores each drop with its own
// layout.
EvalReport evaluate_ma(const GridSpec& grid, const ScenarioConfig& scenario,
                       const PsoConfig& pso, int n_drops, std::uint64_t seed,
                       int threads = 0);

struct Comparison {
  std::vector<std::string> schemes;
  std::vector<double> means;
  std::vector<double> stddevs;
  std::vector<double> variabilities;
  // gap_percent[a][b] = (mean_a - mean_b) / mean_a * 100
  std::vector<std::vector<double>> gap_percent;
  std::uint64_t fingerprint = 0;
};

// Rejects reports whose drop sets differ.
Comparison compare(const std::vector<EvalReport>& reports);

// Standard error of mean(a) - mean(b) under paired resampling of drops.
double bootstrap_se_mean_diff(const EvalReport& a, const EvalReport& b,
                              int resamples = 256, std::uint64_t seed = 7);
// Same, for the variability-ratio difference.
double bootstrap_se_variability_diff(const EvalReport& a, const EvalReport& b,
                                     int resamples = 256,
                                     std::uint64_t seed = 7);

struct SweepRow {
  int m_side = 0;
  std::string scheme;
  double mean = 0.0;
  double stddev = 0.0;
  double variability = 0.0;
};

struct SweepResult {
  std::vector<int> m_sides;
  std::vector<SweepRow> rows;        // one row per (m_side, scheme)
  std::vector<EvalReport> reports;   // aligned with rows

  const EvalReport* report(int m_side, const std::string& scheme) const;
};

// For each side length, optimizes the irregular layout and scores all four
// schemes on the same held-out drops. base_grid supplies pitch, region
// sizes, and mount height; its column/row counts are overridden.
SweepResult sweep_antennas(const std::vector<int>& m_sides,
                           const GridSpec& base_grid,
                           const ScenarioConfig& scenario,
                           const PsoConfig& pso, int n_drops,
                           std::uint64_t eval_seed, int threads = 0);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);
std::string report_to_csv(const EvalReport& report);
std::string comparison_to_json(const Comparison& comparison);
std::string comparison_to_csv(const Comparison& comparison);
std::string sweep_to_json(const SweepResult& sweep);
std::string sweep_to_csv(const SweepResult& sweep);

}  // namespace pia
