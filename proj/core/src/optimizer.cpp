#include "pia/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pia/errors.hpp"
#include "pia/parallel.hpp"
#include "pia/precoding.hpp"
#include "pia/rng.hpp"

namespace pia {

namespace {

constexpr double kPenaltyWeight = 1e4;

void require_disjoint(const std::vector<MovementRegion>& regions) {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (std::size_t j = i + 1; j < regions.size(); ++j) {
      const MovementRegion& a = regions[i];
      const MovementRegion& b = regions[j];
      const double dy = std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min());
      const double dz = std::min(a.z_max(), b.z_max()) - std::max(a.z_min(), b.z_min());
      // Boxes that tile the plane edge to edge land within rounding of zero
      // overlap; only overlaps past the repair slack are real.
      if (dy > kSeparationSlack && dz > kSeparationSlack)
        throw ConfigError("movement regions " + std::to_string(i) + " and " +
                          std::to_string(j) + " overlap");
    }
  }
}

double constraint_violation(const ArrayLayout& layout,
                            const std::vector<MovementRegion>& regions,
                            double min_separation) {
  const FeasibilityReport report = check_feasible(layout, regions, min_separation);
  double total = 0.0;
  for (const auto& out : report.out_of_region) total += out.excess_y + out.excess_z;
  for (const auto& pair : report.close_pairs) total += min_separation - pair.distance;
  return total;
}

}  // namespace

void PsoConfig::validate() const {
  if (particles < 1) throw ConfigError("pso.n_p: need at least one particle");
  if (iterations < 1) throw ConfigError("pso.n_pso: need at least one iteration");
  if (!(inertia >= 0.0) || !(inertia <= 1.0))
    throw ConfigError("pso.inertia: must lie in [0, 1]");
  if (!(cognitive >= 0.0) || !std::isfinite(cognitive))
    throw ConfigError("pso.c1: must be finite and >= 0");
  if (!(social >= 0.0) || !std::isfinite(social))
    throw ConfigError("pso.c2: must be finite and >= 0");
  if (!std::isfinite(v_max)) throw ConfigError("pso.v_max_m: must be finite");
  if (drops_per_iteration < 1) throw ConfigError("pso.q: need at least one drop");
}

SampleAverageObjective::SampleAverageObjective(ScenarioConfig scenario,
                                               std::uint64_t seed,
                                               int drops_per_iteration)
    : scenario_(std::move(scenario)),
      seed_(seed),
      drops_per_iteration_(drops_per_iteration) {
  scenario_.validate();
  if (drops_per_iteration_ < 1)
    throw ConfigError("pso.q: need at least one drop");
}

void SampleAverageObjective::begin_iteration(int iteration) {
  batch_.clear();
  batch_.reserve(drops_per_iteration_);
  for (int q = 0; q < drops_per_iteration_; ++q) {
    Rng rng(derive_seed(seed_, Stream::objective_drops,
                        static_cast<std::uint64_t>(iteration),
                        static_cast<std::uint64_t>(q)));
    batch_.push_back(sample_drop(scenario_, rng));
  }
}

double SampleAverageObjective::value(const ArrayLayout& layout) const {
  double total = 0.0;
  for (const UserDrop& drop : batch_) {
    const ChannelSet channels = channel_matrices(layout, drop, scenario_);
    total += sum_rate(channels, scenario_.noise_w, scenario_.power_w).sum;
  }
  return total / static_cast<double>(batch_.size());
}

FixedDropObjective::FixedDropObjective(ScenarioConfig scenario, UserDrop drop)
    : scenario_(std::move(scenario)), drop_(std::move(drop)) {
  scenario_.validate();
}

double FixedDropObjective::value(const ArrayLayout& layout) const {
  const ChannelSet channels = channel_matrices(layout, drop_, scenario_);
  return sum_rate(channels, scenario_.noise_w, scenario_.power_w).sum;
}

double pia_objective(const ArrayLayout& layout, const ScenarioConfig& scenario,
                     int drops, std::uint64_t seed, int iteration) {
  SampleAverageObjective objective(scenario, seed, drops);
  objective.begin_iteration(iteration);
  return objective.value(layout);
}

double ma_objective(const ArrayLayout& layout, const UserDrop& drop,
                    const ScenarioConfig& scenario) {
  return FixedDropObjective(scenario, drop).value(layout);
}

PsoResult pso_optimize(const std::vector<MovementRegion>& regions,
                       double min_separation, double wavelength,
                       Objective& objective, const PsoConfig& config,
                       int threads) {
  config.validate();
  if (regions.empty()) throw ConfigError("grid: no movement regions");
  if (!(wavelength > 0.0)) throw ConfigError("grid: wavelength must be positive");
  if (!(min_separation >= 0.0))
    throw ConfigError("grid.min_sep_m: must be >= 0");
  require_disjoint(regions);

  const std::size_t m = regions.size();
  const int n_p = config.particles;
  if (threads <= 0) threads = default_thread_count();

  // Half the widest box keeps particles from thrashing against the
  // box walls when no explicit clamp is configured.
  double v_max = config.v_max;
  if (v_max <= 0.0) {
    double extent = 0.0;
    for (const MovementRegion& r : regions) extent = std::max(extent, r.width);
    v_max = 0.5 * extent;
  }
  if (!(v_max > 0.0)) throw ConfigError("pso.v_max_m: must be positive");

  const bool use_repair = config.constraints == ConstraintMode::repair;
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  std::vector<ArrayLayout> position(n_p);
  std::vector<std::vector<Point2>> velocity(
      n_p, std::vector<Point2>(m, Point2{0.0, 0.0}));
  std::vector<ArrayLayout> personal_best(n_p);
  std::vector<double> personal_value(n_p, kNegInf);
  std::vector<double> score(n_p, kNegInf);

  // Uniform scatter inside the boxes (not the reference grid) so the swarm
  // explores the whole feasible set from the start.
  for (int p = 0; p < n_p; ++p) {
    position[p].wavelength = wavelength;
    position[p].positions.resize(m);
    Rng rng(derive_seed(config.seed, Stream::pso_init,
                        static_cast<std::uint64_t>(p)));
    for (std::size_t i = 0; i < m; ++i) {
      position[p].positions[i].y =
          rng.uniform(regions[i].y_min(), regions[i].y_max());
      position[p].positions[i].z =
          rng.uniform(regions[i].z_min(), regions[i].z_max());
    }
    for (std::size_t i = 0; i < m; ++i) {
      velocity[p][i].y = rng.uniform(-v_max, v_max);
      velocity[p][i].z = rng.uniform(-v_max, v_max);
    }
    personal_best[p] = position[p];
  }

  PsoResult result;
  result.best_value = kNegInf;
  result.trace.reserve(config.iterations);

  std::int64_t evaluations = 0;
  const auto start = std::chrono::steady_clock::now();

  for (int t = 0; t < config.iterations; ++t) {
    objective.begin_iteration(t);

    parallel_for(static_cast<std::size_t>(n_p), threads, [&](std::size_t p) {
      if (use_repair) {
        std::optional<ArrayLayout> fixed =
            repair(position[p], regions, min_separation);
        if (!fixed) {
          score[p] = kNegInf;
          return;
        }
        position[p] = std::move(*fixed);
        score[p] = objective.value(position[p]);
      } else {
        const double violation =
            constraint_violation(position[p], regions, min_separation);
        score[p] = objective.value(position[p]) - kPenaltyWeight * violation;
      }
    });

    for (int p = 0; p < n_p; ++p) {
      if (std::isfinite(score[p])) ++evaluations;
      if (score[p] > personal_value[p]) {
        personal_value[p] = score[p];
        personal_best[p] = position[p];
      }
      if (score[p] > result.best_value) {
        result.best_value = score[p];
        result.best_layout = position[p];
      }
    }

    // Without a finite global best the velocity update has no anchor, and a
    // swarm whose every repair failed will not recover: stop here.
    if (!std::isfinite(result.best_value))
      throw NumericalError(
          "swarm never found a feasible layout; the separation floor cannot "
          "fit inside the movement regions");

    const double wall_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - start)
            .count();
    result.trace.push_back({t, result.best_value, evaluations, wall_ms});

    if (t + 1 == config.iterations) break;

    for (int p = 0; p < n_p; ++p) {
      Rng rng(derive_seed(config.seed, Stream::pso_velocity,
                          static_cast<std::uint64_t>(t),
                          static_cast<std::uint64_t>(p)));
      const double u1 = rng.uniform();
      const double u2 = rng.uniform();
      for (std::size_t i = 0; i < m; ++i) {
        Point2& v = velocity[p][i];
        const Point2& x = position[p].positions[i];
        v.y = config.inertia * v.y +
              config.cognitive * u1 * (personal_best[p].positions[i].y - x.y) +
              config.social * u2 * (result.best_layout.positions[i].y - x.y);
        v.z = config.inertia * v.z +
              config.cognitive * u1 * (personal_best[p].positions[i].z - x.z) +
              config.social * u2 * (result.best_layout.positions[i].z - x.z);
        v.y = std::clamp(v.y, -v_max, v_max);
        v.z = std::clamp(v.z, -v_max, v_max);
      }
      for (std::size_t i = 0; i < m; ++i) {
        position[p].positions[i].y += velocity[p][i].y;
        position[p].positions[i].z += velocity[p][i].z;
      }
    }
  }

  return result;
}

PsoResult optimize_pia(const GridSpec& grid, const ScenarioConfig& scenario,
                       const PsoConfig& config, int threads) {
  grid.validate();
  scenario.validate();
  if (std::abs(grid.wavelength - scenario.wavelength()) >
      1e-9 * scenario.wavelength())
    throw ConfigError("grid.wavelength disagrees with scenario.f_c_hz");
  const ReferenceGrid reference = make_reference_grid(grid);
  SampleAverageObjective objective(scenario, config.seed,
                                   config.drops_per_iteration);
  return pso_optimize(reference.regions, grid.separation_limit(),
                      grid.wavelength, objective, config, threads);
}

PsoResult optimize_ma(const GridSpec& grid, const ScenarioConfig& scenario,
                      const UserDrop& drop, const PsoConfig& config,
                      int threads) {
  grid.validate();
  scenario.validate();
  if (std::abs(grid.wavelength - scenario.wavelength()) >
      1e-9 * scenario.wavelength())
    throw ConfigError("grid.wavelength disagrees with scenario.f_c_hz");
  const ReferenceGrid reference = make_reference_grid(grid);
  FixedDropObjective objective(scenario, drop);
  return pso_optimize(reference.regions, grid.separation_limit(),
                      grid.wavelength, objective, config, threads);
}

std::string trace_to_csv(const std::vector<PsoTracePoint>& trace) {
  std::string out = "iter,gbest_value,eval_count,wall_ms\n";
  char line[160];
  for (const PsoTracePoint& point : trace) {
    std::snprintf(line, sizeof(line), "%d,%.12g,%lld,%.3f\n", point.iteration,
                  point.best_value,
                  static_cast<long long>(point.evaluations), point.wall_ms);
    out += line;
  }
  return out;
}

}  // namespace pia
