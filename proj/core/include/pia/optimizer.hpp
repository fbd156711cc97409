#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pia/channel.hpp"
#include "pia/geometry.hpp"

namespace pia {

enum class ConstraintMode { repair, penalty };

// Swarm parameters. v_max <= 0 means "derive from the geometry": half the
// movement-region width.
struct PsoConfig {
  int particles = 150;
  int iterations = 200;
  double inertia = 0.5;
  double cognitive = 1.2;
  double social = 2.0;
  double v_max = 0.0;
  std::uint64_t seed = 1;
  int drops_per_iteration = 1000;
  ConstraintMode constraints = ConstraintMode::repair;

  void validate() const;
};

// Objective queried by the swarm. begin_iteration runs on the driver thread
// before any particle of iteration t is scored; value must be safe to call
// concurrently afterwards.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual void begin_iteration(int iteration) {}
  virtual double value(const ArrayLayout& layout) const = 0;
};

// Sample-average of the sum rate over a fresh batch of user drops per
// iteration. Every particle in an iteration sees the same batch, so the
// comparison between particles is exact even though the batch changes.
class SampleAverageObjective final : public Objective {
 public:
  SampleAverageObjective(ScenarioConfig scenario, std::uint64_t seed,
                         int drops_per_iteration);

  void begin_iteration(int iteration) override;
  double value(const ArrayLayout& layout) const override;

 private:
  ScenarioConfig scenario_;
  std::uint64_t seed_;
  int drops_per_iteration_;
  std::vector<UserDrop> batch_;
};

// Sum rate for one fixed drop; used when each drop gets its own optimized
// layout.
class FixedDropObjective final : public Objective {
 public:
  FixedDropObjective(ScenarioConfig scenario, UserDrop drop);
  double value(const ArrayLayout& layout) const override;

 private:
  ScenarioConfig scenario_;
  UserDrop drop_;
};

// Arbitrary callable; test scaffolding.
class FunctionObjective final : public Objective {
 public:
  explicit FunctionObjective(std::function<double(const ArrayLayout&)> fn)
      : fn_(std::move(fn)) {}
  double value(const ArrayLayout& layout) const override { return fn_(layout); }

 private:
  std::function<double(const ArrayLayout&)> fn_;
};

// Standalone evaluations of the two objectives above: the sample-average
// sum rate of a layout over `drops` fresh drops (the swarm's noisy
// objective), and the exact sum rate for one fixed drop.
double pia_objective(const ArrayLayout& layout, const ScenarioConfig& scenario,
                     int drops, std::uint64_t seed, int iteration = 0);
double ma_objective(const ArrayLayout& layout, const UserDrop& drop,
                    const ScenarioConfig& scenario);

struct PsoTracePoint {
  int iteration = 0;
  double best_value = 0.0;
  std::int64_t evaluations = 0;
  double wall_ms = 0.0;
};

struct PsoResult {
  ArrayLayout best_layout;
  double best_value = 0.0;
  std::vector<PsoTracePoint> trace;
};

// Particle swarm over per-antenna (y, z) positions. Particles start
// uniformly random inside their boxes with uniform velocities in
// [-v_max, v_max]. Positions are repaired (or penalized) to respect the
// movement boxes and the pairwise separation floor.
PsoResult pso_optimize(const std::vector<MovementRegion>& regions,
                       double min_separation, double wavelength,
                       Objective& objective, const PsoConfig& config,
                       int threads = 0);

// Convenience wrappers binding the two array archetypes to their objectives.
PsoResult optimize_pia(const GridSpec& grid, const ScenarioConfig& scenario,
                       const PsoConfig& config, int threads = 0);
PsoResult optimize_ma(const GridSpec& grid, const ScenarioConfig& scenario,
                      const UserDrop& drop, const PsoConfig& config,
                      int threads = 0);

std::string trace_to_csv(const std::vector<PsoTracePoint>& trace);

}  // namespace pia
