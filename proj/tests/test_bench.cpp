#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pia/bench.hpp"
#include "pia/errors.hpp"
#include "pia/geometry.hpp"
#include "pia/rng.hpp"

namespace {

pia::ScenarioConfig pair_scenario() {
  pia::ScenarioConfig sc = pia::default_scenario();
  sc.users = 2;
  sc.ue_antennas = 2;
  return sc;
}

pia::GridSpec pair_grid(const pia::ScenarioConfig& sc, int side) {
  const double lambda = sc.wavelength();
  pia::GridSpec grid;
  grid.columns = side;
  grid.rows = side;
  grid.pitch = 5.0 * lambda;
  grid.center_height = 40.0 * lambda;
  grid.region_width = 5.0 * lambda;
  grid.region_height = 5.0 * lambda;
  grid.wavelength = lambda;
  return grid;
}

pia::EvalReport fake_report(const std::string& scheme,
                            std::vector<double> values) {
  std::vector<std::uint64_t> seeds;
  for (std::size_t q = 0; q < values.size(); ++q) seeds.push_back(900 + q);
  return pia::finalize_report(scheme, std::move(values), std::move(seeds));
}

}  // namespace

TEST_CASE("finalize_report computes population statistics") {
  const pia::EvalReport report = fake_report("x", {1.0, 2.0, 3.0, 4.0});
  CHECK(report.drops() == 4);
  CHECK(report.mean == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(report.stddev == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
  CHECK(report.variability ==
        doctest::Approx(std::sqrt(1.25) / 2.5).epsilon(1e-15));

  const pia::EvalReport single = fake_report("x", {5.0});
  CHECK(single.mean == 5.0);
  CHECK(single.stddev == 0.0);
  CHECK(single.variability == 0.0);

  // Nonpositive means cannot be normalized.
  CHECK(fake_report("x", {-1.0, -3.0}).variability == 0.0);

  CHECK_THROWS_AS(pia::finalize_report("x", {1.0, 2.0}, {7}),
                  std::invalid_argument);
}

TEST_CASE("cdf is the sorted empirical distribution") {
  const pia::EvalReport report = fake_report("x", {3.0, 1.0, 2.0});
  const std::vector<pia::CdfPoint> cdf = report.cdf();
  REQUIRE(cdf.size() == 3);
  CHECK(cdf[0].value == 1.0);
  CHECK(cdf[1].value == 2.0);
  CHECK(cdf[2].value == 3.0);
  CHECK(cdf[0].probability == doctest::Approx(1.0 / 3.0));
  CHECK(cdf[1].probability == doctest::Approx(2.0 / 3.0));
  CHECK(cdf[2].probability == 1.0);

  // The cdf is a reshuffling of the raw values: it reproduces the mean.
  double mean = 0.0;
  for (const pia::CdfPoint& p : cdf) mean += p.value;
  CHECK(mean / 3.0 == doctest::Approx(report.mean).epsilon(1e-12));
}

TEST_CASE("fingerprint keys on the drop seed list") {
  const pia::EvalReport a = fake_report("a", {1.0, 2.0});
  const pia::EvalReport b = fake_report("b", {9.0, 8.0});
  CHECK(a.fingerprint() == b.fingerprint());  // same seed construction

  pia::EvalReport other = fake_report("a", {1.0, 2.0});
  other.drop_seeds[1] ^= 1;
  CHECK(other.fingerprint() != a.fingerprint());
}

TEST_CASE("held-out drops are seed-derived per index") {
  const pia::ScenarioConfig sc = pair_scenario();
  const pia::EvalDrops drops = pia::sample_eval_drops(sc, 5, 77);
  REQUIRE(drops.drops.size() == 5);
  REQUIRE(drops.seeds.size() == 5);
  for (int q = 0; q < 5; ++q)
    CHECK(drops.seeds[q] ==
          pia::derive_seed(77, pia::Stream::eval_drops,
                           static_cast<std::uint64_t>(q)));

  const pia::EvalDrops again = pia::sample_eval_drops(sc, 5, 77);
  for (int q = 0; q < 5; ++q)
    for (int i = 0; i < sc.users; ++i) {
      CHECK(drops.drops[q].users[i].x == again.drops[q].users[i].x);
      CHECK(drops.drops[q].users[i].y == again.drops[q].users[i].y);
    }

  CHECK_THROWS_AS(pia::sample_eval_drops(sc, 0, 77), pia::ConfigError);
}

TEST_CASE("evaluate_fixed is thread-invariant and pairs across schemes") {
  const pia::ScenarioConfig sc = pia::default_scenario();
  const double lambda = sc.wavelength();
  const pia::ArrayLayout uspa = pia::make_uniform_layout(
      4, 4, 5.0 * lambda, 40.0 * lambda, lambda);
  const pia::ArrayLayout hwpa = pia::make_uniform_layout(
      4, 4, 0.5 * lambda, 40.0 * lambda, lambda);

  const pia::EvalReport sparse =
      pia::evaluate_fixed(uspa, sc, 100, 5, 1, "uspa");
  const pia::EvalReport sparse_wide =
      pia::evaluate_fixed(uspa, sc, 100, 5, 3, "uspa");
  const pia::EvalReport compact =
      pia::evaluate_fixed(hwpa, sc, 100, 5, 2, "hwpa");

  REQUIRE(sparse.values.size() == 100);
  for (std::size_t q = 0; q < sparse.values.size(); ++q) {
    CHECK(sparse.values[q] == sparse_wide.values[q]);
    CHECK(sparse.values[q] > 0.0);
  }
  CHECK(sparse.fingerprint() == compact.fingerprint());

  // The wide aperture resolves near-field users that the half-wavelength
  // panel cannot separate.
  CHECK(sparse.mean > compact.mean);

  const pia::Comparison comparison = pia::compare({sparse, compact});
  CHECK(comparison.schemes == std::vector<std::string>{"uspa", "hwpa"});
  CHECK(comparison.gap_percent[0][1] > 0.0);
  CHECK(comparison.gap_percent[0][0] == 0.0);
}

TEST_CASE("evaluate_ma re-optimizes per drop deterministically") {
  const pia::ScenarioConfig sc = pair_scenario();
  const pia::GridSpec grid = pair_grid(sc, 2);
  pia::PsoConfig pso;
  pso.particles = 6;
  pso.iterations = 2;
  pso.drops_per_iteration = 1;
  pso.seed = 4;

  const pia::EvalReport a = pia::evaluate_ma(grid, sc, pso, 3, 55, 1);
  const pia::EvalReport b = pia::evaluate_ma(grid, sc, pso, 3, 55, 2);
  CHECK(a.scheme == "ma");
  REQUIRE(a.values.size() == 3);
  for (std::size_t q = 0; q < 3; ++q) CHECK(a.values[q] == b.values[q]);

  // Paired with any fixed evaluation on the same drop stream.
  const pia::ArrayLayout uspa = pia::make_uniform_layout(
      2, 2, grid.pitch, grid.center_height, grid.wavelength);
  const pia::EvalReport fixed = pia::evaluate_fixed(uspa, sc, 3, 55, 1, "uspa");
  CHECK(a.fingerprint() == fixed.fingerprint());
}

TEST_CASE("compare computes pairwise percentage gaps") {
  const pia::EvalReport first = fake_report("ma", {10.0, 10.0});
  const pia::EvalReport second = fake_report("pia", {8.0, 8.0});
  const pia::Comparison comparison = pia::compare({first, second});
  CHECK(comparison.means[0] == 10.0);
  CHECK(comparison.gap_percent[0][1] == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(comparison.gap_percent[1][0] == doctest::Approx(-25.0).epsilon(1e-12));
  CHECK(comparison.gap_percent[0][0] == 0.0);
  CHECK(comparison.fingerprint == first.fingerprint());

  pia::EvalReport mismatched = fake_report("x", {1.0, 2.0});
  mismatched.drop_seeds[0] ^= 1;
  CHECK_THROWS_AS(pia::compare({first, mismatched}), pia::ConfigError);
  CHECK_THROWS_AS(pia::compare({first, fake_report("y", {1.0})}),
                  pia::ConfigError);
  CHECK_THROWS_AS(pia::compare({}), pia::ConfigError);
}

TEST_CASE("bootstrap standard errors behave") {
  const pia::EvalReport a =
      fake_report("a", {3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0});
  CHECK(pia::bootstrap_se_mean_diff(a, a) == 0.0);
  CHECK(pia::bootstrap_se_variability_diff(a, a) == 0.0);

  pia::EvalReport b =
      fake_report("b", {2.0, 5.0, 4.0, 8.0, 6.0, 9.0, 7.0, 12.0});
  const double se = pia::bootstrap_se_mean_diff(a, b);
  CHECK(se > 0.0);
  CHECK(se == pia::bootstrap_se_mean_diff(a, b));  // seeded, reproducible
  CHECK(se != pia::bootstrap_se_mean_diff(a, b, 256, 8));

  CHECK_THROWS_AS(pia::bootstrap_se_mean_diff(a, b, 1), std::invalid_argument);
  pia::EvalReport unpaired = fake_report("c", {1.0, 2.0});
  CHECK_THROWS_AS(pia::bootstrap_se_mean_diff(a, unpaired), pia::ConfigError);
}

TEST_CASE("report json round-trips exactly") {
  pia::EvalReport report = fake_report("pia", {1.0 / 3.0, 2.0 / 7.0, 5.5});
  report.drop_seeds = {0, 1, 18446744073709551615ULL};
  report = pia::finalize_report(report.scheme, report.values,
                                report.drop_seeds);

  const std::string text = pia::report_to_json(report);
  const pia::EvalReport back = pia::report_from_json(text);
  CHECK(back.scheme == report.scheme);
  REQUIRE(back.values.size() == 3);
  for (std::size_t q = 0; q < 3; ++q) {
    CHECK(back.values[q] == report.values[q]);
    CHECK(back.drop_seeds[q] == report.drop_seeds[q]);
  }
  CHECK(back.mean == report.mean);
  CHECK(back.fingerprint() == report.fingerprint());

  CHECK_THROWS_AS(pia::report_from_json("not json"), pia::ConfigError);
  CHECK_THROWS_AS(pia::report_from_json("{\"scheme\":\"x\"}"),
                  pia::ConfigError);
  CHECK_THROWS_AS(
      pia::report_from_json("{\"scheme\":\"x\",\"params\":{\"drop_seeds\":[1]},"
                            "\"drops\":[1.0,2.0]}"),
      pia::ConfigError);
}

TEST_CASE("report csv lists one labeled row per drop") {
  const pia::EvalReport report = fake_report("hwpa", {1.5, 2.5});
  CHECK(pia::report_to_csv(report) ==
        "scheme,drop,sum_rate_bps_hz\n"
        "hwpa,0,1.5\n"
        "hwpa,1,2.5\n");
}

TEST_CASE("comparison exports carry the gap matrix") {
  const pia::Comparison comparison =
      pia::compare({fake_report("ma", {10.0, 10.0}),
                    fake_report("pia", {8.0, 8.0})});
  const std::string json = pia::comparison_to_json(comparison);
  CHECK(json.find("\"schemes\":[\"ma\",\"pia\"]") != std::string::npos);
  CHECK(json.find("\"gap_percent\":[[0,20],[-25,0]]") != std::string::npos);

  const std::string csv = pia::comparison_to_csv(comparison);
  CHECK(csv.rfind("scheme,mean,std,variability_ratio,"
                  "gap_from_ma_percent,gap_from_pia_percent\n",
                  0) == 0);
  CHECK(csv.find("\nma,10,0,0,0,-25\n") != std::string::npos);
  CHECK(csv.find("\npia,8,0,0,20,0\n") != std::string::npos);
}

TEST_CASE("sweep scores all four schemes on shared drops") {
  const pia::ScenarioConfig sc = pair_scenario();
  const pia::GridSpec base = pair_grid(sc, 4);  // column/row counts overridden
  pia::PsoConfig pso;
  pso.particles = 4;
  pso.iterations = 2;
  pso.drops_per_iteration = 2;
  pso.seed = 6;

  const pia::SweepResult sweep =
      pia::sweep_antennas({2}, base, sc, pso, 3, 91, 1);
  REQUIRE(sweep.rows.size() == 4);
  REQUIRE(sweep.reports.size() == 4);
  CHECK(sweep.m_sides == std::vector<int>{2});
  CHECK(sweep.rows[0].scheme == "ma");
  CHECK(sweep.rows[1].scheme == "pia");
  CHECK(sweep.rows[2].scheme == "uspa");
  CHECK(sweep.rows[3].scheme == "hwpa");
  for (const pia::SweepRow& row : sweep.rows) CHECK(row.m_side == 2);

  const std::uint64_t fp = sweep.reports[0].fingerprint();
  for (const pia::EvalReport& report : sweep.reports) {
    CHECK(report.fingerprint() == fp);
    CHECK(report.drops() == 3);
  }

  const pia::EvalReport* pia_report = sweep.report(2, "pia");
  REQUIRE(pia_report != nullptr);
  CHECK(pia_report->mean == sweep.rows[1].mean);
  CHECK(sweep.report(2, "nope") == nullptr);
  CHECK(sweep.report(3, "pia") == nullptr);

  const std::string csv = pia::sweep_to_csv(sweep);
  CHECK(csv.rfind("m_side,scheme,mean,std,variability_ratio\n", 0) == 0);
  const std::string json = pia::sweep_to_json(sweep);
  CHECK(json.find("\"m_sides\":[2]") != std::string::npos);
  CHECK(json.find("\"reports\":[{\"scheme\":\"ma\"") != std::string::npos);

  CHECK_THROWS_AS(pia::sweep_antennas({}, base, sc, pso, 3, 91, 1),
                  pia::ConfigError);
  CHECK_THROWS_AS(pia::sweep_antennas({0}, base, sc, pso, 3, 91, 1),
                  pia::ConfigError);
}
