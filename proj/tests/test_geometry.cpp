#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "pia/errors.hpp"
#include "pia/geometry.hpp"

namespace {

pia::GridSpec table_grid() {
  pia::GridSpec spec;
  spec.columns = 4;
  spec.rows = 4;
  spec.pitch = 0.5;
  spec.center_height = 4.0;
  spec.region_width = 0.5;
  spec.region_height = 0.5;
  spec.wavelength = 299792458.0 / 3e9;
  return spec;
}

double min_pair_distance(const pia::ArrayLayout& layout) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < layout.size(); ++i)
    for (std::size_t j = i + 1; j < layout.size(); ++j)
      best = std::min(best,
                      pia::distance(layout.positions[i], layout.positions[j]));
  return best;
}

}  // namespace

TEST_CASE("reference grid spans pitch*(count-1) and centers on h_BS") {
  pia::GridSpec spec = table_grid();
  spec.wavelength = 0.1;
  const pia::ReferenceGrid grid = pia::make_reference_grid(spec);

  REQUIRE(grid.layout.size() == 16);
  REQUIRE(grid.regions.size() == 16);
  CHECK(grid.layout.wavelength == 0.1);

  double y_lo = 1e9, y_hi = -1e9, z_lo = 1e9, z_hi = -1e9, y_sum = 0, z_sum = 0;
  for (const pia::Point2& p : grid.layout.positions) {
    y_lo = std::min(y_lo, p.y);
    y_hi = std::max(y_hi, p.y);
    z_lo = std::min(z_lo, p.z);
    z_hi = std::max(z_hi, p.z);
    y_sum += p.y;
    z_sum += p.z;
  }
  CHECK(y_hi - y_lo == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(z_hi - z_lo == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(std::abs(y_sum / 16) <= 1e-12);
  CHECK(z_sum / 16 == doctest::Approx(4.0).epsilon(1e-15));

  // One box per antenna, centered on its reference position.
  for (std::size_t m = 0; m < grid.regions.size(); ++m) {
    CHECK(grid.regions[m].center.y == grid.layout.positions[m].y);
    CHECK(grid.regions[m].center.z == grid.layout.positions[m].z);
    CHECK(grid.regions[m].width == 0.5);
    CHECK(grid.regions[m].height == 0.5);
  }

  CHECK(pia::check_feasible(grid.layout, grid.regions, 0.05).feasible());
}

TEST_CASE("degenerate one-antenna grid sits at (0, h_BS)") {
  pia::GridSpec spec = table_grid();
  spec.columns = 1;
  spec.rows = 1;
  const pia::ReferenceGrid grid = pia::make_reference_grid(spec);
  REQUIRE(grid.layout.size() == 1);
  CHECK(grid.layout.positions[0].y == 0.0);
  CHECK(grid.layout.positions[0].z == 4.0);
}

TEST_CASE("two-column row splits symmetrically about y = 0") {
  pia::GridSpec spec = table_grid();
  spec.columns = 2;
  spec.rows = 1;
  spec.pitch = 0.5;
  const pia::ReferenceGrid grid = pia::make_reference_grid(spec);
  REQUIRE(grid.layout.size() == 2);
  CHECK(grid.layout.positions[0].y == -0.25);
  CHECK(grid.layout.positions[1].y == 0.25);
  CHECK(grid.layout.positions[0].z == 4.0);
  CHECK(grid.layout.positions[1].z == 4.0);
}

TEST_CASE("grid spec rejects bad dimensions") {
  pia::GridSpec bad = table_grid();
  bad.columns = 0;
  CHECK_THROWS_AS(pia::make_reference_grid(bad), pia::ConfigError);

  bad = table_grid();
  bad.rows = -1;
  CHECK_THROWS_AS(bad.validate(), pia::ConfigError);

  bad = table_grid();
  bad.pitch = 0.0;
  CHECK_THROWS_AS(bad.validate(), pia::ConfigError);

  bad = table_grid();
  bad.region_width = -0.5;
  CHECK_THROWS_AS(bad.validate(), pia::ConfigError);

  bad = table_grid();
  bad.region_height = 0.0;
  CHECK_THROWS_AS(bad.validate(), pia::ConfigError);

  bad = table_grid();
  bad.wavelength = 0.0;
  CHECK_THROWS_AS(bad.validate(), pia::ConfigError);

  bad = table_grid();
  bad.min_separation = -1.0;
  CHECK_THROWS_AS(bad.validate(), pia::ConfigError);

  // Pitch below the region size would let neighboring boxes overlap.
  bad = table_grid();
  bad.pitch = 0.4;
  CHECK_THROWS_AS(bad.validate(), pia::ConfigError);
}

TEST_CASE("separation limit falls back to half a wavelength") {
  pia::GridSpec spec = table_grid();
  spec.wavelength = 0.1;
  spec.min_separation = 0.0;
  CHECK(spec.separation_limit() == 0.05);
  spec.min_separation = 0.2;
  CHECK(spec.separation_limit() == 0.2);
}

TEST_CASE("half-wavelength uniform layout has lambda/2 nearest neighbors") {
  const pia::ArrayLayout hwpa = pia::make_uniform_layout(4, 4, 0.05, 4.0, 0.1);
  REQUIRE(hwpa.size() == 16);
  CHECK(min_pair_distance(hwpa) == doctest::Approx(0.05).epsilon(1e-15));
}

TEST_CASE("uniform layout at grid pitch reproduces the reference grid") {
  pia::GridSpec spec = table_grid();
  const pia::ReferenceGrid grid = pia::make_reference_grid(spec);
  const pia::ArrayLayout uspa = pia::make_uniform_layout(
      spec.columns, spec.rows, spec.pitch, spec.center_height, spec.wavelength);
  REQUIRE(uspa.size() == grid.layout.size());
  for (std::size_t m = 0; m < uspa.size(); ++m) {
    CHECK(uspa.positions[m].y == grid.layout.positions[m].y);
    CHECK(uspa.positions[m].z == grid.layout.positions[m].z);
  }
}

TEST_CASE("2x2 uniform layout is hand-countable") {
  const pia::ArrayLayout layout = pia::make_uniform_layout(2, 2, 1.0, 10.0, 0.1);
  REQUIRE(layout.size() == 4);
  CHECK(layout.positions[0].y == -0.5);
  CHECK(layout.positions[0].z == 9.5);
  CHECK(layout.positions[1].y == 0.5);
  CHECK(layout.positions[1].z == 9.5);
  CHECK(layout.positions[2].y == -0.5);
  CHECK(layout.positions[2].z == 10.5);
  CHECK(layout.positions[3].y == 0.5);
  CHECK(layout.positions[3].z == 10.5);
}

TEST_CASE("uniform layout rejects bad arguments") {
  CHECK_THROWS_AS(pia::make_uniform_layout(0, 4, 0.05, 4.0, 0.1),
                  pia::ConfigError);
  CHECK_THROWS_AS(pia::make_uniform_layout(4, 4, 0.0, 4.0, 0.1),
                  pia::ConfigError);
  CHECK_THROWS_AS(pia::make_uniform_layout(4, 4, 0.05, 4.0, -0.1),
                  pia::ConfigError);
}

TEST_CASE("coincident antennas violate the pair constraint") {
  pia::ArrayLayout layout;
  layout.wavelength = 0.1;
  layout.positions = {{0.0, 4.0}, {0.0, 4.0}};
  std::vector<pia::MovementRegion> regions = {{{0.0, 4.0}, 1.0, 1.0},
                                              {{0.0, 4.0}, 1.0, 1.0}};
  const pia::FeasibilityReport report =
      pia::check_feasible(layout, regions, 0.05);
  CHECK(report.out_of_region.empty());
  REQUIRE(report.close_pairs.size() == 1);
  CHECK(report.close_pairs[0].first == 0);
  CHECK(report.close_pairs[0].second == 1);
  CHECK(report.close_pairs[0].distance == 0.0);
  CHECK_FALSE(report.feasible());
}

TEST_CASE("box boundaries are feasible and the pair test is strict") {
  std::vector<pia::MovementRegion> regions = {{{0.0, 4.0}, 0.5, 0.5},
                                              {{5.0, 4.0}, 0.5, 0.5}};
  pia::ArrayLayout layout;
  layout.wavelength = 0.1;
  // First antenna exactly on its right edge.
  layout.positions = {{0.25, 4.0}, {5.0, 4.0}};
  CHECK(pia::check_feasible(layout, regions, 0.05).feasible());

  // A pair at exactly min_sep passes; strictly closer fails.
  std::vector<pia::MovementRegion> wide = {{{0.0, 4.0}, 2.0, 2.0},
                                           {{0.0, 4.0}, 2.0, 2.0}};
  layout.positions = {{0.0, 4.0}, {0.05, 4.0}};
  CHECK(pia::check_feasible(layout, wide, 0.05).feasible());
  layout.positions = {{0.0, 4.0}, {0.049, 4.0}};
  CHECK_FALSE(pia::check_feasible(layout, wide, 0.05).feasible());
}

TEST_CASE("out-of-region excess is signed") {
  std::vector<pia::MovementRegion> regions = {{{0.0, 4.0}, 0.5, 0.5}};
  pia::ArrayLayout layout;
  layout.wavelength = 0.1;
  layout.positions = {{0.35, 3.6}};
  const pia::FeasibilityReport report =
      pia::check_feasible(layout, regions, 0.05);
  REQUIRE(report.out_of_region.size() == 1);
  CHECK(report.out_of_region[0].antenna == 0);
  CHECK(report.out_of_region[0].excess_y == doctest::Approx(0.1));
  CHECK(report.out_of_region[0].excess_z == doctest::Approx(-0.15));
}

TEST_CASE("check_feasible rejects mismatched lengths") {
  pia::ArrayLayout layout;
  layout.positions = {{0.0, 4.0}};
  std::vector<pia::MovementRegion> regions;
  CHECK_THROWS_AS(pia::check_feasible(layout, regions, 0.05),
                  std::invalid_argument);
  CHECK_THROWS_AS(pia::repair(layout, regions, 0.05), std::invalid_argument);
}

TEST_CASE("repair returns feasible inputs unchanged") {
  const pia::ReferenceGrid grid = pia::make_reference_grid(table_grid());
  const auto repaired = pia::repair(grid.layout, grid.regions, 0.05);
  REQUIRE(repaired.has_value());
  for (std::size_t m = 0; m < grid.layout.size(); ++m) {
    CHECK(repaired->positions[m].y == grid.layout.positions[m].y);
    CHECK(repaired->positions[m].z == grid.layout.positions[m].z);
  }
}

TEST_CASE("repair clamps a runaway antenna back to its box edge") {
  std::vector<pia::MovementRegion> regions = {{{1.0, 4.0}, 0.5, 0.5}};
  pia::ArrayLayout layout;
  layout.wavelength = 0.1;
  layout.positions = {{1.5, 4.0}};  // center + (L_h, 0)
  const auto repaired = pia::repair(layout, regions, 0.05);
  REQUIRE(repaired.has_value());
  CHECK(repaired->positions[0].y == 1.25);
  CHECK(repaired->positions[0].z == 4.0);
}

TEST_CASE("repair pushes a close pair apart to the separation limit") {
  // Two boxes sharing the y = 0 edge, antennas 0.04 m apart across it.
  std::vector<pia::MovementRegion> regions = {{{-0.5, 4.0}, 1.0, 1.0},
                                              {{0.5, 4.0}, 1.0, 1.0}};
  pia::ArrayLayout layout;
  layout.wavelength = 0.1;
  layout.positions = {{-0.02, 4.0}, {0.02, 4.0}};
  const auto repaired = pia::repair(layout, regions, 0.05);
  REQUIRE(repaired.has_value());
  const double d =
      pia::distance(repaired->positions[0], repaired->positions[1]);
  CHECK(d >= 0.05 - pia::kSeparationSlack);
  CHECK(pia::check_feasible(*repaired, regions, 0.05 - pia::kSeparationSlack)
            .feasible());

  // Idempotence: a layout repair declared feasible is a fixed point.
  const auto again = pia::repair(*repaired, regions, 0.05);
  REQUIRE(again.has_value());
  for (std::size_t m = 0; m < repaired->size(); ++m) {
    CHECK(again->positions[m].y == repaired->positions[m].y);
    CHECK(again->positions[m].z == repaired->positions[m].z);
  }
}

TEST_CASE("repair splits coincident antennas along +y") {
  std::vector<pia::MovementRegion> regions = {{{0.0, 4.0}, 1.0, 1.0},
                                              {{0.0, 4.0}, 1.0, 1.0}};
  pia::ArrayLayout layout;
  layout.wavelength = 0.1;
  layout.positions = {{0.1, 4.2}, {0.1, 4.2}};
  const auto repaired = pia::repair(layout, regions, 0.05);
  REQUIRE(repaired.has_value());
  CHECK(repaired->positions[0].y == doctest::Approx(0.075));
  CHECK(repaired->positions[1].y == doctest::Approx(0.125));
  CHECK(repaired->positions[0].z == 4.2);
  CHECK(repaired->positions[1].z == 4.2);
}

TEST_CASE("repair reports failure when boxes cannot hold the separation") {
  // Both boxes are 1 cm wide around the same center; no placement reaches
  // a 1 m pair distance.
  std::vector<pia::MovementRegion> regions = {{{0.0, 4.0}, 0.01, 0.01},
                                              {{0.0, 4.0}, 0.01, 0.01}};
  pia::ArrayLayout layout;
  layout.wavelength = 0.1;
  layout.positions = {{0.0, 4.0}, {0.001, 4.0}};
  CHECK_FALSE(pia::repair(layout, regions, 1.0).has_value());
}

TEST_CASE("layout text round-trips doubles exactly") {
  pia::ArrayLayout layout;
  layout.wavelength = 0.0999308193333333;
  layout.positions = {{-0.75, 3.25},
                      {0.1234567890123456, 4.000000000000001},
                      {1.0 / 3.0, 2.0 / 3.0}};
  const std::string text = pia::format_layout(layout);
  CHECK(text.rfind("# array-layout v1 M=3 lambda=", 0) == 0);

  const pia::ArrayLayout back = pia::parse_layout(text);
  REQUIRE(back.size() == 3);
  CHECK(back.wavelength == layout.wavelength);
  for (std::size_t m = 0; m < 3; ++m) {
    CHECK(back.positions[m].y == layout.positions[m].y);
    CHECK(back.positions[m].z == layout.positions[m].z);
  }
}

TEST_CASE("layout parser rejects malformed files") {
  CHECK_THROWS_AS(pia::parse_layout(""), pia::ConfigError);
  CHECK_THROWS_AS(pia::parse_layout("not a layout\n0 0 0\n"), pia::ConfigError);
  CHECK_THROWS_AS(pia::parse_layout("# array-layout v1 M=0 lambda=0.1\n"),
                  pia::ConfigError);
  CHECK_THROWS_AS(pia::parse_layout("# array-layout v1 M=1 lambda=-0.1\n"),
                  pia::ConfigError);
  // Declared M disagrees with the row count.
  CHECK_THROWS_AS(
      pia::parse_layout("# array-layout v1 M=2 lambda=0.1\n0 0.0 4.0\n"),
      pia::ConfigError);
  // Indices must increase.
  CHECK_THROWS_AS(pia::parse_layout(
                      "# array-layout v1 M=2 lambda=0.1\n1 0.0 4.0\n0 1.0 4.0\n"),
                  pia::ConfigError);
  CHECK_THROWS_AS(pia::parse_layout(
                      "# array-layout v1 M=2 lambda=0.1\n0 0.0 4.0\n0 1.0 4.0\n"),
                  pia::ConfigError);
  // Coordinates must be finite numbers.
  CHECK_THROWS_AS(
      pia::parse_layout("# array-layout v1 M=1 lambda=0.1\n0 nan 4.0\n"),
      pia::ConfigError);
  CHECK_THROWS_AS(
      pia::parse_layout("# array-layout v1 M=1 lambda=0.1\n0 x 4.0\n"),
      pia::ConfigError);
}

TEST_CASE("save and load round-trip through a file") {
  pia::ArrayLayout layout;
  layout.wavelength = 0.1;
  layout.positions = {{-0.25, 4.0}, {0.25, 4.0}};
  const std::string path = "geometry_roundtrip_layout.txt";
  pia::save_layout(layout, path);
  const pia::ArrayLayout back = pia::load_layout(path);
  REQUIRE(back.size() == 2);
  CHECK(back.positions[0].y == -0.25);
  CHECK(back.positions[1].y == 0.25);
  CHECK_THROWS_AS(pia::load_layout("does_not_exist_layout.txt"),
                  pia::ConfigError);
  std::remove(path.c_str());
}
