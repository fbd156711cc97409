#include "pia/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pia/errors.hpp"

namespace pia {

double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.y - b.y, a.z - b.z);
}

bool MovementRegion::contains(const Point2& p) const {
  return p.y >= y_min() && p.y <= y_max() && p.z >= z_min() && p.z <= z_max();
}

Point2 MovementRegion::clamped(const Point2& p) const {
  return {std::clamp(p.y, y_min(), y_max()), std::clamp(p.z, z_min(), z_max())};
}

void GridSpec::validate() const {
  if (columns < 1) throw ConfigError("grid.m_h must be >= 1");
  if (rows < 1) throw ConfigError("grid.m_v must be >= 1");
  if (!(pitch > 0.0)) throw ConfigError("grid.pitch_m must be positive");
  if (!(region_width > 0.0)) throw ConfigError("grid.l_h_m must be positive");
  if (!(region_height > 0.0)) throw ConfigError("grid.l_v_m must be positive");
  if (!(wavelength > 0.0)) throw ConfigError("grid wavelength must be positive");
  if (min_separation < 0.0) throw ConfigError("grid.min_sep_m must be >= 0");
  if (pitch < std::max(region_width, region_height))
    throw ConfigError(
        "grid.pitch_m smaller than the movement region: regions would overlap");
}

namespace {

std::vector<Point2> grid_positions(int columns, int rows, double spacing,
                                   double center_height) {
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(columns) * rows);
  for (int r = 0; r < rows; ++r) {
    const double z = center_height + (r - 0.5 * (rows - 1)) * spacing;
    for (int c = 0; c < columns; ++c) {
      const double y = (c - 0.5 * (columns - 1)) * spacing;
      out.push_back({y, z});
    }
  }
  return out;
}

}  // namespace

ReferenceGrid make_reference_grid(const GridSpec& spec) {
  spec.validate();
  ReferenceGrid grid;
  grid.layout.wavelength = spec.wavelength;
  grid.layout.positions =
      grid_positions(spec.columns, spec.rows, spec.pitch, spec.center_height);
  grid.regions.reserve(grid.layout.positions.size());
  for (const Point2& p : grid.layout.positions)
    grid.regions.push_back({p, spec.region_width, spec.region_height});
  return grid;
}

ArrayLayout make_uniform_layout(int columns, int rows, double spacing,
                                double center_height, double wavelength) {
  if (columns < 1 || rows < 1)
    throw ConfigError("uniform layout needs at least one row and column");
  if (!(spacing > 0.0)) throw ConfigError("antenna spacing must be positive");
  if (!(wavelength > 0.0)) throw ConfigError("wavelength must be positive");
  return {grid_positions(columns, rows, spacing, center_height), wavelength};
}

FeasibilityReport check_feasible(const ArrayLayout& layout,
                                 const std::vector<MovementRegion>& regions,
                                 double min_sep) {
  if (layout.size() != regions.size())
    throw std::invalid_argument("check_feasible: layout and regions differ in length");
  FeasibilityReport report;
  const std::size_t m = layout.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Point2& p = layout.positions[i];
    const MovementRegion& box = regions[i];
    if (!box.contains(p)) {
      double ey = 0.0, ez = 0.0;
      if (p.y < box.y_min()) ey = p.y - box.y_min();
      if (p.y > box.y_max()) ey = p.y - box.y_max();
      if (p.z < box.z_min()) ez = p.z - box.z_min();
      if (p.z > box.z_max()) ez = p.z - box.z_max();
      report.out_of_region.push_back({i, ey, ez});
    }
  }
  for (std::size_t i = 0; i + 1 < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = distance(layout.positions[i], layout.positions[j]);
      if (d < min_sep) report.close_pairs.push_back({i, j, d});
    }
  return report;
}

std::optional<ArrayLayout> repair(const ArrayLayout& layout,
                                  const std::vector<MovementRegion>& regions,
                                  double min_sep, int max_passes) {
  if (layout.size() != regions.size())
    throw std::invalid_argument("repair: layout and regions differ in length");

  ArrayLayout out = layout;
  const std::size_t m = out.size();
  auto clamp_all = [&] {
    for (std::size_t i = 0; i < m; ++i)
      out.positions[i] = regions[i].clamped(out.positions[i]);
  };

  clamp_all();
  for (int pass = 0; pass < max_passes; ++pass) {
    bool pushed = false;
    for (std::size_t i = 0; i + 1 < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        Point2& a = out.positions[i];
        Point2& b = out.positions[j];
        const double d = distance(a, b);
        if (d >= min_sep - kSeparationSlack) continue;
        pushed = true;
        const Point2 mid{0.5 * (a.y + b.y), 0.5 * (a.z + b.z)};
        double uy = 0.0, uz = 0.0;
        if (d < 1e-15) {
          uy = 1.0;  // coincident points split along +y
        } else {
          uy = (b.y - a.y) / d;
          uz = (b.z - a.z) / d;
        }
        const double half = 0.5 * min_sep;
        a = {mid.y - half * uy, mid.z - half * uz};
        b = {mid.y + half * uy, mid.z + half * uz};
      }
    if (!pushed) break;
    clamp_all();
  }

  if (!check_feasible(out, regions, min_sep - kSeparationSlack).feasible())
    return std::nullopt;
  return out;
}

std::string format_layout(const ArrayLayout& layout) {
  std::string text;
  char line[128];
  std::snprintf(line, sizeof line, "# array-layout v1 M=%zu lambda=%.17g\n",
                layout.size(), layout.wavelength);
  text += line;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu %.17g %.17g\n", i,
                  layout.positions[i].y, layout.positions[i].z);
    text += line;
  }
  return text;
}

ArrayLayout parse_layout(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header))
    throw ConfigError("layout file is empty");

  std::size_t m = 0;
  double lambda = 0.0;
  if (std::sscanf(header.c_str(), "# array-layout v1 M=%zu lambda=%lg", &m,
                  &lambda) != 2)
    throw ConfigError("layout file header is not '# array-layout v1 M=<int> lambda=<float>'");
  if (m == 0) throw ConfigError("layout file declares M=0");
  if (!(lambda > 0.0)) throw ConfigError("layout file declares nonpositive lambda");

  ArrayLayout layout;
  layout.wavelength = lambda;
  layout.positions.reserve(m);
  long long previous_index = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    long long index = 0;
    double y = 0.0, z = 0.0;
    if (std::sscanf(line.c_str(), "%lld %lg %lg", &index, &y, &z) != 3)
      throw ConfigError("layout file row is not '<index> <y> <z>': " + line);
    if (index <= previous_index)
      throw ConfigError("layout file indices must be strictly increasing");
    previous_index = index;
    if (!std::isfinite(y) || !std::isfinite(z))
      throw ConfigError("layout file contains non-finite coordinates");
    layout.positions.push_back({y, z});
  }
  if (layout.size() != m)
    throw ConfigError("layout file declares M=" + std::to_string(m) + " but has " +
                      std::to_string(layout.size()) + " rows");
  return layout;
}

void save_layout(const ArrayLayout& layout, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open layout file for writing: " + path);
  out << format_layout(layout);
  if (!out) throw ConfigError("failed writing layout file: " + path);
}

ArrayLayout load_layout(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open layout file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_layout(buffer.str());
}

}  // namespace pia
