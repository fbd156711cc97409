#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace pia {

/// Coordinate in the BS array plane. Every BS element sits at x = 0, so a
/// (y, z) pair in meters identifies it fully.
struct Point2 {
  double y = 0.0;
  double z = 0.0;
};

double distance(const Point2& a, const Point2& b);

/// BS array geometry: antenna coordinates in the yz-plane plus the carrier
/// wavelength they were designed for.
struct ArrayLayout {
  std::vector<Point2> positions;
  double wavelength = 0.0;  // meters

  std::size_t size() const { return positions.size(); }
};

/// Axis-aligned closed box one antenna may occupy.
struct MovementRegion {
  Point2 center;
  double width = 0.0;   // extent along y (L_h)
  double height = 0.0;  // extent along z (L_v)

  bool contains(const Point2& p) const;
  Point2 clamped(const Point2& p) const;
  double y_min() const { return center.y - 0.5 * width; }
  double y_max() const { return center.y + 0.5 * width; }
  double z_min() const { return center.z - 0.5 * height; }
  double z_max() const { return center.z + 0.5 * height; }
};

/// Reference grid for the BS: a sparse uniform planar arrangement of
/// `rows x columns` positions with one movement region per antenna.
struct GridSpec {
  int columns = 4;              // M_h
  int rows = 4;                 // M_v
  double pitch = 0.0;           // reference-grid spacing, meters
  double center_height = 0.0;   // grid center above ground, meters
  double region_width = 0.0;    // L_h, meters
  double region_height = 0.0;   // L_v, meters
  double min_separation = 0.0;  // pairwise limit; <= 0 means wavelength / 2
  double wavelength = 0.0;      // meters

  int antenna_count() const { return columns * rows; }
  double separation_limit() const {
    return min_separation > 0.0 ? min_separation : 0.5 * wavelength;
  }
  /// Throws ConfigError on nonpositive dimensions or overlapping regions
  /// (pitch < max(region_width, region_height)).
  void validate() const;
};

struct ReferenceGrid {
  ArrayLayout layout;                   // the reference positions themselves
  std::vector<MovementRegion> regions;  // one box per antenna, same order
};

/// Builds the reference grid: columns spaced by `pitch` centered at y = 0,
/// rows centered at z = center_height, plus the movement box around each
/// position. With pitch equal to 5 wavelengths the layout is the sparse
/// uniform benchmark array.
ReferenceGrid make_reference_grid(const GridSpec& spec);

/// Regular grid layout with the given nearest-neighbor spacing; spacing of
/// half a wavelength gives the compact uniform benchmark, 5 wavelengths the
/// sparse one.
ArrayLayout make_uniform_layout(int columns, int rows, double spacing,
                                double center_height, double wavelength);

/// Constraint violations for one layout: antennas outside their closed box
/// and antenna pairs closer than the separation limit.
struct FeasibilityReport {
  struct OutOfRegion {
    std::size_t antenna = 0;
    double excess_y = 0.0;  // signed distance beyond the box, 0 if inside
    double excess_z = 0.0;
  };
  struct ClosePair {
    std::size_t first = 0;  // first < second
    std::size_t second = 0;
    double distance = 0.0;
  };

  std::vector<OutOfRegion> out_of_region;
  std::vector<ClosePair> close_pairs;

  bool feasible() const { return out_of_region.empty() && close_pairs.empty(); }
};

/// Region membership uses closed boxes (boundary points are feasible); pair
/// violations are strict (distance < min_sep). Throws std::invalid_argument
/// when layout and regions differ in length.
FeasibilityReport check_feasible(const ArrayLayout& layout,
                                 const std::vector<MovementRegion>& regions,
                                 double min_sep);

/// Deterministic constraint repair: clamp into boxes, then sweep over pairs
/// pushing violating pairs apart symmetrically to the separation limit
/// (coincident points split along +y) and re-clamp, up to max_passes sweeps.
/// Feasible inputs come back unchanged. Returns nullopt when the sweeps fail
/// to reach a feasible point; the feasibility test allows 1e-12 m of slack
/// on pair distances to absorb rounding in the push step.
std::optional<ArrayLayout> repair(const ArrayLayout& layout,
                                  const std::vector<MovementRegion>& regions,
                                  double min_sep, int max_passes = 32);

/// Pair-distance slack accepted by repair's own feasibility test.
inline constexpr double kSeparationSlack = 1e-12;

// Layout text format: header "# array-layout v1 M=<int> lambda=<float>"
// followed by one "<index> <y> <z>" line per antenna. Values carry 17
// significant digits so import/export round-trips doubles exactly.
std::string format_layout(const ArrayLayout& layout);
ArrayLayout parse_layout(const std::string& text);
void save_layout(const ArrayLayout& layout, const std::string& path);
ArrayLayout load_layout(const std::string& path);

}  // namespace pia
