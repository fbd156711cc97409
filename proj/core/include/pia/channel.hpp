#pragma once

#include <armadillo>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pia/geometry.hpp"
#include "pia/rng.hpp"

namespace pia {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Deployment scenario: carrier, user population geometry, and link budget.
/// Lengths are meters, angles radians, powers watts.
struct ScenarioConfig {
  double carrier_hz = 3.0e9;  // f_c
  int users = 6;              // K
  int ue_antennas = 2;        // N; vertical uniform linear array per UE
  double ue_spacing_m = 0.0;  // antenna spacing at the UE
  double ue_height_m = 1.25;  // height of the lowest UE antenna
  double rho_min_m = 0.0;     // radial sampling limits
  double rho_max_m = 0.0;
  double phi_min_rad = 0.0;   // azimuth sampling limits
  double phi_max_rad = 0.0;
  double noise_w = 3.98e-12;  // noise power per receive antenna
  double power_w = 50.0;      // total BS transmit power budget
  double bandwidth_hz = 1e8;  // reporting only; rates are per Hz

  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  int total_ue_antennas() const { return users * ue_antennas; }
  void validate() const;  // throws ConfigError naming the offending field
};

/// The reference scenario: 3 GHz carrier, six dual-antenna users with
/// one-wavelength element spacing, radial range [20, 5000] wavelengths and a
/// 120-degree sector, 50 W budget against 3.98 pW noise.
ScenarioConfig default_scenario();

/// One sampled user position (polar and cartesian, ground plane).
struct UserPosition {
  double rho = 0.0;
  double phi = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// One realization of all K user positions.
struct UserDrop {
  std::vector<UserPosition> users;
};

/// Height of a UE's antenna `element` (0-based) above ground.
inline double ue_antenna_height(const ScenarioConfig& scenario, int element) {
  return scenario.ue_height_m + element * scenario.ue_spacing_m;
}

/// Draws one drop: per user, radius uniform in [rho_min, rho_max] and azimuth
/// uniform in [phi_min, phi_max], independently. Deterministic given the rng.
UserDrop sample_drop(const ScenarioConfig& scenario, Rng& rng);

/// The K per-user channel matrices for one (layout, drop) pair.
struct ChannelSet {
  std::vector<arma::cx_mat> per_user;  // each N x M
  std::uint64_t layout_id = 0;
  std::uint64_t drop_id = 0;

  int users() const { return static_cast<int>(per_user.size()); }
};

/// Free-space line-of-sight response with exact per-element spherical-wave
/// distances: entry (l, m) is (lambda / 4 pi d) * exp(-j 2 pi d / lambda)
/// for the distance d between UE antenna l and BS antenna m. No planar-wave
/// approximation, so near-field geometry is represented exactly. Throws
/// NumericalError when a user antenna coincides with a BS antenna (d = 0).
ChannelSet channel_matrices(const ArrayLayout& layout, const UserDrop& drop,
                            const ScenarioConfig& scenario,
                            std::uint64_t drop_id = 0);

/// Audit-log record: CSV with header drop_id,user,rho_m,phi_rad,rx_m,ry_m.
std::string drops_to_csv(std::span<const UserDrop> drops);

}  // namespace pia
