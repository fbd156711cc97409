#include "pia/channel.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "pia/errors.hpp"

namespace pia {

void ScenarioConfig::validate() const {
  if (!(carrier_hz > 0.0)) throw ConfigError("scenario.f_c_hz must be positive");
  if (users < 1) throw ConfigError("scenario.k must be >= 1");
  if (ue_antennas < 1) throw ConfigError("scenario.n must be >= 1");
  if (ue_antennas > 1 && !(ue_spacing_m > 0.0))
    throw ConfigError("scenario.delta_m must be positive for multi-antenna UEs");
  if (ue_spacing_m < 0.0) throw ConfigError("scenario.delta_m must be >= 0");
  if (!(rho_min_m > 0.0)) throw ConfigError("scenario.rho_min_m must be positive");
  if (rho_max_m < rho_min_m)
    throw ConfigError("scenario.rho_max_m must be >= scenario.rho_min_m");
  if (phi_max_rad < phi_min_rad)
    throw ConfigError("scenario.phi_max_rad must be >= scenario.phi_min_rad");
  if (!(noise_w > 0.0)) throw ConfigError("scenario.sigma2_w must be positive");
  if (!(power_w > 0.0)) throw ConfigError("scenario.p_max_w must be positive");
  if (!(bandwidth_hz > 0.0)) throw ConfigError("scenario.bandwidth_hz must be positive");
}

ScenarioConfig default_scenario() {
  ScenarioConfig sc;
  const double lambda = sc.wavelength();
  sc.ue_spacing_m = lambda;
  sc.rho_min_m = 20.0 * lambda;
  sc.rho_max_m = 5000.0 * lambda;
  sc.phi_min_rad = -std::numbers::pi / 3.0;
  sc.phi_max_rad = std::numbers::pi / 3.0;
  return sc;
}

UserDrop sample_drop(const ScenarioConfig& scenario, Rng& rng) {
  UserDrop drop;
  drop.users.reserve(scenario.users);
  for (int i = 0; i < scenario.users; ++i) {
    UserPosition u;
    u.rho = rng.uniform(scenario.rho_min_m, scenario.rho_max_m);
    u.phi = rng.uniform(scenario.phi_min_rad, scenario.phi_max_rad);
    u.x = u.rho * std::cos(u.phi);
    u.y = u.rho * std::sin(u.phi);
    drop.users.push_back(u);
  }
  return drop;
}

namespace {

std::uint64_t layout_fingerprint(const ArrayLayout& layout) {
  // FNV-1a over the coordinate bytes; identifies a layout in reports.
  std::uint64_t h = fnv1a(nullptr, 0);
  auto absorb = [&h](double v) { h = fnv1a(&v, sizeof v, h); };
  absorb(layout.wavelength);
  for (const Point2& p : layout.positions) {
    absorb(p.y);
    absorb(p.z);
  }
  return h;
}

}  // namespace

ChannelSet channel_matrices(const ArrayLayout& layout, const UserDrop& drop,
                            const ScenarioConfig& scenario,
                            std::uint64_t drop_id) {
  const double lambda = layout.wavelength;
  if (!(lambda > 0.0))
    throw NumericalError("channel_matrices: layout has no wavelength");
  const std::size_t m_count = layout.size();
  const int n = scenario.ue_antennas;

  ChannelSet set;
  set.layout_id = layout_fingerprint(layout);
  set.drop_id = drop_id;
  set.per_user.reserve(drop.users.size());

  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double amp_scale = lambda / (4.0 * std::numbers::pi);

  for (const UserPosition& user : drop.users) {
    arma::cx_mat h(n, m_count);
    for (int ell = 0; ell < n; ++ell) {
      const double uz = ue_antenna_height(scenario, ell);
      for (std::size_t m = 0; m < m_count; ++m) {
        const Point2& t = layout.positions[m];
        const double dy = user.y - t.y;
        const double dz = uz - t.z;
        const double d = std::sqrt(user.x * user.x + dy * dy + dz * dz);
        if (d <= 0.0)
          throw NumericalError("channel_matrices: user antenna coincides with a BS antenna");
        h(ell, m) = std::polar(amp_scale / d, -two_pi * d / lambda);
      }
    }
    set.per_user.push_back(std::move(h));
  }
  return set;
}

std::string drops_to_csv(std::span<const UserDrop> drops) {
  std::string csv = "drop_id,user,rho_m,phi_rad,rx_m,ry_m\n";
  char line[192];
  for (std::size_t d = 0; d < drops.size(); ++d)
    for (std::size_t i = 0; i < drops[d].users.size(); ++i) {
      const UserPosition& u = drops[d].users[i];
      std::snprintf(line, sizeof line, "%zu,%zu,%.15g,%.15g,%.15g,%.15g\n", d,
                    i, u.rho, u.phi, u.x, u.y);
      csv += line;
    }
  return csv;
}

}  // namespace pia
