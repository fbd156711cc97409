#include "pia/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include <json.hpp>

#include "pia/errors.hpp"
#include "pia/parallel.hpp"
#include "pia/precoding.hpp"
#include "pia/rng.hpp"

namespace pia {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%llu", static_cast<unsigned long long>(v));
  return buf;
}

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

void require_paired(const EvalReport& a, const EvalReport& b) {
  if (a.values.size() != b.values.size() || a.fingerprint() != b.fingerprint())
    throw ConfigError("reports were scored on different drop sets");
}

void append_json_report(std::string& out, const EvalReport& report) {
  out += "{\"scheme\":\"" + report.scheme + "\",\"params\":{\"n_drops\":" +
         std::to_string(report.drops()) + ",\"drop_seeds\":[";
  for (std::size_t q = 0; q < report.drop_seeds.size(); ++q) {
    if (q) out += ',';
    out += fmt(report.drop_seeds[q]);
  }
  out += "]},\"mean\":" + fmt(report.mean) + ",\"std\":" + fmt(report.stddev) +
         ",\"variability_ratio\":" + fmt(report.variability) + ",\"cdf\":[";
  const std::vector<CdfPoint> cdf = report.cdf();
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    if (i) out += ',';
    out += '[' + fmt(cdf[i].value) + ',' + fmt(cdf[i].probability) + ']';
  }
  out += "],\"drops\":[";
  for (std::size_t q = 0; q < report.values.size(); ++q) {
    if (q) out += ',';
    out += fmt(report.values[q]);
  }
  out += "]}";
}

}  // namespace

std::vector<CdfPoint> EvalReport::cdf() const {
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  std::vector<CdfPoint> points(sorted.size());
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    points[i] = {sorted[i], static_cast<double>(i + 1) / n};
  return points;
}

std::uint64_t EvalReport::fingerprint() const {
  std::uint64_t hash = fnv1a(nullptr, 0);
  for (std::uint64_t seed : drop_seeds) hash = fnv1a(&seed, sizeof(seed), hash);
  return hash;
}

EvalReport finalize_report(std::string scheme, std::vector<double> values,
                           std::vector<std::uint64_t> drop_seeds) {
  if (values.size() != drop_seeds.size())
    throw std::invalid_argument("finalize_report: one seed per value required");
  EvalReport report;
  report.scheme = std::move(scheme);
  report.values = std::move(values);
  report.drop_seeds = std::move(drop_seeds);
  const auto [mean, stddev] = mean_std(report.values);
  report.mean = mean;
  report.stddev = stddev;
  report.variability = mean > 0.0 ? stddev / mean : 0.0;
  return report;
}

EvalDrops sample_eval_drops(const ScenarioConfig& scenario, int n_drops,
                            std::uint64_t seed) {
  if (n_drops < 1) throw ConfigError("eval.n_drops: need at least one drop");
  scenario.validate();
  EvalDrops out;
  out.drops.reserve(n_drops);
  out.seeds.reserve(n_drops);
  for (int q = 0; q < n_drops; ++q) {
    const std::uint64_t drop_seed =
        derive_seed(seed, Stream::eval_drops, static_cast<std::uint64_t>(q));
    Rng rng(drop_seed);
    out.drops.push_back(sample_drop(scenario, rng));
    out.seeds.push_back(drop_seed);
  }
  return out;
}

EvalReport evaluate_fixed(const ArrayLayout& layout,
                          const ScenarioConfig& scenario, int n_drops,
                          std::uint64_t seed, int threads,
                          std::string scheme) {
  EvalDrops held_out = sample_eval_drops(scenario, n_drops, seed);
  if (threads <= 0) threads = default_thread_count();

  std::vector<double> values(held_out.drops.size());
  parallel_for(held_out.drops.size(), threads, [&](std::size_t q) {
    const ChannelSet channels =
        channel_matrices(layout, held_out.drops[q], scenario,
                         static_cast<std::uint64_t>(q));
    values[q] = sum_rate(channels, scenario.noise_w, scenario.power_w).sum;
  });
  return finalize_report(std::move(scheme), std::move(values),
                         std::move(held_out.seeds));
}

EvalReport evaluate_ma(const GridSpec& grid, const ScenarioConfig& scenario,
                       const PsoConfig& pso, int n_drops, std::uint64_t seed,
                       int threads) {
  EvalDrops held_out = sample_eval_drops(scenario, n_drops, seed);
  if (threads <= 0) threads = default_thread_count();
  pso.validate();
  grid.validate();

  // The per-drop swarms are the dominant cost; they run one per worker, so
  // each swarm itself stays serial.
  std::vector<double> values(held_out.drops.size());
  parallel_for(held_out.drops.size(), threads, [&](std::size_t q) {
    PsoConfig per_drop = pso;
    per_drop.seed = derive_seed(pso.seed, Stream::ma_drop_opt,
                                static_cast<std::uint64_t>(q));
    values[q] =
        optimize_ma(grid, scenario, held_out.drops[q], per_drop, 1).best_value;
  });
  return finalize_report("ma", std::move(values), std::move(held_out.seeds));
}

Comparison compare(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw ConfigError("compare: no reports given");
  for (const EvalReport& r : reports) require_paired(reports.front(), r);

  Comparison out;
  out.fingerprint = reports.front().fingerprint();
  for (const EvalReport& r : reports) {
    out.schemes.push_back(r.scheme);
    out.means.push_back(r.mean);
    out.stddevs.push_back(r.stddev);
    out.variabilities.push_back(r.variability);
  }
  const std::size_t n = reports.size();
  out.gap_percent.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (out.means[a] != 0.0)
        out.gap_percent[a][b] =
            (out.means[a] - out.means[b]) / out.means[a] * 100.0;
  return out;
}

namespace {

double bootstrap_se(const EvalReport& a, const EvalReport& b, int resamples,
                    std::uint64_t seed, bool variability_stat) {
  require_paired(a, b);
  if (resamples < 2)
    throw std::invalid_argument("bootstrap: need at least two resamples");
  const std::size_t n = a.values.size();

  std::vector<double> stats(resamples);
  std::vector<double> sample_a(n), sample_b(n);
  for (int r = 0; r < resamples; ++r) {
    Rng rng(derive_seed(seed, Stream::bootstrap, static_cast<std::uint64_t>(r)));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pick = static_cast<std::size_t>(rng.below(n));
      sample_a[i] = a.values[pick];
      sample_b[i] = b.values[pick];
    }
    const auto [mean_a, std_a] = mean_std(sample_a);
    const auto [mean_b, std_b] = mean_std(sample_b);
    if (variability_stat) {
      const double va = mean_a > 0.0 ? std_a / mean_a : 0.0;
      const double vb = mean_b > 0.0 ? std_b / mean_b : 0.0;
      stats[r] = va - vb;
    } else {
      stats[r] = mean_a - mean_b;
    }
  }
  return mean_std(stats).second;
}

}  // namespace

double bootstrap_se_mean_diff(const EvalReport& a, const EvalReport& b,
                              int resamples, std::uint64_t seed) {
  return bootstrap_se(a, b, resamples, seed, false);
}

double bootstrap_se_variability_diff(const EvalReport& a, const EvalReport& b,
                                     int resamples, std::uint64_t seed) {
  return bootstrap_se(a, b, resamples, seed, true);
}

const EvalReport* SweepResult::report(int m_side,
                                      const std::string& scheme) const {
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].m_side == m_side && rows[i].scheme == scheme)
      return &reports[i];
  return nullptr;
}

SweepResult sweep_antennas(const std::vector<int>& m_sides,
                           const GridSpec& base_grid,
                           const ScenarioConfig& scenario,
                           const PsoConfig& pso, int n_drops,
                           std::uint64_t eval_seed, int threads) {
  if (m_sides.empty()) throw ConfigError("sweep: no side lengths given");
  SweepResult sweep;
  sweep.m_sides = m_sides;

  for (int side : m_sides) {
    if (side < 1) throw ConfigError("sweep: side lengths must be >= 1");
    GridSpec grid = base_grid;
    grid.columns = side;
    grid.rows = side;
    grid.validate();

    PsoConfig side_pso = pso;
    side_pso.seed =
        derive_seed(pso.seed, Stream::instance, static_cast<std::uint64_t>(side));

    const PsoResult pia = optimize_pia(grid, scenario, side_pso, threads);
    const ArrayLayout uspa = make_uniform_layout(
        side, side, grid.pitch, grid.center_height, grid.wavelength);
    const ArrayLayout hwpa =
        make_uniform_layout(side, side, 0.5 * grid.wavelength,
                            grid.center_height, grid.wavelength);

    std::vector<EvalReport> side_reports;
    side_reports.push_back(
        evaluate_ma(grid, scenario, side_pso, n_drops, eval_seed, threads));
    side_reports.push_back(evaluate_fixed(pia.best_layout, scenario, n_drops,
                                          eval_seed, threads, "pia"));
    side_reports.push_back(
        evaluate_fixed(uspa, scenario, n_drops, eval_seed, threads, "uspa"));
    side_reports.push_back(
        evaluate_fixed(hwpa, scenario, n_drops, eval_seed, threads, "hwpa"));

    for (EvalReport& report : side_reports) {
      sweep.rows.push_back({side, report.scheme, report.mean, report.stddev,
                            report.variability});
      sweep.reports.push_back(std::move(report));
    }
  }
  return sweep;
}

std::string report_to_json(const EvalReport& report) {
  std::string out;
  append_json_report(out, report);
  out += '\n';
  return out;
}

EvalReport report_from_json(const std::string& text) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("report: invalid JSON: ") + e.what());
  }
  try {
    const std::string scheme = parsed.at("scheme").get<std::string>();
    std::vector<double> values =
        parsed.at("drops").get<std::vector<double>>();
    std::vector<std::uint64_t> seeds =
        parsed.at("params").at("drop_seeds").get<std::vector<std::uint64_t>>();
    if (values.size() != seeds.size())
      throw ConfigError("report: drops and drop_seeds lengths differ");
    return finalize_report(scheme, std::move(values), std::move(seeds));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("report: missing or mistyped field: ") +
                      e.what());
  }
}

std::string report_to_csv(const EvalReport& report) {
  std::string out = "scheme,drop,sum_rate_bps_hz\n";
  for (std::size_t q = 0; q < report.values.size(); ++q)
    out += report.scheme + ',' + std::to_string(q) + ',' +
           fmt(report.values[q]) + '\n';
  return out;
}

std::string comparison_to_json(const Comparison& comparison) {
  std::string out = "{\"fingerprint\":" + fmt(comparison.fingerprint) +
                    ",\"schemes\":[";
  for (std::size_t i = 0; i < comparison.schemes.size(); ++i) {
    if (i) out += ',';
    out += '"' + comparison.schemes[i] + '"';
  }
  out += "],\"rows\":[";
  for (std::size_t i = 0; i < comparison.schemes.size(); ++i) {
    if (i) out += ',';
    out += "{\"scheme\":\"" + comparison.schemes[i] +
           "\",\"mean\":" + fmt(comparison.means[i]) +
           ",\"std\":" + fmt(comparison.stddevs[i]) +
           ",\"variability_ratio\":" + fmt(comparison.variabilities[i]) + '}';
  }
  out += "],\"gap_percent\":[";
  for (std::size_t a = 0; a < comparison.gap_percent.size(); ++a) {
    if (a) out += ',';
    out += '[';
    for (std::size_t b = 0; b < comparison.gap_percent[a].size(); ++b) {
      if (b) out += ',';
      out += fmt(comparison.gap_percent[a][b]);
    }
    out += ']';
  }
  out += "]}\n";
  return out;
}

std::string comparison_to_csv(const Comparison& comparison) {
  std::string out = "scheme,mean,std,variability_ratio";
  for (const std::string& scheme : comparison.schemes)
    out += ",gap_from_" + scheme + "_percent";
  out += '\n';
  for (std::size_t b = 0; b < comparison.schemes.size(); ++b) {
    out += comparison.schemes[b] + ',' + fmt(comparison.means[b]) + ',' +
           fmt(comparison.stddevs[b]) + ',' + fmt(comparison.variabilities[b]);
    for (std::size_t a = 0; a < comparison.schemes.size(); ++a)
      out += ',' + fmt(comparison.gap_percent[a][b]);
    out += '\n';
  }
  return out;
}

std::string sweep_to_json(const SweepResult& sweep) {
  std::string out = "{\"m_sides\":[";
  for (std::size_t i = 0; i < sweep.m_sides.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(sweep.m_sides[i]);
  }
  out += "],\"rows\":[";
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    if (i) out += ',';
    const SweepRow& row = sweep.rows[i];
    out += "{\"m_side\":" + std::to_string(row.m_side) + ",\"scheme\":\"" +
           row.scheme + "\",\"mean\":" + fmt(row.mean) + ",\"std\":" +
           fmt(row.stddev) + ",\"variability_ratio\":" + fmt(row.variability) +
           '}';
  }
  out += "],\"reports\":[";
  for (std::size_t i = 0; i < sweep.reports.size(); ++i) {
    if (i) out += ',';
    append_json_report(out, sweep.reports[i]);
  }
  out += "]}\n";
  return out;
}

std::string sweep_to_csv(const SweepResult& sweep) {
  std::string out = "m_side,scheme,mean,std,variability_ratio\n";
  for (const SweepRow& row : sweep.rows)
    out += std::to_string(row.m_side) + ',' + row.scheme + ',' +
           fmt(row.mean) + ',' + fmt(row.stddev) + ',' +
           fmt(row.variability) + '\n';
  return out;
}

}  // namespace pia
