// pia: synthesize and benchmark irregular base-station array layouts.

#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pia/bench.hpp"
#include "pia/errors.hpp"
#include "pia/experiment.hpp"
#include "pia/geometry.hpp"
#include "pia/optimizer.hpp"
#include "pia/parallel.hpp"

namespace fs = std::filesystem;

namespace {

// Every config key reachable from the command line. Values are coerced the
// same way the config file parses them, so overrides and files cannot drift
// apart.
const char* const kOverrideKeys[] = {
    "scenario.f_c_hz",     "scenario.k",
    "scenario.n",          "scenario.delta_m",
    "scenario.delta_lambda", "scenario.h0_m",
    "scenario.rho_min_m",  "scenario.rho_min_lambda",
    "scenario.rho_max_m",  "scenario.rho_max_lambda",
    "scenario.phi_min_rad", "scenario.phi_max_rad",
    "scenario.sigma2_w",   "scenario.p_max_w",
    "scenario.bandwidth_hz", "grid.m_h",
    "grid.m_v",            "grid.pitch_m",
    "grid.pitch_lambda",   "grid.h_bs_m",
    "grid.h_bs_lambda",    "grid.l_h_m",
    "grid.l_h_lambda",     "grid.l_v_m",
    "grid.l_v_lambda",     "grid.min_sep_m",
    "grid.min_sep_lambda", "pso.n_p",
    "pso.n_pso",           "pso.inertia",
    "pso.c1",              "pso.c2",
    "pso.v_max_m",         "pso.seed",
    "pso.q",               "pso.constraints",
    "eval.n_drops",        "eval.seed",
    "output.dir",          "output.formats",
};

// Keys that come in a meters/wavelengths pair; setting one on the command
// line retracts whichever variant the file carried.
const std::map<std::string, std::string> kLengthPartners = {
    {"delta_m", "delta_lambda"},       {"delta_lambda", "delta_m"},
    {"rho_min_m", "rho_min_lambda"},   {"rho_min_lambda", "rho_min_m"},
    {"rho_max_m", "rho_max_lambda"},   {"rho_max_lambda", "rho_max_m"},
    {"pitch_m", "pitch_lambda"},       {"pitch_lambda", "pitch_m"},
    {"h_bs_m", "h_bs_lambda"},         {"h_bs_lambda", "h_bs_m"},
    {"l_h_m", "l_h_lambda"},           {"l_h_lambda", "l_h_m"},
    {"l_v_m", "l_v_lambda"},           {"l_v_lambda", "l_v_m"},
    {"min_sep_m", "min_sep_lambda"},   {"min_sep_lambda", "min_sep_m"},
};

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  std::map<std::string, std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--threads", opts.threads,
                  "worker threads (default: PIA_THREADS env or all cores)");
  cmd->add_option("--out-dir", opts.out_dir,
                  "output directory (overrides output.dir)");
  for (const char* raw_key : kOverrideKeys) {
    const std::string key = raw_key;
    cmd->add_option_function<std::string>(
           "--" + key,
           [&opts, key](const std::string& value) { opts.overrides[key] = value; })
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)
        ->group("Config overrides");
  }
}

nlohmann::json coerce_value(const std::string& key, const std::string& value) {
  if (key == "output.dir" || key == "pso.constraints") return value;
  if (key == "output.formats") {
    nlohmann::json formats = nlohmann::json::array();
    std::stringstream stream(value);
    std::string part;
    while (std::getline(stream, part, ',')) formats.push_back(part);
    return formats;
  }
  try {
    nlohmann::json parsed = nlohmann::json::parse(value);
    if (parsed.is_number()) return parsed;
  } catch (const nlohmann::json::exception&) {
  }
  return value;  // the config loader reports the type error with the key name
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pia::ConfigError("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const fs::path& path, const std::string& content) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

pia::ExperimentConfig build_config(const CommonOpts& opts) {
  nlohmann::json raw = nlohmann::json::object();
  if (!opts.config_path.empty()) {
    try {
      raw = nlohmann::json::parse(read_file(opts.config_path));
    } catch (const nlohmann::json::exception& e) {
      throw pia::ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!raw.is_object())
      throw pia::ConfigError("config: top level must be an object");
  }
  for (const auto& [dotted, value] : opts.overrides) {
    const std::size_t dot = dotted.find('.');
    const std::string section = dotted.substr(0, dot);
    const std::string key = dotted.substr(dot + 1);
    if (!raw.contains(section) || !raw[section].is_object())
      raw[section] = nlohmann::json::object();
    if (const auto partner = kLengthPartners.find(key);
        partner != kLengthPartners.end()) {
      raw[section].erase(partner->second);
      raw[section].erase(key);
    }
    raw[section][key] = coerce_value(dotted, value);
  }
  if (!opts.out_dir.empty()) {
    if (!raw.contains("output") || !raw["output"].is_object())
      raw["output"] = nlohmann::json::object();
    raw["output"]["dir"] = opts.out_dir;
  }
  return pia::experiment_from_json(raw.dump());
}

bool wants(const pia::ExperimentConfig& config, const std::string& format) {
  for (const std::string& f : config.output.formats)
    if (f == format) return true;
  return false;
}

void write_report(const pia::ExperimentConfig& config,
                  const pia::EvalReport& report, const std::string& stem) {
  const fs::path dir = config.output.dir;
  if (wants(config, "json"))
    write_text(dir / (stem + ".json"), pia::report_to_json(report));
  if (wants(config, "csv"))
    write_text(dir / (stem + ".csv"), pia::report_to_csv(report));
  std::printf("%s: mean %.6f bit/s/Hz, std %.6f, variability %.6f (%d drops)\n",
              report.scheme.c_str(), report.mean, report.stddev,
              report.variability, report.drops());
}

void write_manifest(const pia::ExperimentConfig& config,
                    const std::string& command, int threads) {
  write_text(fs::path(config.output.dir) / ("manifest_" + command + ".json"),
             pia::manifest_json(config, command, threads));
}

int run_optimize(const CommonOpts& opts, const std::string& out_layout,
                 const std::string& out_trace) {
  const pia::ExperimentConfig config = build_config(opts);
  const int threads =
      opts.threads > 0 ? opts.threads : pia::default_thread_count();
  const pia::PsoResult result =
      pia::optimize_pia(config.grid, config.scenario, config.pso, threads);

  const fs::path dir = config.output.dir;
  const fs::path layout_path =
      out_layout.empty() ? dir / "pia_layout.txt" : fs::path(out_layout);
  const fs::path trace_path =
      out_trace.empty() ? dir / "pia_trace.csv" : fs::path(out_trace);
  if (!layout_path.parent_path().empty())
    fs::create_directories(layout_path.parent_path());
  pia::save_layout(result.best_layout, layout_path.string());
  write_text(trace_path, pia::trace_to_csv(result.trace));
  write_manifest(config, "optimize", threads);

  std::printf("best expected sum rate: %.6f bit/s/Hz after %d iterations\n",
              result.best_value, static_cast<int>(result.trace.size()));
  std::printf("layout: %s\n", layout_path.string().c_str());
  return 0;
}

int run_evaluate(const CommonOpts& opts, const std::string& layout_path,
                 const std::string& scheme, const std::string& label) {
  const pia::ExperimentConfig config = build_config(opts);
  const int threads =
      opts.threads > 0 ? opts.threads : pia::default_thread_count();
  if (layout_path.empty() == scheme.empty())
    throw pia::ConfigError("evaluate: give exactly one of --layout or --scheme");

  pia::EvalReport report;
  if (!layout_path.empty()) {
    const pia::ArrayLayout layout = pia::load_layout(layout_path);
    if (static_cast<int>(layout.size()) != config.grid.antenna_count())
      throw pia::ConfigError(
          "layout has " + std::to_string(layout.size()) + " antennas but "
          "grid.m_h x grid.m_v is " +
          std::to_string(config.grid.antenna_count()));
    if (std::abs(layout.wavelength - config.grid.wavelength) >
        1e-9 * config.grid.wavelength)
      throw pia::ConfigError("layout wavelength disagrees with scenario.f_c_hz");
    report = pia::evaluate_fixed(layout, config.scenario, config.eval.n_drops,
                                 config.eval.seed, threads,
                                 label.empty() ? "fixed" : label);
  } else if (scheme == "uspa" || scheme == "hwpa") {
    const double spacing =
        scheme == "uspa" ? config.grid.pitch : 0.5 * config.grid.wavelength;
    const pia::ArrayLayout layout = pia::make_uniform_layout(
        config.grid.columns, config.grid.rows, spacing,
        config.grid.center_height, config.grid.wavelength);
    report = pia::evaluate_fixed(layout, config.scenario, config.eval.n_drops,
                                 config.eval.seed, threads, scheme);
  } else {
    report = pia::evaluate_ma(config.grid, config.scenario, config.pso,
                              config.eval.n_drops, config.eval.seed, threads);
  }

  write_report(config, report, "report_" + report.scheme);
  write_manifest(config, "evaluate", threads);
  return 0;
}

int run_compare(const CommonOpts& opts, const std::vector<std::string>& files) {
  const pia::ExperimentConfig config = build_config(opts);
  std::vector<pia::EvalReport> reports;
  reports.reserve(files.size());
  for (const std::string& file : files)
    reports.push_back(pia::report_from_json(read_file(file)));
  const pia::Comparison comparison = pia::compare(reports);

  const fs::path dir = config.output.dir;
  if (wants(config, "json"))
    write_text(dir / "comparison.json", pia::comparison_to_json(comparison));
  if (wants(config, "csv"))
    write_text(dir / "comparison.csv", pia::comparison_to_csv(comparison));

  for (std::size_t i = 0; i < comparison.schemes.size(); ++i)
    std::printf("%-8s mean %.6f  variability %.6f\n",
                comparison.schemes[i].c_str(), comparison.means[i],
                comparison.variabilities[i]);
  for (std::size_t a = 0; a < comparison.schemes.size(); ++a)
    for (std::size_t b = 0; b < comparison.schemes.size(); ++b)
      if (a != b && comparison.gap_percent[a][b] >= 0.0)
        std::printf("gap(%s, %s) = %.2f%%\n", comparison.schemes[a].c_str(),
                    comparison.schemes[b].c_str(),
                    comparison.gap_percent[a][b]);
  return 0;
}

int run_sweep(const CommonOpts& opts, const std::string& m_sides_arg) {
  const pia::ExperimentConfig config = build_config(opts);
  const int threads =
      opts.threads > 0 ? opts.threads : pia::default_thread_count();

  std::vector<int> m_sides;
  std::stringstream stream(m_sides_arg);
  std::string part;
  while (std::getline(stream, part, ',')) {
    try {
      std::size_t used = 0;
      const int side = std::stoi(part, &used);
      if (used != part.size() || side < 1) throw std::invalid_argument(part);
      m_sides.push_back(side);
    } catch (const std::exception&) {
      throw pia::ConfigError("sweep: bad --m-sides entry \"" + part + "\"");
    }
  }

  const pia::SweepResult sweep = pia::sweep_antennas(
      m_sides, config.grid, config.scenario, config.pso, config.eval.n_drops,
      config.eval.seed, threads);

  const fs::path dir = config.output.dir;
  if (wants(config, "json"))
    write_text(dir / "sweep.json", pia::sweep_to_json(sweep));
  if (wants(config, "csv"))
    write_text(dir / "sweep.csv", pia::sweep_to_csv(sweep));
  write_manifest(config, "sweep", threads);

  for (const pia::SweepRow& row : sweep.rows)
    std::printf("M=%-3d %-8s mean %.6f  variability %.6f\n",
                row.m_side * row.m_side, row.scheme.c_str(), row.mean,
                row.variability);
  return 0;
}

int run_layout_check(const CommonOpts& opts, const std::string& file) {
  const pia::ExperimentConfig config = build_config(opts);
  const pia::ArrayLayout layout = pia::load_layout(file);
  if (static_cast<int>(layout.size()) != config.grid.antenna_count())
    throw pia::ConfigError(
        "layout has " + std::to_string(layout.size()) + " antennas but "
        "grid.m_h x grid.m_v is " + std::to_string(config.grid.antenna_count()));

  const pia::ReferenceGrid reference = pia::make_reference_grid(config.grid);
  const pia::FeasibilityReport report = pia::check_feasible(
      layout, reference.regions, config.grid.separation_limit());
  if (report.feasible()) {
    std::printf("feasible: %zu antennas inside their boxes, min spacing ok\n",
                layout.size());
    return 0;
  }
  for (const auto& out : report.out_of_region)
    std::printf("antenna %zu outside its box (excess y %.6g m, z %.6g m)\n",
                out.antenna, out.excess_y, out.excess_z);
  for (const auto& pair : report.close_pairs)
    std::printf("antennas %zu and %zu are %.6g m apart (limit %.6g m)\n",
                pair.first, pair.second, pair.distance,
                config.grid.separation_limit());
  return 2;
}

int run_layout_convert(const std::string& in, const std::string& out) {
  const pia::ArrayLayout layout = pia::load_layout(in);
  if (!fs::path(out).parent_path().empty())
    fs::create_directories(fs::path(out).parent_path());
  pia::save_layout(layout, out);
  std::printf("wrote %s (%zu antennas)\n", out.c_str(), layout.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"irregular antenna array synthesis and benchmarking"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pia::kVersion);

  CommonOpts optimize_opts;
  std::string out_layout, out_trace;
  CLI::App* optimize_cmd =
      app.add_subcommand("optimize", "pre-optimize an irregular layout");
  add_common(optimize_cmd, optimize_opts);
  optimize_cmd->add_option("--out", out_layout, "layout output path");
  optimize_cmd->add_option("--trace", out_trace, "per-iteration trace CSV path");

  CommonOpts evaluate_opts;
  std::string eval_layout, eval_scheme, eval_label;
  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "score a layout or named scheme");
  add_common(evaluate_cmd, evaluate_opts);
  evaluate_cmd->add_option("--layout", eval_layout, "layout file to score")
      ->check(CLI::ExistingFile);
  evaluate_cmd
      ->add_option("--scheme", eval_scheme, "benchmark scheme to score")
      ->check(CLI::IsMember({"uspa", "hwpa", "ma"}));
  evaluate_cmd->add_option("--label", eval_label,
                           "scheme label for --layout reports");

  CommonOpts compare_opts;
  std::vector<std::string> compare_files;
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "tabulate reports scored on shared drops");
  add_common(compare_cmd, compare_opts);
  compare_cmd->add_option("reports", compare_files, "report JSON files")
      ->required()
      ->check(CLI::ExistingFile);

  CommonOpts sweep_opts;
  std::string m_sides = "4,6";
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "optimize and score all schemes per grid side");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--m-sides", m_sides, "comma list of grid side counts");

  CLI::App* layout_cmd = app.add_subcommand("layout", "layout file utilities");
  layout_cmd->require_subcommand(1);
  CommonOpts check_opts;
  std::string check_file;
  CLI::App* check_cmd =
      layout_cmd->add_subcommand("check", "validate a layout against the grid");
  add_common(check_cmd, check_opts);
  check_cmd->add_option("file", check_file, "layout file")
      ->required()
      ->check(CLI::ExistingFile);
  std::string convert_in, convert_out;
  CLI::App* convert_cmd =
      layout_cmd->add_subcommand("convert", "rewrite a layout in canonical form");
  convert_cmd->add_option("input", convert_in, "layout file")
      ->required()
      ->check(CLI::ExistingFile);
  convert_cmd->add_option("output", convert_out, "destination path")->required();

  try {
    app.parse(argc, argv);
    if (optimize_cmd->parsed())
      return run_optimize(optimize_opts, out_layout, out_trace);
    if (evaluate_cmd->parsed())
      return run_evaluate(evaluate_opts, eval_layout, eval_scheme, eval_label);
    if (compare_cmd->parsed()) return run_compare(compare_opts, compare_files);
    if (sweep_cmd->parsed()) return run_sweep(sweep_opts, m_sides);
    if (check_cmd->parsed()) return run_layout_check(check_opts, check_file);
    if (convert_cmd->parsed())
      return run_layout_convert(convert_in, convert_out);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const pia::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
