// Command-line front end: scenario runner, latency benchmark, bracket
// calibration, and the detector prior-count check.
//
// Exit codes: 0 success, 2 usage or config error, 3 I/O error.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "followsim/bench.hpp"
#include "followsim/calibrate.hpp"
#include "followsim/config.hpp"
#include "followsim/runner.hpp"
#include "followsim/trace_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

void write_file_or_throw(const std::string& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::ios_base::failure("cannot open " + path + " for writing");
  os << body;
  os.flush();
  if (!os) throw std::ios_base::failure("write failed: " + path);
}

int cmd_run(const std::string& config_path, const std::string& out_path,
            std::optional<std::uint64_t> seed_override,
            const std::string& mode_name) {
  followsim::ScenarioConfig cfg = config_path.empty()
                                      ? followsim::ScenarioConfig{}
                                      : followsim::load_config_file(config_path);
  const std::uint64_t seed = seed_override.value_or(cfg.seed);
  const followsim::ExecMode mode = followsim::parse_exec_mode(mode_name);

  followsim::EpisodeResult result = followsim::run_episode(cfg, seed, mode);

  if (!out_path.empty()) {
    std::ostringstream trace;
    followsim::write_trace_jsonl(trace, result.trace);
    write_file_or_throw(out_path, trace.str());
  }
  std::cout << followsim::episode_summary_json(result).dump(2) << "\n";
  return kExitOk;
}

int cmd_bench(const std::vector<std::string>& backends, bool exact,
              std::uint64_t draws, std::uint64_t seed,
              const std::string& out_path) {
  std::vector<followsim::LatencyProfile> profiles;
  if (backends.empty()) {
    for (const auto& [name, profile] : followsim::builtin_profiles()) {
      (void)name;
      profiles.push_back(profile);
    }
  } else {
    for (const auto& name : backends)
      profiles.push_back(followsim::builtin_profile(name));
  }
  const std::uint64_t effective_draws = exact ? 0 : draws;
  followsim::CompareReport report =
      followsim::compare_backends(profiles, effective_draws, seed);
  std::cout << followsim::format_table(report);
  if (!out_path.empty()) write_file_or_throw(out_path, followsim::to_csv(report));
  return kExitOk;
}

int cmd_calibrate(const std::string& config_path,
                  const std::vector<double>& offsets,
                  const std::vector<double>& distances,
                  const std::string& out_path) {
  followsim::ScenarioConfig cfg = config_path.empty()
                                      ? followsim::ScenarioConfig{}
                                      : followsim::load_config_file(config_path);
  followsim::CalibrationGrid grid = followsim::default_grid(cfg.standoff_m);
  if (!offsets.empty()) grid.lateral_offsets_m = offsets;
  if (!distances.empty()) grid.distances_m = distances;

  followsim::CalibrationResult result = followsim::calibrate(cfg, grid);
  std::cout << followsim::format_grid(result);
  for (const auto& note : result.notes) std::cout << "note: " << note << "\n";
  if (!out_path.empty())
    write_file_or_throw(out_path, followsim::emit_fragment(result));
  return kExitOk;
}

int cmd_priors(const std::optional<std::string>& layer_spec) {
  std::vector<followsim::SsdLayer> layers;
  if (!layer_spec) {
    layers = followsim::default_ssd_layers();
  } else if (!layer_spec->empty()) {
    // Spec format: "38x4,19x6,...", each entry grid-side x boxes-per-cell.
    std::istringstream in(*layer_spec);
    std::string entry;
    while (std::getline(in, entry, ',')) {
      const auto x = entry.find('x');
      if (x == std::string::npos || x == 0 || x + 1 >= entry.size())
        throw followsim::ConfigError("bad layer entry '" + entry +
                                     "', expected <side>x<boxes>");
      followsim::SsdLayer layer;
      try {
        layer.grid_side = std::stoi(entry.substr(0, x));
        layer.boxes_per_cell = std::stoi(entry.substr(x + 1));
      } catch (const std::exception&) {
        throw followsim::ConfigError("bad layer entry '" + entry + "'");
      }
      if (layer.grid_side <= 0 || layer.boxes_per_cell <= 0)
        throw followsim::ConfigError("layer dimensions must be positive: '" +
                                     entry + "'");
      layers.push_back(layer);
    }
  }
  for (const auto& layer : layers)
    std::cout << layer.grid_side << "x" << layer.grid_side << "x"
              << layer.boxes_per_cell << ": "
              << followsim::layer_prediction_count(layer) << "\n";
  std::cout << "total: " << followsim::ssd_prediction_count(layers) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale follow-the-target pipeline simulator"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run a scenario episode");
  std::string run_config;
  std::string run_out;
  std::uint64_t run_seed = 0;
  bool run_seed_set = false;
  std::string run_mode = "deterministic";
  run->add_option("--config", run_config, "Scenario config file");
  run->add_option("--out", run_out, "Trace output file (JSON lines)");
  run->add_option("--seed", run_seed, "Override the config seed")
      ->each([&](const std::string&) { run_seed_set = true; });
  run->add_option("--mode", run_mode, "Execution mode")
      ->check(CLI::IsMember({"deterministic", "concurrent"}));

  // bench
  auto* bench = app.add_subcommand("bench", "Compare detector backend latency");
  std::vector<std::string> bench_backends;
  bool bench_exact = false;
  std::uint64_t bench_draws = 100000;
  std::uint64_t bench_seed = 1;
  std::string bench_out;
  bench->add_option("--backend", bench_backends,
                    "Backend to include (repeatable; default: all builtin)");
  bench->add_flag("--exact", bench_exact,
                  "Report the builtin sample lists verbatim, no resampling");
  bench->add_option("--draws", bench_draws, "Resample count per backend");
  bench->add_option("--seed", bench_seed, "Resampling seed");
  bench->add_option("--out", bench_out, "CSV report file");

  // calibrate
  auto* calibrate = app.add_subcommand(
      "calibrate", "Derive nav brackets from a placement grid");
  std::string cal_config;
  std::string cal_out;
  std::vector<double> cal_offsets;
  std::vector<double> cal_distances;
  calibrate->add_option("--config", cal_config, "Scenario config file");
  calibrate->add_option("--out", cal_out, "Config fragment output file");
  calibrate->add_option("--offsets", cal_offsets,
                        "Lateral offsets in meters (default +-0.3)");
  calibrate->add_option("--distances", cal_distances,
                        "Distances in meters (default 0.9/1.0/1.1 x standoff)");

  // priors
  auto* priors =
      app.add_subcommand("priors", "Print detector prior-box counts");
  std::string priors_layers;
  bool priors_layers_set = false;
  priors->add_option("--layers", priors_layers, "Layer spec, e.g. 38x4,19x6")
      ->each([&](const std::string&) { priors_layers_set = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) {
      return cmd_run(run_config, run_out,
                     run_seed_set ? std::optional<std::uint64_t>(run_seed)
                                  : std::nullopt,
                     run_mode);
    }
    if (bench->parsed()) {
      return cmd_bench(bench_backends, bench_exact, bench_draws, bench_seed,
                       bench_out);
    }
    if (calibrate->parsed()) {
      return cmd_calibrate(cal_config, cal_offsets, cal_distances, cal_out);
    }
    if (priors->parsed()) {
      return cmd_priors(priors_layers_set
                            ? std::optional<std::string>(priors_layers)
                            : std::nullopt);
    }
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
