// Copyright 2026 The sspt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// sspt: batch drivers for single-shot process tomography experiments.
//
//   sspt gates        [--config f] [--out dir]
//   sspt twirl-sweep  [--config f] [--out dir] [--points n]
//   sspt noise-sweep  [--config f] [--out dir] [--points n] [--seeds n] [--seed s]
//   sspt counts       [--out dir] [--max-n n]
//
// Exit codes: 0 success, 2 config error, 3 rank/conditioning failure.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sspt/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRank = 3;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> points;
  std::optional<int> seeds;
  int max_n = 5;
};

using sspt::cli::ConfigError;
using sspt::cli::ExperimentConfig;
using sspt::cli::SweepKind;

ExperimentConfig resolve(const Options& opt, SweepKind kind) {
  ExperimentConfig cfg;
  if (!opt.config_path.empty()) cfg = sspt::cli::load_config(opt.config_path);
  if (cfg.sweep_kind != SweepKind::none && cfg.sweep_kind != kind) {
    throw ConfigError("config describes a " + sspt::cli::to_string(cfg.sweep_kind) +
                      " sweep, not a " + sspt::cli::to_string(kind) + " sweep");
  }
  cfg.sweep_kind = kind;
  if (cfg.spin_system.n_spins() != sspt::kRegisterQubits) {
    throw ConfigError("spin_system must describe 3 spins (A1, S, A2)");
  }
  if (opt.points) {
    if (kind == SweepKind::twirl) cfg.grid = sspt::cli::default_twirl_grid(*opt.points);
    if (kind == SweepKind::noise) cfg.grid = sspt::cli::default_noise_grid(*opt.points);
  } else if (cfg.grid.empty()) {
    if (kind == SweepKind::twirl) cfg.grid = sspt::cli::default_twirl_grid();
    if (kind == SweepKind::noise) cfg.grid = sspt::cli::default_noise_grid();
  }
  if (opt.seeds) {
    if (*opt.seeds < 1) throw ConfigError("--seeds must be >= 1");
    cfg.seeds = *opt.seeds;
  }
  if (opt.seed) cfg.base_seed = *opt.seed;
  if (!opt.out_dir.empty()) cfg.output_path = opt.out_dir;
  return cfg;
}

std::filesystem::path output_file(const ExperimentConfig& cfg, const char* name) {
  return std::filesystem::path(cfg.output_path) / name;
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config_path, "JSON experiment config");
  cmd->add_option("--out", opt.out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-shot quantum process tomography experiments"};
  app.require_subcommand(1);
  Options opt;

  auto* gates = app.add_subcommand("gates", "characterize the six standard gates");
  add_common(gates, opt);

  auto* twirl = app.add_subcommand("twirl-sweep", "sweep the joint twirl strength");
  add_common(twirl, opt);
  twirl->add_option("--points", opt.points, "number of phi points from 0 to 3.5 pi");

  auto* noise = app.add_subcommand("noise-sweep", "fidelity versus readout noise");
  add_common(noise, opt);
  noise->add_option("--points", opt.points, "number of eta points from 0 to 0.3");
  noise->add_option("--seeds", opt.seeds, "noise realizations per point");
  noise->add_option("--seed", opt.seed, "base RNG seed");

  auto* counts = app.add_subcommand("counts", "measurement-count table");
  counts->add_option("--out", opt.out_dir, "output directory");
  counts->add_option("--max-n", opt.max_n, "largest system size (1..12)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (gates->parsed()) {
      const ExperimentConfig cfg = resolve(opt, SweepKind::none);
      const auto records = sspt::cli::run_gates(cfg);
      const auto path = output_file(cfg, "gates.json");
      sspt::cli::write_file(path, sspt::cli::gates_to_json(cfg, records).dump(2) + "\n");
      for (const auto& r : records) {
        std::cout << r.name << " fidelity " << sspt::cli::fixed(r.fidelity, 9) << '\n';
      }
      std::cout << "wrote " << path.string() << '\n';
    } else if (twirl->parsed()) {
      const ExperimentConfig cfg = resolve(opt, SweepKind::twirl);
      const auto rows = sspt::cli::run_twirl_sweep(cfg);
      const auto path = output_file(cfg, "twirl_sweep.csv");
      sspt::cli::write_file(path, sspt::cli::twirl_csv(cfg, rows));
      std::cout << "wrote " << path.string() << '\n';
    } else if (noise->parsed()) {
      const ExperimentConfig cfg = resolve(opt, SweepKind::noise);
      const auto rows = sspt::cli::run_noise_sweep(cfg);
      const auto path = output_file(cfg, "noise_sweep.csv");
      sspt::cli::write_file(path, sspt::cli::noise_csv(cfg, rows));
      std::cout << "wrote " << path.string() << '\n';
    } else if (counts->parsed()) {
      const auto rows = sspt::cli::counts_table(opt.max_n);
      const auto path =
          std::filesystem::path(opt.out_dir.empty() ? "." : opt.out_dir) / "counts.csv";
      sspt::cli::write_file(path, sspt::cli::counts_csv(rows));
      std::cout << sspt::cli::counts_csv(rows);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const sspt::RankError& e) {
    std::cerr << "readout failure: " << e.what() << '\n';
    return kExitRank;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
