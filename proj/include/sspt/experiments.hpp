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

#pragma once

// Batch experiment drivers behind the `sspt` command line tool: the gate
// suite, the twirl sweep, the noise sweep and the measurement-count table,
// plus the JSON config schema and the CSV/JSON writers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "sspt/channels.hpp"
#include "sspt/nmr.hpp"
#include "sspt/tomo.hpp"

namespace sspt::cli {

using nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepKind { none, twirl, noise };

struct ProcessConfig {
  std::string name;
  double theta_rad = 0.0;
};

struct ExperimentConfig {
  SpinSystem spin_system = default_spin_system();
  std::optional<ProcessConfig> process;
  SweepKind sweep_kind = SweepKind::none;
  std::vector<double> grid;  // radians for twirl sweeps, eta for noise sweeps
  int seeds = 100;
  std::uint64_t base_seed = 1;
  std::string output_path = ".";
};

inline constexpr int kDefaultTwirlPoints = 49;
inline constexpr double kDefaultTwirlMax = 3.5 * kPi;
inline constexpr int kDefaultNoisePoints = 31;
inline constexpr double kDefaultNoiseMax = 0.3;

// n evenly spaced points from 0 to hi inclusive.
inline std::vector<double> linear_grid(double hi, int points) {
  if (points < 2) throw ConfigError("grid needs at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) grid[static_cast<std::size_t>(k)] = hi * k / (points - 1);
  return grid;
}

inline std::vector<double> default_twirl_grid(int points = kDefaultTwirlPoints) {
  return linear_grid(kDefaultTwirlMax, points);
}

inline std::vector<double> default_noise_grid(int points = kDefaultNoisePoints) {
  return linear_grid(kDefaultNoiseMax, points);
}

//------------------------------------------------------------------------------
// Config parsing
//------------------------------------------------------------------------------

namespace detail {

inline void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
T get_as(const json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

inline SpinSystem parse_spin_system(const json& j) {
  const std::string where = "spin_system";
  reject_unknown_keys(j, {"chemical_shifts_hz", "j_couplings_hz", "tau1_s", "tau2_s"},
                      where);
  SpinSystem sys = default_spin_system();
  if (j.contains("chemical_shifts_hz")) {
    sys.chemical_shifts_hz = get_as<std::vector<double>>(j, "chemical_shifts_hz", where);
    if (!j.contains("j_couplings_hz")) {
      throw ConfigError(where + ": chemical_shifts_hz given without j_couplings_hz");
    }
  }
  if (j.contains("j_couplings_hz")) {
    const auto rows =
        get_as<std::vector<std::vector<double>>>(j, "j_couplings_hz", where);
    const auto n = static_cast<Index>(rows.size());
    sys.j_couplings_hz = RealMatrix::Zero(n, n);
    for (Index r = 0; r < n; ++r) {
      const auto& row = rows[static_cast<std::size_t>(r)];
      if (static_cast<Index>(row.size()) != n) {
        throw ConfigError(where + ".j_couplings_hz: matrix must be square");
      }
      for (Index c = 0; c < n; ++c) sys.j_couplings_hz(r, c) = row[static_cast<std::size_t>(c)];
    }
  }
  if (j.contains("tau1_s")) sys.tau1_s = get_as<double>(j, "tau1_s", where);
  if (j.contains("tau2_s")) sys.tau2_s = get_as<double>(j, "tau2_s", where);
  try {
    sys.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return sys;
}

inline void check_grid(const std::vector<double>& grid, const std::string& where) {
  if (grid.empty()) throw ConfigError(where + ": grid is empty");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) {
      throw ConfigError(where + ": grid must be strictly increasing");
    }
  }
}

}  // namespace detail

/// Schema (every key optional, unknown keys rejected):
///
///   {
///     "spin_system": {"chemical_shifts_hz": [..], "j_couplings_hz": [[..]],
///                     "tau1_s": .., "tau2_s": ..},
///     "process": {"name": "Hadamard", "theta_rad": 0.0},
///     "sweep": {"kind": "twirl", "phi_grid_rad": [..]}
///            | {"kind": "noise", "eta_grid": [..]} | {"kind": "none"},
///     "seeds": 100,
///     "base_seed": 1,
///     "output_path": "out"
///   }
///
/// The twirl grid is in radians (phi_max), the noise grid in units of peak
/// signal amplitude.
inline ExperimentConfig parse_config(const json& j) {
  detail::reject_unknown_keys(
      j, {"spin_system", "process", "sweep", "seeds", "base_seed", "output_path"},
      "config");
  ExperimentConfig cfg;
  if (j.contains("spin_system")) cfg.spin_system = detail::parse_spin_system(j.at("spin_system"));
  if (j.contains("process")) {
    const json& p = j.at("process");
    detail::reject_unknown_keys(p, {"name", "theta_rad"}, "process");
    ProcessConfig pc;
    pc.name = detail::get_as<std::string>(p, "name", "process");
    if (p.contains("theta_rad")) pc.theta_rad = detail::get_as<double>(p, "theta_rad", "process");
    try {
      (void)gate(pc.name, pc.theta_rad);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("process: ") + e.what());
    }
    cfg.process = pc;
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    detail::reject_unknown_keys(s, {"kind", "phi_grid_rad", "eta_grid"}, "sweep");
    const auto kind = detail::get_as<std::string>(s, "kind", "sweep");
    if (kind == "twirl") {
      cfg.sweep_kind = SweepKind::twirl;
    } else if (kind == "noise") {
      cfg.sweep_kind = SweepKind::noise;
    } else if (kind == "none") {
      cfg.sweep_kind = SweepKind::none;
    } else {
      throw ConfigError("sweep.kind: expected twirl, noise or none, got '" + kind + "'");
    }
    const char* grid_key = cfg.sweep_kind == SweepKind::twirl ? "phi_grid_rad" : "eta_grid";
    for (const char* key : {"phi_grid_rad", "eta_grid"}) {
      if (s.contains(key) && std::string(key) != grid_key) {
        throw ConfigError(std::string("sweep.") + key + " does not apply to a " + kind +
                          " sweep");
      }
    }
    if (s.contains(grid_key)) {
      cfg.grid = detail::get_as<std::vector<double>>(s, grid_key, "sweep");
      detail::check_grid(cfg.grid, std::string("sweep.") + grid_key);
    }
  }
  if (j.contains("seeds")) {
    cfg.seeds = detail::get_as<int>(j, "seeds", "config");
    if (cfg.seeds < 1) throw ConfigError("seeds must be >= 1");
  }
  if (j.contains("base_seed")) cfg.base_seed = detail::get_as<std::uint64_t>(j, "base_seed", "config");
  if (j.contains("output_path")) cfg.output_path = detail::get_as<std::string>(j, "output_path", "config");
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

inline std::string to_string(SweepKind k) {
  switch (k) {
    case SweepKind::twirl:
      return "twirl";
    case SweepKind::noise:
      return "noise";
    case SweepKind::none:
      break;
  }
  return "none";
}

// Fully resolved config, written into every output file.
inline json config_to_json(const ExperimentConfig& cfg) {
  json j;
  const SpinSystem& s = cfg.spin_system;
  std::vector<std::vector<double>> couplings;
  for (Index r = 0; r < s.j_couplings_hz.rows(); ++r) {
    std::vector<double> row;
    for (Index c = 0; c < s.j_couplings_hz.cols(); ++c) row.push_back(s.j_couplings_hz(r, c));
    couplings.push_back(row);
  }
  j["spin_system"] = {{"chemical_shifts_hz", s.chemical_shifts_hz},
                      {"j_couplings_hz", couplings},
                      {"tau1_s", s.tau1_s},
                      {"tau2_s", s.tau2_s}};
  if (cfg.process) {
    j["process"] = {{"name", cfg.process->name}, {"theta_rad", cfg.process->theta_rad}};
  }
  j["sweep"] = {{"kind", to_string(cfg.sweep_kind)}};
  if (cfg.sweep_kind == SweepKind::twirl) j["sweep"]["phi_grid_rad"] = cfg.grid;
  if (cfg.sweep_kind == SweepKind::noise) j["sweep"]["eta_grid"] = cfg.grid;
  j["seeds"] = cfg.seeds;
  j["base_seed"] = cfg.base_seed;
  j["output_path"] = cfg.output_path;
  return j;
}

//------------------------------------------------------------------------------
// Execution helpers
//------------------------------------------------------------------------------

// Runs fn(0 .. count-1) on a pool of worker threads. fn must only write to
// its own output slot.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Seed of replicate `replicate` at sweep point `point`.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t point,
                                 std::uint64_t replicate) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed),
                    static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(point), static_cast<std::uint32_t>(replicate)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

inline std::string fixed(double v, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  // "-0.000" prints as "0.000".
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

inline json chi_to_json(const ChiMatrix& chi) {
  std::vector<std::vector<double>> re, im;
  for (Index r = 0; r < chi.entries.rows(); ++r) {
    std::vector<double> rr, ii;
    for (Index c = 0; c < chi.entries.cols(); ++c) {
      rr.push_back(chi.entries(r, c).real());
      ii.push_back(chi.entries(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return {{"n_qubits", chi.n_qubits}, {"real", re}, {"imag", im}};
}

inline std::string provenance_header(const std::string& command, const ExperimentConfig& cfg) {
  return "# sspt " + command + "\n# config: " + config_to_json(cfg).dump() + "\n";
}

//------------------------------------------------------------------------------
// gates
//------------------------------------------------------------------------------

struct GateRecord {
  std::string name;
  ChiMatrix chi;
  ChiMatrix ideal;
  double fidelity = 0.0;
  CptpReport cptp;
  double lambda_trace_residual = 0.0;
};

inline std::vector<GateRecord> run_gates(const ExperimentConfig& cfg) {
  const SsptSetup setup = make_sspt_setup(cfg.spin_system);
  const std::vector<NamedProcess> gates = standard_gates();
  std::vector<GateRecord> out(gates.size());
  parallel_for(gates.size(), [&](std::size_t i) {
    const SsptRun run = sspt_run(gates[i].process, setup);
    GateRecord& r = out[i];
    r.name = gates[i].name;
    r.chi = run.solution.chi;
    r.ideal = chi_of(gates[i].process);
    r.fidelity = gate_fidelity(r.chi, r.ideal);
    r.cptp = validate_cptp(r.chi);
    r.lambda_trace_residual = lambda_trace_residual(run.lambda);
  });
  return out;
}

inline json gates_to_json(const ExperimentConfig& cfg, const std::vector<GateRecord>& records) {
  json j;
  j["command"] = "gates";
  j["config"] = config_to_json(cfg);
  json list = json::array();
  for (const GateRecord& r : records) {
    list.push_back({{"process", r.name},
                    {"chi", chi_to_json(r.chi)},
                    {"fidelity", r.fidelity},
                    {"cptp",
                     {{"hermitian", r.cptp.hermitian},
                      {"hermitian_deviation", r.cptp.hermitian_deviation},
                      {"min_eigenvalue", r.cptp.min_eigenvalue},
                      {"tp_residual", r.cptp.tp_residual}}},
                    {"lambda_trace_residual", r.lambda_trace_residual}});
  }
  j["gates"] = list;
  return j;
}

//------------------------------------------------------------------------------
// twirl-sweep
//------------------------------------------------------------------------------

struct TwirlRow {
  double phi = 0.0;
  double chi_ee_abs = 0.0;
  double chi_zz_abs = 0.0;
  double chi_ee_theory = 0.0;
  double chi_zz_theory = 0.0;
  double fidelity = 0.0;
};

// chi_EE = (1 + sinc 2 Phi) / 2, chi_ZZ = (1 - sinc 2 Phi) / 2, zero elsewhere.
inline ChiMatrix twirl_theory_chi(double phi) {
  const double s = sinc(2.0 * phi);
  Operator chi = Operator::Zero(4, 4);
  chi(0, 0) = (1.0 + s) / 2.0;
  chi(3, 3) = (1.0 - s) / 2.0;
  return {1, chi};
}

inline std::vector<TwirlRow> run_twirl_sweep(const ExperimentConfig& cfg) {
  const SsptSetup setup = make_sspt_setup(cfg.spin_system);
  const std::vector<double> grid = cfg.grid.empty() ? default_twirl_grid() : cfg.grid;
  std::vector<TwirlRow> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const double phi = grid[i];
    const ChiMatrix chi = sspt(ProcessRep::twirl(phi, 1, 2), setup);
    const ChiMatrix theory = twirl_theory_chi(phi);
    rows[i] = {phi,
               std::abs(chi.entries(0, 0)),
               std::abs(chi.entries(3, 3)),
               theory.entries(0, 0).real(),
               theory.entries(3, 3).real(),
               gate_fidelity(chi, theory)};
  });
  return rows;
}

inline std::string twirl_csv(const ExperimentConfig& cfg, const std::vector<TwirlRow>& rows) {
  std::ostringstream out;
  out << provenance_header("twirl-sweep", cfg);
  out << "phi_over_pi,chi_EE_abs,chi_ZZ_abs,chi_EE_theory,chi_ZZ_theory,fidelity\n";
  for (const TwirlRow& r : rows) {
    out << fixed(r.phi / kPi) << ',' << fixed(r.chi_ee_abs) << ',' << fixed(r.chi_zz_abs)
        << ',' << fixed(r.chi_ee_theory) << ',' << fixed(r.chi_zz_theory) << ','
        << fixed(r.fidelity) << '\n';
  }
  return out.str();
}

//------------------------------------------------------------------------------
// noise-sweep
//------------------------------------------------------------------------------

struct NoiseRow {
  std::string process;
  double eta = 0.0;
  double fidelity_mean = 0.0;
  double fidelity_std = 0.0;  // sample standard deviation over seeds
  int n_seeds = 0;
};

/// For every process and noise amplitude, the mean and spread over seeds of
/// F(chi_0, chi_eta), where chi_0 is the noiseless single-shot result.
/// Rows are ordered by process, then eta.
inline std::vector<NoiseRow> run_noise_sweep(const ExperimentConfig& cfg) {
  if (cfg.seeds < 1) throw ConfigError("noise sweep needs seeds >= 1");
  const SsptSetup setup = make_sspt_setup(cfg.spin_system);
  const std::vector<double> grid = cfg.grid.empty() ? default_noise_grid() : cfg.grid;
  for (double eta : grid) {
    if (!(eta >= 0.0)) throw ConfigError("noise grid values must be >= 0");
  }
  std::vector<NamedProcess> processes;
  if (cfg.process) {
    processes.push_back({cfg.process->name, gate(cfg.process->name, cfg.process->theta_rad)});
  } else {
    processes = standard_gates();
  }

  std::vector<ChiMatrix> clean(processes.size());
  for (std::size_t p = 0; p < processes.size(); ++p) clean[p] = sspt(processes[p].process, setup);

  const std::size_t points = processes.size() * grid.size();
  std::vector<NoiseRow> rows(points);
  parallel_for(points, [&](std::size_t point) {
    const std::size_t p = point / grid.size();
    const double eta = grid[point % grid.size()];
    std::vector<double> f(static_cast<std::size_t>(cfg.seeds));
    for (int s = 0; s < cfg.seeds; ++s) {
      const NoiseSpec noise{eta, derive_seed(cfg.base_seed, point, static_cast<std::uint64_t>(s))};
      f[static_cast<std::size_t>(s)] = gate_fidelity(clean[p], sspt(processes[p].process, setup, noise));
    }
    double mean = 0.0;
    for (double v : f) mean += v;
    mean /= static_cast<double>(f.size());
    double var = 0.0;
    for (double v : f) var += (v - mean) * (v - mean);
    const double sd = f.size() > 1 ? std::sqrt(var / static_cast<double>(f.size() - 1)) : 0.0;
    rows[point] = {processes[p].name, eta, mean, sd, cfg.seeds};
  });
  return rows;
}

inline std::string noise_csv(const ExperimentConfig& cfg, const std::vector<NoiseRow>& rows) {
  std::ostringstream out;
  out << provenance_header("noise-sweep", cfg);
  out << "process,eta,fidelity_mean,fidelity_std,n_seeds\n";
  for (const NoiseRow& r : rows) {
    out << r.process << ',' << fixed(r.eta, 6) << ',' << fixed(r.fidelity_mean) << ','
        << fixed(r.fidelity_std) << ',' << r.n_seeds << '\n';
  }
  return out.str();
}

//------------------------------------------------------------------------------
// counts
//------------------------------------------------------------------------------

inline std::vector<CountReport> counts_table(int max_n) {
  if (max_n < 1 || max_n > 12) throw ConfigError("max_n must be 1..12");
  std::vector<CountReport> rows;
  for (int n = 1; n <= max_n; ++n) rows.push_back(counts(n));
  return rows;
}

inline std::string counts_csv(const std::vector<CountReport>& rows) {
  std::ostringstream out;
  out << "# sspt counts\n";
  out << "n,M_QPT,M_AAPT,n_A1,M_SSPT,n_A2\n";
  for (const CountReport& r : rows) {
    out << r.n << ',' << r.m_qpt << ',' << r.m_aapt << ',' << r.n_a1 << ',' << r.m_sspt
        << ',' << r.n_a2 << '\n';
  }
  return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace sspt::cli
