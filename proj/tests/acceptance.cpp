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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "sspt/experiments.hpp"
#include "test_util.hpp"

namespace {

using namespace sspt;
using sspt::testing::max_diff;
using sspt::testing::Rng;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

const SsptSetup& setup() {
  static const SsptSetup s = make_sspt_setup(default_spin_system());
  return s;
}

constexpr Index kEE = 0;
constexpr Index kZZ = 3;

//------------------------------------------------------------------------------

Outcome ac1_counts() {
  const std::vector<std::uint64_t> qpt = {8, 32, 192, 1024, 7168};
  const std::vector<std::uint64_t> aapt = {2, 4, 11, 32, 103};
  const std::vector<std::pair<int, int>> ancillas = {{1, 1}, {2, 2}, {3, 3}, {4, 5}, {5, 6}};
  int matched = 0;
  for (int n = 1; n <= 5; ++n) {
    const CountReport r = counts(n);
    const auto k = static_cast<std::size_t>(n - 1);
    matched += r.m_qpt == qpt[k];
    matched += r.m_aapt == aapt[k];
    matched += r.n_a1 == ancillas[k].first;
    matched += r.n_a2 == ancillas[k].second;
  }
  return {matched == 20, std::to_string(matched) + "/20 table cells match"};
}

Outcome ac2_gates() {
  double worst_fidelity = 1.0;
  for (const NamedProcess& g : standard_gates()) {
    const ChiMatrix chi = sspt::sspt(g.process, setup());
    worst_fidelity = std::min(worst_fidelity, gate_fidelity(chi, chi_of(g.process)));
  }
  const ChiMatrix h = sspt::sspt(gate(Gate::hadamard), setup());
  Operator pattern = Operator::Zero(4, 4);
  for (Index m : {1, 3}) {
    for (Index n : {1, 3}) pattern(m, n) = 0.5;
  }
  const double hadamard_err = max_diff(h.entries, pattern);
  const bool pass = worst_fidelity >= 1.0 - 1e-9 && hadamard_err <= 1e-9;
  return {pass, fmt("min fidelity %.12f, Hadamard pattern error %.2e", worst_fidelity,
                    hadamard_err)};
}

Outcome ac3_equivalence() {
  Rng rng(2024);
  constexpr int kChannels = 60;
  double worst = 0.0;
  for (int c = 0; c < kChannels; ++c) {
    const ProcessRep p = ProcessRep::kraus(rng.kraus(2, 1 + c % 4));
    const ChiMatrix q = qpt_standard(p);
    const ChiMatrix a = aapt(p);
    const ChiMatrix s = sspt::sspt(p, setup());
    worst = std::max({worst, max_diff(q.entries, a.entries), max_diff(q.entries, s.entries),
                      max_diff(a.entries, s.entries)});
  }
  return {worst <= 1e-7, std::to_string(kChannels) + " channels, max pairwise chi diff " +
                             fmt("%.2e", worst)};
}

Outcome ac4_twirl() {
  const std::vector<double> grid = cli::default_twirl_grid();
  double curve_err = 0.0;
  for (double phi : grid) {
    const ChiMatrix chi = sspt::sspt(ProcessRep::twirl(phi, 1, 2), setup());
    curve_err = std::max(curve_err, max_diff(chi.entries, cli::twirl_theory_chi(phi).entries));
  }

  struct Spot {
    double phi, ee, zz;
  };
  const std::vector<Spot> spots = {
      {0.0, 1.0, 0.0}, {0.5 * kPi, 0.5, 0.5}, {kPi, 0.5, 0.5}, {3.43 * kPi, 0.5099, 0.4901}};
  double spot_err = 0.0;
  for (const Spot& s : spots) {
    const ChiMatrix chi = sspt::sspt(ProcessRep::twirl(s.phi, 1, 2), setup());
    spot_err = std::max({spot_err, std::abs(chi(kEE, kEE) - s.ee), std::abs(chi(kZZ, kZZ) - s.zz)});
  }

  // Ensemble average of the whole register, then the same readout and solve.
  double oracle_err = 0.0;
  const Operator init = sspt_initial_state();
  const Operator& v = setup().readout_unitary;
  for (double phi : grid) {
    const Operator averaged = twirl_ensemble_oracle(init, phi, 10000);
    const TransitionRecord rec = measure_transitions(v * averaged * v.adjoint());
    const LambdaMatrix lambda = extract_lambda(reconstruct_state(rec, setup().map), 1);
    const ChiMatrix chi = solve_chi(setup().beta, lambda);
    oracle_err = std::max(oracle_err, max_diff(chi.entries, cli::twirl_theory_chi(phi).entries));
  }
  const bool pass = curve_err <= 1e-6 && spot_err <= 1e-3 && oracle_err <= 2e-3;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%zu points, curve err %.2e, spot err %.2e, ensemble oracle err %.2e",
                grid.size(), curve_err, spot_err, oracle_err);
  return {pass, buf};
}

Outcome ac5_noise() {
  cli::ExperimentConfig cfg;
  cfg.sweep_kind = cli::SweepKind::noise;
  cfg.grid = cli::default_noise_grid();
  cfg.seeds = 100;
  cfg.base_seed = 1;
  const std::vector<cli::NoiseRow> rows = cli::run_noise_sweep(cfg);

  std::map<std::string, std::vector<const cli::NoiseRow*>> curves;
  for (const cli::NoiseRow& r : rows) curves[r.process].push_back(&r);

  double worst_at_01 = 1.0;
  double worst_rise_sigma = 0.0;  // largest increase in units of the seed spread
  double worst_rise_se = 0.0;     // same, in units of the standard error
  for (const auto& [name, curve] : curves) {
    for (std::size_t k = 0; k < curve.size(); ++k) {
      if (std::abs(curve[k]->eta - 0.1) < 1e-12) {
        worst_at_01 = std::min(worst_at_01, curve[k]->fidelity_mean);
      }
      if (k == 0) continue;
      const cli::NoiseRow& a = *curve[k - 1];
      const cli::NoiseRow& b = *curve[k];
      const double rise = b.fidelity_mean - a.fidelity_mean;
      if (rise <= 0.0) continue;
      const double sigma = std::max(a.fidelity_std, b.fidelity_std);
      const double se = std::sqrt((a.fidelity_std * a.fidelity_std) / a.n_seeds +
                                  (b.fidelity_std * b.fidelity_std) / b.n_seeds);
      worst_rise_sigma = std::max(worst_rise_sigma, sigma > 0.0 ? rise / sigma : 1e9);
      worst_rise_se = std::max(worst_rise_se, se > 0.0 ? rise / se : 1e9);
    }
  }
  double spread = 0.0;
  for (std::size_t k = 0; k < cfg.grid.size(); ++k) {
    double lo = 1.0, hi = 0.0;
    for (const auto& [name, curve] : curves) {
      lo = std::min(lo, curve[k]->fidelity_mean);
      hi = std::max(hi, curve[k]->fidelity_mean);
    }
    spread = std::max(spread, hi - lo);
  }
  const bool monotone = worst_rise_sigma <= 1.0;
  const bool pass = worst_at_01 >= 0.9 && monotone && spread <= 0.05;
  char buf[260];
  std::snprintf(buf, sizeof buf,
                "min mean F at eta=0.1 %.4f, largest rise %.3f sigma (%.2f std errors), "
                "max gate spread %.4f",
                worst_at_01, worst_rise_sigma, worst_rise_se, spread);
  return {pass, buf};
}

Outcome ac6_cptp() {
  std::vector<ProcessRep> processes;
  for (const NamedProcess& g : standard_gates()) processes.push_back(g.process);
  Rng rng(606);
  for (int c = 0; c < 50; ++c) processes.push_back(ProcessRep::kraus(rng.kraus(2, 1 + c % 4)));
  for (double phi : cli::default_twirl_grid()) processes.push_back(ProcessRep::twirl(phi, 1, 2));

  double min_eig = 1.0, tp = 0.0, trace_res = 0.0;
  for (const ProcessRep& p : processes) {
    const SsptRun run = sspt_run(p, setup());
    const CptpReport r = validate_cptp(run.solution.chi);
    min_eig = std::min(min_eig, r.min_eigenvalue);
    tp = std::max(tp, r.tp_residual);
    trace_res = std::max(trace_res, lambda_trace_residual(run.lambda));
  }
  const bool pass = min_eig >= -1e-8 && tp <= 1e-8 && trace_res <= 1e-9;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu processes, min eig %.2e, tp residual %.2e, trace residual %.2e",
                processes.size(), min_eig, tp, trace_res);
  return {pass, buf};
}

Outcome ac7_round_trip() {
  const ReconstructionMap& map = setup().map;
  const Operator& v = setup().readout_unitary;
  Rng rng(707);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    Operator rho;
    if (k % 2 == 0) {
      rho = rng.density(4);
    } else {
      const ComplexVector psi = rng.ginibre(4, 1).col(0).normalized();
      rho = projector(psi);
    }
    const TransitionRecord rec = readout(v, rho, 1);
    worst = std::max(worst, max_diff(reconstruct_state(rec, map), rho));
    if (rec.size() != 12) return {false, "record has " + std::to_string(rec.size()) + " transitions"};
  }
  const bool shape = map.matrix.rows() == 24 && map.matrix.cols() == 15 && map.rank == 15;
  const bool pass = shape && worst <= 1e-9;
  char buf[200];
  std::snprintf(buf, sizeof buf, "map %ldx%ld rank %ld cond %.1f, 100 states max err %.2e",
                static_cast<long>(map.matrix.rows()), static_cast<long>(map.matrix.cols()),
                static_cast<long>(map.rank), map.condition_number, worst);
  return {pass, buf};
}

struct Criterion {
  const char* id;
  const char* title;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  constexpr double kNoBudget = std::numeric_limits<double>::infinity();
  const std::vector<Criterion> criteria = {
      {"AC1", "measurement-count table", 1.0, ac1_counts},
      {"AC2", "noiseless gate suite", 5.0, ac2_gates},
      {"AC3", "protocol equivalence", 30.0, ac3_equivalence},
      {"AC4", "twirl curve", 60.0, ac4_twirl},
      {"AC5", "noise robustness", 300.0, ac5_noise},
      {"AC6", "CPTP invariants", kNoBudget, ac6_cptp},
      {"AC7", "state readout round trip", kNoBudget, ac7_round_trip},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_s;
    const bool pass = out.pass && in_time;
    failures += !pass;
    std::printf("%s %s  %s: %s [%.2f s%s]\n", c.id, pass ? "PASS" : "FAIL", c.title,
                out.detail.c_str(), seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
