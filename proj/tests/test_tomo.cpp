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

#include "sspt/tomo.hpp"

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace sspt;
using sspt::testing::max_diff;
using sspt::testing::Rng;

namespace {

const SsptSetup& default_setup() {
  static const SsptSetup setup = make_sspt_setup(default_spin_system());
  return setup;
}

double chi_diff(const ChiMatrix& a, const ChiMatrix& b) {
  return max_diff(a.entries, b.entries);
}

}  // namespace

TEST(tomo, beta_matches_trace_definition) {
  for (int n = 1; n <= 2; ++n) {
    const BetaTensor beta = beta_tensor(n);
    const BasisSet rho = make_basis(BasisKind::elementary, n);
    const BasisSet fixed = make_basis(BasisKind::fixed_kraus, n);
    const auto n2 = static_cast<Index>(rho.size());
    ASSERT_EQ(beta.entries.rows(), n2 * n2);
    double worst = 0.0;
    for (Index j = 0; j < n2; ++j) {
      for (Index k = 0; k < n2; ++k) {
        for (Index m = 0; m < n2; ++m) {
          for (Index c = 0; c < n2; ++c) {
            const Operator prod = fixed[m] * rho[j] * fixed[c].adjoint() *
                                  rho[k].adjoint();
            worst = std::max(worst, std::abs(beta.entries(j * n2 + k, m * n2 + c) -
                                             prod.trace()));
          }
        }
      }
    }
    EXPECT_EQ(worst, 0.0) << "n=" << n;
  }
  EXPECT_THROW(beta_tensor(3), std::invalid_argument);
}

TEST(tomo, beta_is_invertible) {
  for (int n = 1; n <= 2; ++n) {
    const BetaTensor beta = beta_tensor(n);
    Eigen::CompleteOrthogonalDecomposition<Operator> cod(beta.entries);
    EXPECT_EQ(cod.rank(), beta.entries.cols());
  }
}

TEST(tomo, lambda_of_nop_is_identity) {
  EXPECT_LT(max_diff(lambda_of(gate(Gate::nop)).entries, identity(4)), 1e-15);
}

TEST(tomo, lambda_trace_residual_vanishes_for_channels) {
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const ProcessRep p = ProcessRep::kraus(rng.kraus(2, 1 + trial % 4));
    EXPECT_LT(lambda_trace_residual(lambda_of(p)), 1e-13);
  }
  LambdaMatrix broken{1, identity(4)};
  broken.entries(0, 3) = 0.25;
  EXPECT_NEAR(lambda_trace_residual(broken), 0.25, 1e-15);
}

TEST(tomo, solve_chi_inverts_beta) {
  Rng rng(42);
  for (int n = 1; n <= 2; ++n) {
    const Index dim = Index{1} << n;
    for (int trial = 0; trial < 5; ++trial) {
      const ProcessRep p = ProcessRep::kraus(rng.kraus(dim, 2));
      const ChiSolution sol = solve_chi_detailed(beta_tensor(n), lambda_of(p));
      EXPECT_LT(chi_diff(sol.chi, chi_of(p)), 1e-12);
      EXPECT_LT(sol.asymmetry, 1e-12);
      EXPECT_LT(sol.residual, 1e-12);
    }
  }
}

TEST(tomo, solve_chi_rejects_shape_mismatch) {
  EXPECT_THROW(solve_chi(beta_tensor(1), lambda_of(ProcessRep::kraus({identity(4)}))),
               DimensionError);
}

TEST(tomo, solve_chi_reports_rank_deficiency) {
  BetaTensor beta = beta_tensor(1);
  beta.entries.col(5).setZero();
  try {
    solve_chi(beta, lambda_of(gate(Gate::nop)));
    FAIL() << "expected RankError";
  } catch (const RankError& e) {
    EXPECT_EQ(e.deficiency(), 1);
  }
}

TEST(tomo, decompose_elementary_reassembles_basis) {
  const BasisSet basis = make_basis(BasisKind::elementary, 1);
  for (Index j = 0; j < 4; ++j) {
    Operator sum = Operator::Zero(2, 2);
    for (const PureTerm& t : decompose_elementary(j)) {
      EXPECT_NEAR(std::abs(t.state.trace() - 1.0), 0.0, 1e-15);
      EXPECT_LT(max_diff(t.state * t.state, t.state), 1e-15);
      sum += t.weight * t.state;
    }
    EXPECT_LT(max_diff(sum, basis[static_cast<std::size_t>(j)]), 1e-15);
  }
  EXPECT_THROW(decompose_elementary(4), std::invalid_argument);
}

TEST(tomo, single_qubit_qst_is_exact) {
  Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const Operator rho = rng.density(2);
    EXPECT_LT(max_diff(single_qubit_qst(rho), rho), 1e-15);
  }
}

TEST(tomo, cnot_truth_table) {
  const Operator c = cnot(0, 1, 2);
  EXPECT_EQ(c(0, 0), Complex(1.0));
  EXPECT_EQ(c(1, 1), Complex(1.0));
  EXPECT_EQ(c(3, 2), Complex(1.0));
  EXPECT_EQ(c(2, 3), Complex(1.0));
}

TEST(tomo, aapt_input_is_bell_state) {
  const Operator in = prepare_aapt_input(1);
  ComplexVector bell = ComplexVector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  EXPECT_LT(max_diff(in, projector(bell)), 1e-15);

  const Operator in2 = prepare_aapt_input(2);
  // Marginal on the system register is maximally mixed.
  EXPECT_LT(max_diff(partial_trace(in2, {4, 4}, {1}), identity(4) / 4.0), 1e-15);
}

TEST(tomo, joint_output_is_choi_state) {
  Rng rng(44);
  for (int n = 1; n <= 2; ++n) {
    const Index dim = Index{1} << n;
    const ProcessRep p = ProcessRep::kraus(rng.kraus(dim, 2));
    // (I (x) eps)(|Phi><Phi|) evaluated directly with lifted Kraus operators.
    const Operator in = prepare_aapt_input(n);
    Operator oracle = Operator::Zero(dim * dim, dim * dim);
    for (const Operator& e : p.get<KrausList>()) {
      const Operator big = tensor(identity(dim), e);
      oracle += big * in * big.adjoint();
    }
    EXPECT_LT(max_diff(joint_output(p, n), oracle), 1e-13);
  }
  EXPECT_THROW(joint_output(gate(Gate::nop), 2), DimensionError);
}

TEST(tomo, extract_lambda_inverts_joint_output) {
  Rng rng(45);
  const ProcessRep p = ProcessRep::kraus(rng.kraus(4, 3));
  EXPECT_LT(max_diff(extract_lambda(joint_output(p, 2), 2).entries, lambda_of(p).entries),
            1e-13);
  EXPECT_THROW(extract_lambda(identity(8), 1), DimensionError);
}

TEST(tomo, qpt_and_aapt_recover_gates) {
  for (const NamedProcess& g : standard_gates()) {
    const ChiMatrix truth = chi_of(g.process);
    EXPECT_LT(chi_diff(qpt_standard(g.process), truth), 1e-13) << g.name;
    EXPECT_LT(chi_diff(aapt(g.process), truth), 1e-13) << g.name;
  }
}

TEST(tomo, aapt_recovers_two_qubit_channels) {
  Rng rng(46);
  for (int trial = 0; trial < 5; ++trial) {
    const ProcessRep p = ProcessRep::kraus(rng.kraus(4, 1 + trial));
    EXPECT_LT(chi_diff(aapt(p), chi_of(p)), 1e-12);
  }
  EXPECT_THROW(qpt_standard(ProcessRep::kraus({identity(4)})), std::invalid_argument);
}

TEST(tomo, sspt_setup_is_well_conditioned) {
  const SsptSetup& setup = default_setup();
  EXPECT_EQ(setup.map.matrix.rows(), 24);
  EXPECT_EQ(setup.map.matrix.cols(), 15);
  EXPECT_EQ(setup.map.rank, 15);
  EXPECT_LT(setup.map.condition_number, kMaxReadoutCondition);
  EXPECT_GT(setup.signal_scale, 0.0);
}

TEST(tomo, sspt_initial_state_layout) {
  const Operator init = sspt_initial_state();
  EXPECT_LT(max_diff(partial_trace(init, {2, 2, 2}, {2}), identity(2) / 2.0), 1e-15);
  EXPECT_LT(max_diff(partial_trace(init, {2, 2, 2}, {0, 1}), prepare_aapt_input(1)),
            1e-15);
}

TEST(tomo, sspt_recovers_gates_noiselessly) {
  for (const NamedProcess& g : standard_gates()) {
    const SsptRun run = sspt_run(g.process, default_setup());
    EXPECT_LT(chi_diff(run.solution.chi, chi_of(g.process)), 1e-10) << g.name;
    EXPECT_EQ(run.record.size(), 12);
  }
}

TEST(tomo, sspt_recovers_random_channels) {
  Rng rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    const ProcessRep p = ProcessRep::kraus(rng.kraus(2, 1 + trial % 4));
    EXPECT_LT(chi_diff(sspt::sspt(p, default_setup()), chi_of(p)), 1e-10);
  }
}

TEST(tomo, sspt_zero_noise_matches_noiseless) {
  const ProcessRep p = gate(Gate::hadamard);
  const ChiMatrix a = sspt::sspt(p, default_setup());
  const ChiMatrix b = sspt::sspt(p, default_setup(), NoiseSpec{0.0, 99});
  EXPECT_EQ(a.entries, b.entries);
}

TEST(tomo, sspt_noise_is_seed_deterministic) {
  const ProcessRep p = gate(Gate::not_x);
  const ChiMatrix a = sspt::sspt(p, default_setup(), NoiseSpec{0.1, 7});
  const ChiMatrix b = sspt::sspt(p, default_setup(), NoiseSpec{0.1, 7});
  const ChiMatrix c = sspt::sspt(p, default_setup(), NoiseSpec{0.1, 8});
  EXPECT_EQ(a.entries, b.entries);
  EXPECT_NE(a.entries, c.entries);
}

TEST(tomo, sspt_rejects_ill_conditioned_spin_system) {
  SpinSystem sys = default_spin_system();
  sys.chemical_shifts_hz = {0.0, 0.0, 0.0};
  sys.j_couplings_hz.setZero();
  EXPECT_THROW(make_sspt_setup(sys), RankError);
  EXPECT_THROW(make_sspt_setup(default_spin_system(), 1.0), RankError);
}

TEST(tomo, sspt_requires_three_spins_and_one_qubit_process) {
  SpinSystem sys = default_spin_system();
  sys.chemical_shifts_hz.pop_back();
  sys.j_couplings_hz = RealMatrix::Zero(2, 2);
  EXPECT_THROW(make_sspt_setup(sys), std::invalid_argument);
  EXPECT_THROW(sspt_run(ProcessRep::kraus({identity(4)}), default_setup()),
               std::invalid_argument);
}

TEST(tomo, counts_examples) {
  const CountReport one = counts(1);
  EXPECT_EQ(one.m_qpt, 8u);
  EXPECT_EQ(one.m_aapt, 2u);
  EXPECT_EQ(one.n_a1, 1);
  EXPECT_EQ(one.n_a2, 1);
  EXPECT_EQ(one.m_sspt, 1u);
  const CountReport three = counts(3);
  EXPECT_EQ(three.m_qpt, 192u);
  EXPECT_EQ(three.m_aapt, 11u);
  EXPECT_EQ(three.n_a2, 3);
  const CountReport five = counts(5);
  EXPECT_EQ(five.m_qpt, 7168u);
  EXPECT_EQ(five.m_aapt, 103u);
  EXPECT_EQ(five.n_a1, 5);
  EXPECT_EQ(five.n_a2, 6);
  EXPECT_THROW(counts(0), std::invalid_argument);
  EXPECT_THROW(counts(13), std::invalid_argument);
}

TEST(tomo, counts_ancilla_is_minimal) {
  for (int n = 1; n <= 12; ++n) {
    const CountReport r = counts(n);
    const double unknowns = std::pow(2.0, 4 * n) - 1.0;
    auto capacity = [&](int k) { return (2.0 * n + k) * std::pow(2.0, 2 * n + k); };
    EXPECT_GE(capacity(r.n_a2), unknowns) << n;
    if (r.n_a2 > 0) {
      EXPECT_LT(capacity(r.n_a2 - 1), unknowns) << n;
    }
    EXPECT_EQ(r.m_sspt, 1u);
  }
}

TEST(tomo, sspt_rejects_negative_noise) {
  EXPECT_THROW(sspt::sspt(gate(Gate::nop), default_setup(), NoiseSpec{-0.01, 1}),
               std::invalid_argument);
}
