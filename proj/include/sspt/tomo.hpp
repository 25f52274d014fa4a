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

// Process tomography: the linear system beta * chi = lambda and three ways of
// obtaining lambda.
//
//   qpt_standard   one state tomography per input basis element
//   AAPT           joint_output + extract_lambda: a Bell-encoded input carries
//                  every basis element through a single application
//   sspt           AAPT read out in one shot through the NMR readout map
//
// lambda and chi are vectorized row-major over (j, k) and (m, n).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sspt/channels.hpp"
#include "sspt/nmr.hpp"
#include "sspt/opcore.hpp"

namespace sspt {

// lambda_jk: coefficient of the elementary basis element rho_k in the
// process output for rho_j.
struct LambdaMatrix {
  int n_qubits = 1;
  Operator entries;
};

// Rows (j, k), columns (m, n): Tr[(E~_m rho_j E~_n^dagger) rho_k^dagger].
struct BetaTensor {
  int n_qubits = 1;
  Operator entries;
};

struct ChiSolution {
  ChiMatrix chi;
  double asymmetry = 0.0;  // max |chi - chi^dagger| before symmetrization
  double residual = 0.0;   // ||beta chi - lambda||_2 of the raw solution
};

inline BetaTensor beta_tensor(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 2) {
    throw std::invalid_argument("beta_tensor: supported for 1 or 2 qubits");
  }
  const BasisSet rho = make_basis(BasisKind::elementary, n_qubits);
  const BasisSet fixed = make_basis(BasisKind::fixed_kraus, n_qubits);
  const auto n2 = static_cast<Index>(rho.size());
  const Index dim = rho.dim;
  Operator beta(n2 * n2, n2 * n2);
  for (Index j = 0; j < n2; ++j) {
    const Operator& rj = rho[static_cast<std::size_t>(j)];
    for (Index m = 0; m < n2; ++m) {
      const Operator left = fixed[static_cast<std::size_t>(m)] * rj;
      for (Index n = 0; n < n2; ++n) {
        const Operator out = left * fixed[static_cast<std::size_t>(n)].adjoint();
        // hs_inner(out, |a><b|) == out(a, b)
        for (Index k = 0; k < n2; ++k) {
          beta(j * n2 + k, m * n2 + n) = out(k / dim, k % dim);
        }
      }
    }
  }
  return {n_qubits, beta};
}

inline LambdaMatrix lambda_of(const ProcessRep& p) {
  const BasisSet rho = make_basis(BasisKind::elementary, p.n_qubits());
  const auto n2 = static_cast<Index>(rho.size());
  Operator lambda(n2, n2);
  for (Index j = 0; j < n2; ++j) {
    const Operator out = apply_process(p, rho[static_cast<std::size_t>(j)]);
    for (Index k = 0; k < n2; ++k) {
      lambda(j, k) = hs_inner(out, rho[static_cast<std::size_t>(k)]);
    }
  }
  return {p.n_qubits(), lambda};
}

// max_j |sum_k lambda_jk Tr[rho_k] - Tr[rho_j]|
inline double lambda_trace_residual(const LambdaMatrix& lambda) {
  const Index dim = Index{1} << lambda.n_qubits;
  const Index n2 = dim * dim;
  double worst = 0.0;
  for (Index j = 0; j < n2; ++j) {
    Complex tr_out{};
    for (Index k = 0; k < n2; ++k) {
      if (k / dim == k % dim) tr_out += lambda.entries(j, k);
    }
    const double tr_in = (j / dim == j % dim) ? 1.0 : 0.0;
    worst = std::max(worst, std::abs(tr_out - tr_in));
  }
  return worst;
}

inline ChiSolution solve_chi_detailed(const BetaTensor& beta,
                                      const LambdaMatrix& lambda) {
  if (beta.n_qubits != lambda.n_qubits ||
      beta.entries.rows() != lambda.entries.size()) {
    throw DimensionError("solve_chi: beta and lambda shapes differ");
  }
  Eigen::CompleteOrthogonalDecomposition<Operator> cod(beta.entries);
  if (cod.rank() < beta.entries.cols()) {
    const Index missing = beta.entries.cols() - cod.rank();
    throw RankError("solve_chi: beta has rank " + std::to_string(cod.rank()) +
                        " of " + std::to_string(beta.entries.cols()),
                    missing);
  }
  const ComplexVector rhs = vec_row_major(lambda.entries);
  const ComplexVector x = cod.solve(rhs);
  const Index n2 = lambda.entries.rows();
  const Operator raw = unvec_row_major(x, n2, n2);

  ChiSolution sol;
  sol.residual = (beta.entries * x - rhs).norm();
  sol.asymmetry = hermitian_deviation(raw);
  sol.chi = {lambda.n_qubits, 0.5 * (raw + raw.adjoint())};
  return sol;
}

inline ChiMatrix solve_chi(const BetaTensor& beta, const LambdaMatrix& lambda) {
  return solve_chi_detailed(beta, lambda).chi;
}

//------------------------------------------------------------------------------
// Standard QPT
//------------------------------------------------------------------------------

struct PureTerm {
  Operator state;  // preparable pure density operator
  Complex weight;
};

namespace detail {

inline Operator pure_state(Complex a0, Complex a1) {
  ComplexVector psi(2);
  psi << a0, a1;
  return projector(psi.normalized());
}

}  // namespace detail

/// Writes the single-qubit elementary element rho_j (j = 0..3, 0-based) as a
/// combination of preparable pure states |0>, |1>, |+>, |+i>:
///   |0><1| = |+><+| + i |+i><+i| - (1+i)/2 (|0><0| + |1><1|)
/// and |1><0| is its adjoint.
inline std::vector<PureTerm> decompose_elementary(Index j) {
  const Operator zero = detail::pure_state(1.0, 0.0);
  const Operator one = detail::pure_state(0.0, 1.0);
  const Operator plus = detail::pure_state(1.0, 1.0);
  const Operator plus_i = detail::pure_state(1.0, kI);
  switch (j) {
    case 0:
      return {{zero, 1.0}};
    case 1:
      return {{plus, 1.0},
              {plus_i, kI},
              {zero, -(1.0 + kI) / 2.0},
              {one, -(1.0 + kI) / 2.0}};
    case 2:
      return {{plus, 1.0},
              {plus_i, -kI},
              {zero, -(1.0 - kI) / 2.0},
              {one, -(1.0 - kI) / 2.0}};
    case 3:
      return {{one, 1.0}};
    default:
      throw std::invalid_argument("decompose_elementary: index must be 0..3");
  }
}

// Exact single-qubit state tomography from the expectation values of I, X, Y
// and Z.
inline Operator single_qubit_qst(const Operator& rho) {
  const Complex t = rho.trace();
  const Complex x = (rho * pauli::X()).trace();
  const Complex y = (rho * pauli::Y()).trace();
  const Complex z = (rho * pauli::Z()).trace();
  return 0.5 * (t * pauli::I() + x * pauli::X() + y * pauli::Y() + z * pauli::Z());
}

inline ChiMatrix qpt_standard(const ProcessRep& p) {
  if (p.n_qubits() != 1) {
    throw std::invalid_argument("qpt_standard: single-qubit processes only");
  }
  Operator lambda(4, 4);
  for (Index j = 0; j < 4; ++j) {
    Operator out = Operator::Zero(2, 2);
    for (const PureTerm& term : decompose_elementary(j)) {
      out += term.weight * single_qubit_qst(apply_process(p, term.state));
    }
    lambda.row(j) = vec_row_major(out).transpose();
  }
  return solve_chi(beta_tensor(1), {1, lambda});
}

//------------------------------------------------------------------------------
// Ancilla-assisted QPT
//------------------------------------------------------------------------------

// CNOT on an n-qubit register as a permutation matrix.
inline Operator cnot(int control, int target, int n_qubits) {
  const Index dim = Index{1} << n_qubits;
  Operator u = Operator::Zero(dim, dim);
  const Index cbit = Index{1} << (n_qubits - 1 - control);
  const Index tbit = Index{1} << (n_qubits - 1 - target);
  for (Index b = 0; b < dim; ++b) u((b & cbit) ? (b ^ tbit) : b, b) = 1.0;
  return u;
}

/// 2n-qubit input sum_a |a>_A1 |a>_S / sqrt(2^n) as a density operator,
/// prepared by Hadamards on A1 (qubits 0..n-1) followed by CNOTs A1_i -> S_i.
inline Operator prepare_aapt_input(int n) {
  if (n < 1) throw std::invalid_argument("prepare_aapt_input: n < 1");
  const int total = 2 * n;
  const Index dim = Index{1} << total;
  ComplexVector psi = ComplexVector::Zero(dim);
  psi(0) = 1.0;
  const Operator h = gate_unitary(Gate::hadamard);
  for (int a = 0; a < n; ++a) psi = embed(h, a, total) * psi;
  for (int a = 0; a < n; ++a) psi = cnot(a, n + a, total) * psi;
  return projector(psi);
}

// (1/2^n) sum_ab |a><b|_A1 (x) eps(|a><b|_S)
inline Operator joint_output(const ProcessRep& p, int n) {
  if (p.n_qubits() != n) {
    throw DimensionError("joint_output: process acts on " +
                         std::to_string(p.n_qubits()) + " qubits, expected " +
                         std::to_string(n));
  }
  const Index dim = Index{1} << n;
  Operator out = Operator::Zero(dim * dim, dim * dim);
  for (Index a = 0; a < dim; ++a) {
    for (Index b = 0; b < dim; ++b) {
      out.block(a * dim, b * dim, dim, dim) =
          apply_process(p, ket_bra(dim, a, b)) / static_cast<double>(dim);
    }
  }
  return out;
}

/// Reads lambda out of an A1 (x) S joint state: block (a, b) of the A1 index,
/// times 2^n, is eps(rho_j) with j = a * 2^n + b.
inline LambdaMatrix extract_lambda(const Operator& joint, int n) {
  const Index dim = Index{1} << n;
  if (joint.rows() != dim * dim || joint.cols() != dim * dim) {
    throw DimensionError("extract_lambda: joint state has dimension " +
                         std::to_string(joint.rows()) + ", expected " +
                         std::to_string(dim * dim));
  }
  Operator lambda(dim * dim, dim * dim);
  for (Index a = 0; a < dim; ++a) {
    for (Index b = 0; b < dim; ++b) {
      const Operator block =
          joint.block(a * dim, b * dim, dim, dim) * static_cast<double>(dim);
      lambda.row(a * dim + b) = vec_row_major(block).transpose();
    }
  }
  return {n, lambda};
}

inline ChiMatrix aapt(const ProcessRep& p) {
  const int n = p.n_qubits();
  return solve_chi(beta_tensor(n), extract_lambda(joint_output(p, n), n));
}

//------------------------------------------------------------------------------
// Single-shot process tomography
//------------------------------------------------------------------------------

// Readout maps at or above this condition number are rejected.
inline constexpr double kMaxReadoutCondition = 100.0;

// Register layout of the three-spin experiment.
inline constexpr int kAncillaA1 = 0;
inline constexpr int kSystem = 1;
inline constexpr int kAncillaA2 = 2;
inline constexpr int kRegisterQubits = 3;

/// Everything about a single-shot experiment that does not depend on the
/// process: readout unitary, reconstruction map, beta and the signal scale
/// used to express noise as a fraction of peak amplitude. Immutable after
/// construction and safe to share between threads.
struct SsptSetup {
  SpinSystem spins;
  Operator readout_unitary;
  ReconstructionMap map;
  BetaTensor beta;
  double signal_scale = 1.0;
};

struct NoiseSpec {
  double eta = 0.0;
  std::uint64_t seed = 0;
};

struct SsptRun {
  TransitionRecord record;  // as fed to the reconstruction (noise included)
  Operator joint_state;     // reconstructed A1 (x) S state
  LambdaMatrix lambda;
  ChiSolution solution;
};

inline Operator sspt_initial_state() {
  return tensor(prepare_aapt_input(1), maximally_mixed(2));
}

inline SsptSetup make_sspt_setup(const SpinSystem& sys,
                                 double max_condition = kMaxReadoutCondition) {
  sys.validate();
  if (sys.n_spins() != kRegisterQubits) {
    throw std::invalid_argument("sspt: spin system must have 3 spins (A1, S, A2)");
  }
  SsptSetup setup;
  setup.spins = sys;
  setup.readout_unitary = aaqst_unitary(sys);
  setup.map = reconstruction_map(setup.readout_unitary, 2, 1);
  if (!setup.map.full_rank()) {
    throw RankError("sspt: readout map has rank " +
                        std::to_string(setup.map.rank) + " of " +
                        std::to_string(setup.map.unknowns()),
                    setup.map.unknowns() - setup.map.rank);
  }
  if (!(setup.map.condition_number < max_condition)) {
    throw RankError("sspt: readout map condition number " +
                        std::to_string(setup.map.condition_number) +
                        " exceeds limit " + std::to_string(max_condition),
                    0);
  }
  setup.beta = beta_tensor(1);
  const Operator& v = setup.readout_unitary;
  const TransitionRecord reference =
      measure_transitions(v * sspt_initial_state() * v.adjoint());
  setup.signal_scale = reference.amplitudes.cwiseAbs().maxCoeff();
  return setup;
}

inline SsptRun sspt_run(const ProcessRep& p, const SsptSetup& setup,
                        const std::optional<NoiseSpec>& noise = std::nullopt) {
  if (p.n_qubits() != 1) {
    throw std::invalid_argument("sspt: single-qubit processes only");
  }
  const Operator state =
      apply_process_on(p, sspt_initial_state(), kRegisterQubits, kSystem);
  const Operator& v = setup.readout_unitary;
  SsptRun run;
  run.record = measure_transitions(v * state * v.adjoint());
  if (noise && noise->eta != 0.0) {
    TransitionRecord scaled = run.record;
    scaled.amplitudes /= setup.signal_scale;
    run.record = add_noise(scaled, noise->eta, noise->seed);
    run.record.amplitudes *= setup.signal_scale;
  }
  run.joint_state = reconstruct_state(run.record, setup.map);
  run.lambda = extract_lambda(run.joint_state, 1);
  run.solution = solve_chi_detailed(setup.beta, run.lambda);
  return run;
}

inline ChiMatrix sspt(const ProcessRep& p, const SsptSetup& setup,
                      const std::optional<NoiseSpec>& noise = std::nullopt) {
  return sspt_run(p, setup, noise).solution.chi;
}

inline ChiMatrix sspt(const ProcessRep& p, const SpinSystem& sys,
                      const std::optional<NoiseSpec>& noise = std::nullopt) {
  return sspt(p, make_sspt_setup(sys), noise);
}

//------------------------------------------------------------------------------
// Measurement counts
//------------------------------------------------------------------------------

struct CountReport {
  int n = 0;
  std::uint64_t m_qpt = 0;
  std::uint64_t m_aapt = 0;
  int n_a1 = 0;
  int n_a2 = 0;
  std::uint64_t m_sspt = 1;
};

/// Independent measurements for an n-qubit process: standard QPT needs
/// N^2 * ceil(N/n), AAPT ceil(N^2 / 2n), and single-shot QPT one, with the
/// smallest A2 register such that (2n + n_A2) * 2^(2n + n_A2) >= N^4 - 1.
inline CountReport counts(int n) {
  if (n < 1 || n > 12) throw std::invalid_argument("counts: n must be 1..12");
  auto ceil_div = [](std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; };
  const std::uint64_t big_n = std::uint64_t{1} << n;
  const auto nn = static_cast<std::uint64_t>(n);
  CountReport r;
  r.n = n;
  r.m_qpt = big_n * big_n * ceil_div(big_n, nn);
  r.m_aapt = ceil_div(big_n * big_n, 2 * nn);
  r.n_a1 = n;
  const std::uint64_t unknowns = (std::uint64_t{1} << (4 * n)) - 1;
  int k = 0;
  while (static_cast<std::uint64_t>(2 * n + k) * (std::uint64_t{1} << (2 * n + k)) <
         unknowns) {
    ++k;
  }
  r.n_a2 = k;
  r.m_sspt = 1;
  return r;
}

}  // namespace sspt
