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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sspt/opcore.hpp"

namespace sspt {

using KrausList = std::vector<Operator>;

// Process matrix over the fixed-kraus basis {I, X, -iY, Z}^{(x)n}.
struct ChiMatrix {
  int n_qubits = 1;
  Operator entries;

  Complex operator()(Index m, Index n) const { return entries(m, n); }
};

// Gradient twirl: average of exp(-i phi/2 sum_j Z_j) over phi in [-phi_max,
// phi_max] on `acting_qubits` qubits.
struct Twirl {
  double phi_max = 0.0;
  int acting_qubits = 1;
};

//------------------------------------------------------------------------------
// ProcessRep
//------------------------------------------------------------------------------

class ProcessRep {
 public:
  using Variant = std::variant<KrausList, ChiMatrix, Twirl>;

  // Trace-preserving Kraus list: sum_i E_i^dagger E_i = I within 1e-10.
  static ProcessRep kraus(KrausList ops) {
    if (ops.empty()) throw std::invalid_argument("kraus: empty operator list");
    const Index dim = ops.front().rows();
    const int n = qubit_count(dim);
    Operator completeness = Operator::Zero(dim, dim);
    for (const Operator& e : ops) {
      if (e.rows() != dim || e.cols() != dim) {
        throw DimensionError("kraus: operators differ in dimension");
      }
      completeness += e.adjoint() * e;
    }
    if (max_abs(completeness - identity(dim)) > kStructureTol) {
      throw std::invalid_argument(
          "kraus: operators violate the completeness relation");
    }
    return ProcessRep(n, std::move(ops));
  }

  static ProcessRep chi(ChiMatrix chi) {
    const Index expected = Index{1} << (2 * chi.n_qubits);
    if (chi.entries.rows() != expected || chi.entries.cols() != expected) {
      throw DimensionError("chi: matrix must be 4^n x 4^n");
    }
    const int n = chi.n_qubits;
    return ProcessRep(n, std::move(chi));
  }

  // acting_qubits == n_qubits twirls the system alone; acting_qubits ==
  // 2 * n_qubits twirls the system together with its Bell-paired ancilla
  // register, which doubles every coherence order seen by the system.
  static ProcessRep twirl(double phi_max, int n_qubits, int acting_qubits) {
    if (!(phi_max >= 0.0)) throw std::invalid_argument("twirl: phi_max < 0");
    if (n_qubits < 1) throw std::invalid_argument("twirl: n_qubits < 1");
    if (acting_qubits != n_qubits && acting_qubits != 2 * n_qubits) {
      throw std::invalid_argument(
          "twirl: acting_qubits must be n_qubits or 2 * n_qubits");
    }
    return ProcessRep(n_qubits, Twirl{phi_max, acting_qubits});
  }

  int n_qubits() const { return n_qubits_; }
  Index dim() const { return Index{1} << n_qubits_; }
  const Variant& variant() const { return rep_; }

  template <typename T>
  bool holds() const {
    return std::holds_alternative<T>(rep_);
  }
  template <typename T>
  const T& get() const {
    return std::get<T>(rep_);
  }

 private:
  ProcessRep(int n, Variant rep) : n_qubits_(n), rep_(std::move(rep)) {}

  int n_qubits_;
  Variant rep_;
};

//------------------------------------------------------------------------------
// Twirl helpers
//------------------------------------------------------------------------------

// sin(x)/x with the removable singularity filled: sinc(0) == 1 exactly.
inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// Coherence order of |l><m|: half the difference of the spin-quantum-number
// sums, q = 1/2 sum_j [(-1)^{l_j} - (-1)^{m_j}].
inline int coherence_order(Index l, Index m, int n_qubits) {
  const Index dim = Index{1} << n_qubits;
  if (l < 0 || m < 0 || l >= dim || m >= dim) {
    throw std::invalid_argument("coherence_order: index out of range");
  }
  int twice_q = 0;
  for (int j = 0; j < n_qubits; ++j) {
    const int lj = static_cast<int>((l >> j) & 1);
    const int mj = static_cast<int>((m >> j) & 1);
    twice_q += (lj ? -1 : 1) - (mj ? -1 : 1);
  }
  return twice_q / 2;
}

// Entrywise sinc(q_lm * phi) dephasing of an n-qubit matrix.
inline Operator dephase_entrywise(const Operator& m, double phi, int n_qubits,
                                  double order_scale = 1.0) {
  Operator out = m;
  for (Index l = 0; l < m.rows(); ++l) {
    for (Index c = 0; c < m.cols(); ++c) {
      const int q = coherence_order(l, c, n_qubits);
      if (q != 0) out(l, c) *= sinc(order_scale * q * phi);
    }
  }
  return out;
}

inline double twirl_order_scale(const Twirl& t, int n_qubits) {
  return static_cast<double>(t.acting_qubits) / n_qubits;
}

//------------------------------------------------------------------------------
// apply_process
//------------------------------------------------------------------------------

// Linear extension of the process to an arbitrary (possibly non-Hermitian)
// matrix on the process's own register.
inline Operator apply_process(const ProcessRep& p, const Operator& m) {
  require_square(m, "apply_process");
  if (m.rows() != p.dim()) {
    throw DimensionError("apply_process: operator dimension " +
                         std::to_string(m.rows()) + " does not match process "
                         "dimension " + std::to_string(p.dim()));
  }
  if (p.holds<KrausList>()) {
    Operator out = Operator::Zero(m.rows(), m.cols());
    for (const Operator& e : p.get<KrausList>()) out += e * m * e.adjoint();
    return out;
  }
  if (p.holds<ChiMatrix>()) {
    const ChiMatrix& chi = p.get<ChiMatrix>();
    const BasisSet basis = make_basis(BasisKind::fixed_kraus, p.n_qubits());
    Operator out = Operator::Zero(m.rows(), m.cols());
    for (std::size_t a = 0; a < basis.size(); ++a) {
      const Operator left = basis[a] * m;
      for (std::size_t b = 0; b < basis.size(); ++b) {
        const Complex c = chi.entries(static_cast<Index>(a), static_cast<Index>(b));
        if (c != Complex{}) out += c * left * basis[b].adjoint();
      }
    }
    return out;
  }
  const Twirl& t = p.get<Twirl>();
  return dephase_entrywise(m, t.phi_max, p.n_qubits(),
                           twirl_order_scale(t, p.n_qubits()));
}

// Applies a process to `offset .. offset + p.n_qubits() - 1` of a larger
// register. A joint twirl (acting on more qubits than the process system)
// dephases the whole register, matching a field gradient that hits every spin.
inline Operator apply_process_on(const ProcessRep& p, const Operator& m,
                                 int register_qubits, int offset) {
  require_square(m, "apply_process_on");
  if (m.rows() != (Index{1} << register_qubits)) {
    throw DimensionError("apply_process_on: register dimension mismatch");
  }
  if (offset < 0 || offset + p.n_qubits() > register_qubits) {
    throw DimensionError("apply_process_on: target qubits out of range");
  }
  const Operator before = identity(Index{1} << offset);
  const Operator after =
      identity(Index{1} << (register_qubits - offset - p.n_qubits()));
  auto lift = [&](const Operator& e) { return tensor(tensor(before, e), after); };

  if (p.holds<KrausList>()) {
    Operator out = Operator::Zero(m.rows(), m.cols());
    for (const Operator& e : p.get<KrausList>()) {
      const Operator big = lift(e);
      out += big * m * big.adjoint();
    }
    return out;
  }
  if (p.holds<ChiMatrix>()) {
    const ChiMatrix& chi = p.get<ChiMatrix>();
    const BasisSet basis = make_basis(BasisKind::fixed_kraus, p.n_qubits());
    std::vector<Operator> lifted;
    lifted.reserve(basis.size());
    for (const Operator& e : basis.elements) lifted.push_back(lift(e));
    Operator out = Operator::Zero(m.rows(), m.cols());
    for (std::size_t a = 0; a < lifted.size(); ++a) {
      for (std::size_t b = 0; b < lifted.size(); ++b) {
        const Complex c = chi.entries(static_cast<Index>(a), static_cast<Index>(b));
        if (c != Complex{}) out += c * lifted[a] * m * lifted[b].adjoint();
      }
    }
    return out;
  }
  const Twirl& t = p.get<Twirl>();
  if (t.acting_qubits > p.n_qubits()) {
    return dephase_entrywise(m, t.phi_max, register_qubits);
  }
  // Coherence order counted over the target qubits only.
  Operator out = m;
  const Index dim = m.rows();
  const int shift = register_qubits - offset - p.n_qubits();
  const Index mask = (Index{1} << p.n_qubits()) - 1;
  for (Index l = 0; l < dim; ++l) {
    for (Index c = 0; c < dim; ++c) {
      const int q = coherence_order((l >> shift) & mask, (c >> shift) & mask,
                                    p.n_qubits());
      if (q != 0) out(l, c) *= sinc(q * t.phi_max);
    }
  }
  return out;
}

//------------------------------------------------------------------------------
// Gate library
//------------------------------------------------------------------------------

enum class Gate { nop, not_x, not_y, hadamard, phase };

inline Operator gate_unitary(Gate g, double theta = 0.0) {
  switch (g) {
    case Gate::nop:
      return pauli::I();
    case Gate::not_x:  // exp(-i pi X / 2)
      return -kI * pauli::X();
    case Gate::not_y:  // exp(-i pi Y / 2)
      return -kI * pauli::Y();
    case Gate::hadamard:
      return (pauli::X() + pauli::Z()) / std::sqrt(2.0);
    case Gate::phase: {
      Operator u = pauli::I();
      u(1, 1) = std::exp(kI * theta);
      return u;
    }
  }
  throw std::invalid_argument("gate_unitary: unknown gate");
}

inline ProcessRep gate(Gate g, double theta = 0.0) {
  return ProcessRep::kraus({gate_unitary(g, theta)});
}

// Accepts NOP, NOT-X, NOT-Y, Hadamard, Phase-pi, Phase-pi/4 and Phase, the
// last one taking `theta` in radians.
inline ProcessRep gate(std::string_view name, double theta = 0.0) {
  if (name == "NOP") return gate(Gate::nop);
  if (name == "NOT-X") return gate(Gate::not_x);
  if (name == "NOT-Y") return gate(Gate::not_y);
  if (name == "Hadamard") return gate(Gate::hadamard);
  if (name == "Phase-pi") return gate(Gate::phase, kPi);
  if (name == "Phase-pi/4") return gate(Gate::phase, kPi / 4.0);
  if (name == "Phase") return gate(Gate::phase, theta);
  throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
}

struct NamedProcess {
  std::string name;
  ProcessRep process;
};

// The six single-qubit gates characterized in the gate suite.
inline std::vector<NamedProcess> standard_gates() {
  std::vector<NamedProcess> out;
  for (const char* name :
       {"NOP", "NOT-X", "NOT-Y", "Hadamard", "Phase-pi", "Phase-pi/4"}) {
    out.push_back({name, gate(name)});
  }
  return out;
}

//------------------------------------------------------------------------------
// chi_of
//------------------------------------------------------------------------------

// {sqrt((1+s)/2) I, sqrt((1-s)/2) Z}: single-qubit phase damping that scales
// the off-diagonal elements by s.
inline KrausList phase_damping_kraus(double s) {
  return {std::sqrt((1.0 + s) / 2.0) * pauli::I(),
          std::sqrt((1.0 - s) / 2.0) * pauli::Z()};
}

inline ChiMatrix chi_from_kraus(const KrausList& ops, int n_qubits) {
  const BasisSet basis = make_basis(BasisKind::fixed_kraus, n_qubits);
  const auto size = static_cast<Index>(basis.size());
  const double dim = static_cast<double>(basis.dim);
  Operator chi = Operator::Zero(size, size);
  for (const Operator& e : ops) {
    ComplexVector coeff(size);
    for (Index m = 0; m < size; ++m) {
      coeff(m) = hs_inner(e, basis[static_cast<std::size_t>(m)]) / dim;
    }
    chi += coeff * coeff.adjoint();
  }
  return {n_qubits, chi};
}

// Twirls are diagonal channels: with weights w_lm, chi is supported on the
// {I, Z} strings and equals the Walsh transform
// chi_ab = 4^-n sum_lm w_lm (-1)^{a.l + b.m}.
inline ChiMatrix chi_from_dephasing(const Twirl& t, int n_qubits) {
  const Index dim = Index{1} << n_qubits;
  const double scale = twirl_order_scale(t, n_qubits);
  Operator chi = Operator::Zero(dim * dim, dim * dim);
  // Fixed-basis index of the Z-string with bit pattern a: per qubit I -> 0,
  // Z -> 3, base 4.
  auto z_string_index = [&](Index a) {
    Index idx = 0;
    for (int q = 0; q < n_qubits; ++q) {
      const Index bit = (a >> (n_qubits - 1 - q)) & 1;
      idx = idx * 4 + (bit ? 3 : 0);
    }
    return idx;
  };
  auto parity = [](Index x) {
    int p = 0;
    while (x) {
      p ^= static_cast<int>(x & 1);
      x >>= 1;
    }
    return p ? -1.0 : 1.0;
  };
  for (Index a = 0; a < dim; ++a) {
    for (Index b = 0; b < dim; ++b) {
      double acc = 0.0;
      for (Index l = 0; l < dim; ++l) {
        for (Index m = 0; m < dim; ++m) {
          const double w = sinc(scale * coherence_order(l, m, n_qubits) * t.phi_max);
          acc += w * parity(a & l) * parity(b & m);
        }
      }
      chi(z_string_index(a), z_string_index(b)) =
          acc / static_cast<double>(dim * dim);
    }
  }
  return {n_qubits, chi};
}

// chi_mn = sum_i e_im e_in^* with e_im = Tr[E~_m^dagger E_i] / dim.
inline ChiMatrix chi_of(const ProcessRep& p) {
  if (p.holds<KrausList>()) return chi_from_kraus(p.get<KrausList>(), p.n_qubits());
  if (p.holds<ChiMatrix>()) return p.get<ChiMatrix>();
  const Twirl& t = p.get<Twirl>();
  if (p.n_qubits() == 1) {
    const double s = sinc(twirl_order_scale(t, 1) * t.phi_max);
    return chi_from_kraus(phase_damping_kraus(s), 1);
  }
  return chi_from_dephasing(t, p.n_qubits());
}

//------------------------------------------------------------------------------
// Ensemble oracle
//------------------------------------------------------------------------------

enum class Quadrature { midpoint, uniform_random };

/// Numerical ensemble average (1 / 2 Phi) int_{-Phi}^{Phi} U_phi M U_phi^dagger
/// with U_phi = exp(-i phi/2 sum_j Z_j) over every qubit of M. Each U_phi is
/// built with evolve(), independent of the closed-form sinc route.
inline Operator twirl_ensemble_oracle(const Operator& m, double phi_max,
                                      int samples,
                                      Quadrature rule = Quadrature::midpoint,
                                      std::uint64_t seed = 0) {
  require_square(m, "twirl_ensemble_oracle");
  if (samples < 2) throw std::invalid_argument("twirl_ensemble_oracle: samples < 2");
  if (phi_max == 0.0) return m;
  const int n = qubit_count(m.rows());
  Operator generator = Operator::Zero(m.rows(), m.cols());
  for (int j = 0; j < n; ++j) generator += 0.5 * embed(pauli::Z(), j, n);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-phi_max, phi_max);
  const double width = 2.0 * phi_max / samples;
  Operator acc = Operator::Zero(m.rows(), m.cols());
  for (int k = 0; k < samples; ++k) {
    const double phi = rule == Quadrature::midpoint
                           ? -phi_max + (k + 0.5) * width
                           : uniform(rng);
    const Operator u = evolve(generator, phi);
    acc += u * m * u.adjoint();
  }
  return acc / static_cast<double>(samples);
}

//------------------------------------------------------------------------------
// Diagnostics
//------------------------------------------------------------------------------

// |Tr[a b^dagger]| / sqrt(Tr[a^dagger a] Tr[b^dagger b])
inline double gate_fidelity(const ChiMatrix& a, const ChiMatrix& b) {
  if (a.n_qubits != b.n_qubits) {
    throw DimensionError("gate_fidelity: chi matrices act on different registers");
  }
  require_same_dim(a.entries, b.entries, "gate_fidelity");
  const double na = a.entries.squaredNorm();
  const double nb = b.entries.squaredNorm();
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("gate_fidelity: zero chi matrix");
  }
  // Tr[a b^dagger] = sum_ij a_ij conj(b_ij)
  const Complex overlap = (a.entries.cwiseProduct(b.entries.conjugate())).sum();
  return std::min(1.0, std::abs(overlap) / std::sqrt(na * nb));
}

struct CptpReport {
  bool hermitian = false;
  double hermitian_deviation = 0.0;
  double min_eigenvalue = 0.0;
  double tp_residual = 0.0;
};

// Hermiticity, smallest eigenvalue of the Hermitian part (complete
// positivity) and max |sum_mn chi_mn E~_n^dagger E~_m - I| (trace
// preservation). Diagnostic only; never throws for numeric content.
inline CptpReport validate_cptp(const ChiMatrix& chi, double tol = 1e-9) {
  CptpReport report;
  report.hermitian_deviation = hermitian_deviation(chi.entries);
  report.hermitian = report.hermitian_deviation <= tol;
  const Operator herm = 0.5 * (chi.entries + chi.entries.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> eig(herm, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = eig.eigenvalues().minCoeff();

  const BasisSet basis = make_basis(BasisKind::fixed_kraus, chi.n_qubits);
  Operator sum = Operator::Zero(basis.dim, basis.dim);
  for (std::size_t m = 0; m < basis.size(); ++m) {
    for (std::size_t n = 0; n < basis.size(); ++n) {
      const Complex c = chi.entries(static_cast<Index>(m), static_cast<Index>(n));
      if (c != Complex{}) sum += c * basis[n].adjoint() * basis[m];
    }
  }
  report.tp_residual = max_abs(sum - identity(basis.dim));
  return report;
}

}  // namespace sspt
