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

// NMR measurement model for ancilla-assisted state tomography: a weakly
// coupled spin Hamiltonian, the pulse/delay readout unitary, single-quantum
// transition amplitudes and the linear map from an unknown density matrix to
// those amplitudes.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sspt/opcore.hpp"

namespace sspt {

struct SpinSystem {
  std::vector<double> chemical_shifts_hz;
  RealMatrix j_couplings_hz;  // symmetric, zero diagonal
  double tau1_s = 0.0;
  double tau2_s = 0.0;

  int n_spins() const { return static_cast<int>(chemical_shifts_hz.size()); }

  void validate() const {
    const auto n = static_cast<Index>(chemical_shifts_hz.size());
    if (n < 1) throw std::invalid_argument("spin system: no spins");
    if (j_couplings_hz.rows() != n || j_couplings_hz.cols() != n) {
      throw std::invalid_argument("spin system: coupling matrix must be " +
                                  std::to_string(n) + "x" + std::to_string(n));
    }
    for (Index i = 0; i < n; ++i) {
      if (j_couplings_hz(i, i) != 0.0) {
        throw std::invalid_argument("spin system: coupling diagonal must be zero");
      }
      for (Index j = i + 1; j < n; ++j) {
        if (j_couplings_hz(i, j) != j_couplings_hz(j, i)) {
          throw std::invalid_argument("spin system: coupling matrix not symmetric");
        }
      }
    }
    if (!(tau1_s > 0.0) || !(tau2_s > 0.0)) {
      throw std::invalid_argument("spin system: delays must be positive");
    }
  }
};

// Default three-spin register (A1, S, A2). Its readout map has condition
// number about 7.7.
inline SpinSystem default_spin_system() {
  SpinSystem sys;
  sys.chemical_shifts_hz = {13717.9, -1637.6, -11821.1};
  sys.j_couplings_hz = RealMatrix::Zero(3, 3);
  auto couple = [&](Index i, Index j, double hz) {
    sys.j_couplings_hz(i, j) = hz;
    sys.j_couplings_hz(j, i) = hz;
  };
  couple(0, 1, 69.65);
  couple(0, 2, -128.3);
  couple(1, 2, 47.67);
  sys.tau1_s = 6.7783e-3;
  sys.tau2_s = 8.0182e-3;
  return sys;
}

// Bit of `spin` in a basis index of an n-spin register (spin 0 most
// significant); 0 is spin up, 1 spin down.
inline int spin_bit(Index basis_index, int spin, int n_spins) {
  return static_cast<int>((basis_index >> (n_spins - 1 - spin)) & 1);
}

/// H = -pi sum_i nu_i Z_i + (pi/2) sum_{i<j} J_ij Z_i Z_j in rad/s; evolve(H, t)
/// takes t in seconds.
inline Operator hamiltonian(const SpinSystem& sys) {
  const int n = sys.n_spins();
  if (n < 1) throw std::invalid_argument("hamiltonian: no spins");
  const Index dim = Index{1} << n;
  Operator h = Operator::Zero(dim, dim);
  for (Index b = 0; b < dim; ++b) {
    double energy = 0.0;
    for (int i = 0; i < n; ++i) {
      const double zi = spin_bit(b, i, n) ? -1.0 : 1.0;
      energy += -kPi * sys.chemical_shifts_hz[static_cast<std::size_t>(i)] * zi;
      for (int j = i + 1; j < n; ++j) {
        const double zj = spin_bit(b, j, n) ? -1.0 : 1.0;
        energy += 0.5 * kPi * sys.j_couplings_hz(i, j) * zi * zj;
      }
    }
    h(b, b) = energy;
  }
  return h;
}

enum class Axis { x, y, z };

// exp(-i angle/2 sigma_axis) on every qubit.
inline Operator global_rotation(Axis axis, double angle, int n_qubits) {
  const Operator sigma = axis == Axis::x   ? pauli::X()
                         : axis == Axis::y ? pauli::Y()
                                           : pauli::Z();
  const Operator single =
      std::cos(angle / 2.0) * pauli::I() - kI * std::sin(angle / 2.0) * sigma;
  return tensor_power(single, n_qubits);
}

// Readout: delay tau1, (pi/2)_x on all spins, delay tau2, (pi/2)_y on all
// spins, then acquisition. Pulses are ideal and instantaneous.
inline Operator aaqst_unitary(const SpinSystem& sys) {
  sys.validate();
  const int n = sys.n_spins();
  const Operator h = hamiltonian(sys);
  return global_rotation(Axis::y, kPi / 2.0, n) * evolve(h, sys.tau2_s) *
         global_rotation(Axis::x, kPi / 2.0, n) * evolve(h, sys.tau1_s);
}

//------------------------------------------------------------------------------
// Transitions
//------------------------------------------------------------------------------

struct TransitionLabel {
  int spin;          // the flipping spin
  Index spectators;  // bit pattern of the other spins, register order
};

struct TransitionRecord {
  int n_spins = 0;
  std::vector<TransitionLabel> labels;
  ComplexVector amplitudes;

  Index size() const { return amplitudes.size(); }

  // [Re a_0 .. Re a_{T-1}, Im a_0 .. Im a_{T-1}]
  RealVector observables() const {
    const Index t = amplitudes.size();
    RealVector out(2 * t);
    out.head(t) = amplitudes.real();
    out.tail(t) = amplitudes.imag();
    return out;
  }
};

inline Index transition_count(int n_spins) {
  return static_cast<Index>(n_spins) * (Index{1} << (n_spins - 1));
}

// Inserts `bit` for `spin` into the spectator pattern of the other spins.
inline Index with_spin_bit(Index spectators, int spin, int bit, int n_spins) {
  const int low_bits = n_spins - 1 - spin;
  const Index low = spectators & ((Index{1} << low_bits) - 1);
  const Index high = spectators >> low_bits;
  return (((high << 1) | bit) << low_bits) | low;
}

/// Single-quantum transition amplitudes <r|rho|c>, where r and c share the
/// spectator pattern and carry the flipping spin as 0 and 1 respectively.
/// Ordered by spin, then by spectator pattern.
inline TransitionRecord measure_transitions(const Operator& rho) {
  require_square(rho, "measure_transitions");
  const int n = qubit_count(rho.rows());
  TransitionRecord rec;
  rec.n_spins = n;
  rec.amplitudes.resize(transition_count(n));
  Index k = 0;
  for (int spin = 0; spin < n; ++spin) {
    for (Index s = 0; s < (Index{1} << (n - 1)); ++s) {
      rec.labels.push_back({spin, s});
      rec.amplitudes(k++) =
          rho(with_spin_bit(s, spin, 0, n), with_spin_bit(s, spin, 1, n));
    }
  }
  return rec;
}

//------------------------------------------------------------------------------
// Reconstruction
//------------------------------------------------------------------------------

/// Real coordinates of a trace-one Hermitian matrix of dimension d:
/// rho = I/d + sum_c x_c B_c with d-1 diagonal deviations
/// B_k = |k><k| - |d-1><d-1|, then for each k < l the pair
/// (|k><l| + |l><k|, i|k><l| - i|l><k|) carrying Re and Im of rho_kl.
inline std::vector<Operator> coordinate_basis(Index dim) {
  std::vector<Operator> basis;
  basis.reserve(static_cast<std::size_t>(dim * dim - 1));
  for (Index k = 0; k + 1 < dim; ++k) {
    Operator b = Operator::Zero(dim, dim);
    b(k, k) = 1.0;
    b(dim - 1, dim - 1) = -1.0;
    basis.push_back(std::move(b));
  }
  for (Index k = 0; k < dim; ++k) {
    for (Index l = k + 1; l < dim; ++l) {
      Operator re = Operator::Zero(dim, dim);
      re(k, l) = 1.0;
      re(l, k) = 1.0;
      Operator im = Operator::Zero(dim, dim);
      im(k, l) = kI;
      im(l, k) = -kI;
      basis.push_back(std::move(re));
      basis.push_back(std::move(im));
    }
  }
  return basis;
}

inline RealVector state_coordinates(const Operator& rho) {
  const Index dim = rho.rows();
  RealVector x(dim * dim - 1);
  Index c = 0;
  for (Index k = 0; k + 1 < dim; ++k) x(c++) = rho(k, k).real() - 1.0 / dim;
  for (Index k = 0; k < dim; ++k) {
    for (Index l = k + 1; l < dim; ++l) {
      x(c++) = rho(k, l).real();
      x(c++) = rho(k, l).imag();
    }
  }
  return x;
}

inline Operator state_from_coordinates(const RealVector& x, Index dim) {
  if (x.size() != dim * dim - 1) {
    throw DimensionError("state_from_coordinates: coordinate count mismatch");
  }
  Operator rho = maximally_mixed(dim);
  Index c = 0;
  for (Index k = 0; k + 1 < dim; ++k) {
    rho(k, k) += x(c);
    rho(dim - 1, dim - 1) -= x(c);
    ++c;
  }
  for (Index k = 0; k < dim; ++k) {
    for (Index l = k + 1; l < dim; ++l) {
      const Complex v{x(c), x(c + 1)};
      rho(k, l) = v;
      rho(l, k) = std::conj(v);
      c += 2;
    }
  }
  return rho;
}

// Transition record produced by reading out rho (x) I/2^{n_A2} through V.
inline TransitionRecord readout(const Operator& v, const Operator& rho,
                                int ancilla_qubits) {
  const Operator joint = tensor(rho, maximally_mixed(Index{1} << ancilla_qubits));
  require_same_dim(v, joint, "readout");
  return measure_transitions(v * joint * v.adjoint());
}

struct ReconstructionMap {
  RealMatrix matrix;  // 2T x (4^q - 1)
  RealVector offset;  // observables of the maximally mixed unknown state
  Index rank = 0;
  double condition_number = 0.0;
  int unknown_qubits = 0;
  int ancilla_qubits = 0;

  Index unknowns() const { return matrix.cols(); }
  bool full_rank() const { return rank == unknowns(); }
};

/// Linear map from the coordinates of an unknown q-qubit state to the real
/// observables of one joint readout, together with its numerical rank and
/// condition number. Rank deficiency is reported, not raised.
inline ReconstructionMap reconstruction_map(const Operator& v, int unknown_qubits,
                                            int ancilla_qubits) {
  require_square(v, "reconstruction_map");
  if (v.rows() != (Index{1} << (unknown_qubits + ancilla_qubits))) {
    throw DimensionError("reconstruction_map: readout unitary has dimension " +
                         std::to_string(v.rows()) + ", expected 2^" +
                         std::to_string(unknown_qubits + ancilla_qubits));
  }
  const Index dim = Index{1} << unknown_qubits;
  const std::vector<Operator> basis = coordinate_basis(dim);
  const Operator a2 = maximally_mixed(Index{1} << ancilla_qubits);

  ReconstructionMap map;
  map.unknown_qubits = unknown_qubits;
  map.ancilla_qubits = ancilla_qubits;
  map.offset = readout(v, maximally_mixed(dim), ancilla_qubits).observables();
  map.matrix.resize(map.offset.size(), static_cast<Index>(basis.size()));
  for (std::size_t c = 0; c < basis.size(); ++c) {
    // Traceless direction: linear part only, no offset.
    const Operator joint = tensor(basis[c], a2);
    map.matrix.col(static_cast<Index>(c)) =
        measure_transitions(v * joint * v.adjoint()).observables();
  }
  const SpectrumSummary summary = singular_summary(map.matrix);
  map.rank = summary.rank;
  map.condition_number = summary.condition_number;
  return map;
}

inline Operator reconstruct_state(const TransitionRecord& rec,
                                  const ReconstructionMap& map) {
  if (!map.full_rank()) {
    const Index missing = map.unknowns() - map.rank;
    throw RankError("reconstruct_state: readout map has rank " +
                        std::to_string(map.rank) + " of " +
                        std::to_string(map.unknowns()) + " (" +
                        std::to_string(missing) + " unknowns unobservable)",
                    missing);
  }
  const RealVector obs = rec.observables();
  if (obs.size() != map.matrix.rows()) {
    throw DimensionError("reconstruct_state: record has " +
                         std::to_string(rec.size()) +
                         " transitions, map expects " +
                         std::to_string(map.matrix.rows() / 2));
  }
  const RealVector rhs = obs - map.offset;
  const RealVector x = lstsq<double>(map.matrix, rhs);
  return state_from_coordinates(x, Index{1} << map.unknown_qubits);
}

// Adds independent uniform [-eta, eta] noise to the real and imaginary part
// of every amplitude. The stream is fully determined by `seed`.
inline TransitionRecord add_noise(const TransitionRecord& rec, double eta,
                                  std::uint64_t seed) {
  if (!(eta >= 0.0)) throw std::invalid_argument("add_noise: eta must be >= 0");
  TransitionRecord out = rec;
  if (eta == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-eta, eta);
  for (Index k = 0; k < out.amplitudes.size(); ++k) {
    const double re = uniform(rng);
    const double im = uniform(rng);
    out.amplitudes(k) += Complex{re, im};
  }
  return out;
}

}  // namespace sspt
