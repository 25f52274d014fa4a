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

// Dense complex operator algebra shared by every other header: tensor
// products, partial traces, unitary propagators, the Hilbert-Schmidt inner
// product, minimum-norm least squares and the two operator bases used for
// process tomography.
//
// Qubit ordering: qubit 0 is the most significant tensor factor everywhere.

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sspt {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using Operator = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

// Hermiticity/unitarity checks.
inline constexpr double kStructureTol = 1e-10;
// Density-operator construction (Hermiticity and unit trace).
inline constexpr double kDensityTol = 1e-12;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a linear system does not have the rank a reconstruction needs.
class RankError : public std::runtime_error {
 public:
  RankError(const std::string& what, Index deficiency)
      : std::runtime_error(what), deficiency_(deficiency) {}
  Index deficiency() const noexcept { return deficiency_; }

 private:
  Index deficiency_;
};

inline bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

// Number of qubits of a 2^q dimensional register.
inline int qubit_count(Index dim) {
  if (!is_power_of_two(dim)) {
    throw DimensionError("dimension " + std::to_string(dim) +
                         " is not a power of two");
  }
  int q = 0;
  while ((Index{1} << q) < dim) ++q;
  return q;
}

inline void require_square(const Operator& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw DimensionError(std::string(what) + ": operator is not square");
  }
}

inline void require_same_dim(const Operator& a, const Operator& b,
                             const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a.rows()) + " vs " +
                         std::to_string(b.rows()) + ")");
  }
}

inline double max_abs(const Operator& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

// max_ij |A - A^dagger|_ij
inline double hermitian_deviation(const Operator& a) {
  require_square(a, "hermitian_deviation");
  return max_abs(a - a.adjoint());
}

inline Operator identity(Index dim) { return Operator::Identity(dim, dim); }

// |row><col| in a space of dimension dim.
inline Operator ket_bra(Index dim, Index row, Index col) {
  Operator m = Operator::Zero(dim, dim);
  m(row, col) = 1.0;
  return m;
}

inline Operator projector(const ComplexVector& psi) {
  return psi * psi.adjoint();
}

namespace pauli {

inline Operator I() { return identity(2); }

inline Operator X() {
  Operator m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline Operator Y() {
  Operator m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

inline Operator Z() {
  Operator m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

}  // namespace pauli

// Kronecker product; a's indices are the most significant.
inline Operator tensor(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Operator tensor_power(const Operator& a, int n) {
  Operator out = identity(1);
  for (int k = 0; k < n; ++k) out = tensor(out, a);
  return out;
}

// Single-qubit operator acting on `qubit` of an n-qubit register.
inline Operator embed(const Operator& op, int qubit, int n_qubits) {
  if (op.rows() != 2 || op.cols() != 2) {
    throw DimensionError("embed: expected a single-qubit operator");
  }
  if (qubit < 0 || qubit >= n_qubits) {
    throw DimensionError("embed: qubit index out of range");
  }
  Operator out = identity(1);
  for (int k = 0; k < n_qubits; ++k) {
    out = tensor(out, k == qubit ? op : identity(2));
  }
  return out;
}

// Validates and returns a density operator: Hermitian and unit trace within
// kDensityTol.
inline Operator make_density(Operator rho) {
  require_square(rho, "make_density");
  if (hermitian_deviation(rho) > kDensityTol) {
    throw std::invalid_argument("make_density: operator is not Hermitian");
  }
  if (std::abs(rho.trace() - 1.0) > kDensityTol) {
    throw std::invalid_argument("make_density: trace is not 1");
  }
  return rho;
}

inline Operator maximally_mixed(Index dim) {
  return identity(dim) / static_cast<double>(dim);
}

// Traces out every subsystem not listed in `keep`. Kept subsystems retain
// their original relative order.
inline Operator partial_trace(const Operator& op, std::span<const Index> dims,
                              std::span<const Index> keep) {
  require_square(op, "partial_trace");
  Index total = 1;
  for (Index d : dims) {
    if (d <= 0) throw DimensionError("partial_trace: non-positive dimension");
    total *= d;
  }
  if (total != op.rows()) {
    throw DimensionError("partial_trace: subsystem dimensions multiply to " +
                         std::to_string(total) + ", operator has dimension " +
                         std::to_string(op.rows()));
  }
  const auto n_sub = static_cast<Index>(dims.size());
  std::vector<bool> kept(static_cast<std::size_t>(n_sub), false);
  for (Index k : keep) {
    if (k < 0 || k >= n_sub) {
      throw DimensionError("partial_trace: kept subsystem out of range");
    }
    kept[static_cast<std::size_t>(k)] = true;
  }
  Index kept_dim = 1;
  for (Index s = 0; s < n_sub; ++s) {
    if (kept[static_cast<std::size_t>(s)]) kept_dim *= dims[s];
  }

  // Split a full index into (kept index, traced index).
  auto split = [&](Index full) {
    Index kept_idx = 0, traced_idx = 0, kept_stride = 1, traced_stride = 1;
    for (Index s = n_sub - 1; s >= 0; --s) {
      const Index digit = full % dims[s];
      full /= dims[s];
      if (kept[static_cast<std::size_t>(s)]) {
        kept_idx += digit * kept_stride;
        kept_stride *= dims[s];
      } else {
        traced_idx += digit * traced_stride;
        traced_stride *= dims[s];
      }
    }
    return std::pair{kept_idx, traced_idx};
  };

  std::vector<std::pair<Index, Index>> parts(static_cast<std::size_t>(total));
  for (Index i = 0; i < total; ++i) parts[static_cast<std::size_t>(i)] = split(i);

  Operator out = Operator::Zero(kept_dim, kept_dim);
  for (Index r = 0; r < total; ++r) {
    const auto [kr, tr] = parts[static_cast<std::size_t>(r)];
    for (Index c = 0; c < total; ++c) {
      const auto [kc, tc] = parts[static_cast<std::size_t>(c)];
      if (tr == tc) out(kr, kc) += op(r, c);
    }
  }
  return out;
}

inline Operator partial_trace(const Operator& op,
                              std::initializer_list<Index> dims,
                              std::initializer_list<Index> keep) {
  return partial_trace(op, std::span<const Index>(dims.begin(), dims.size()),
                       std::span<const Index>(keep.begin(), keep.size()));
}

// U = exp(-i H t) through the Hermitian eigendecomposition of H.
inline Operator evolve(const Operator& hamiltonian, double t) {
  require_square(hamiltonian, "evolve");
  if (hermitian_deviation(hamiltonian) > kStructureTol) {
    throw std::invalid_argument("evolve: Hamiltonian is not Hermitian");
  }
  const Operator h = 0.5 * (hamiltonian + hamiltonian.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> eig(h);
  const RealVector& energies = eig.eigenvalues();
  ComplexVector phases(energies.size());
  for (Index k = 0; k < energies.size(); ++k) {
    phases(k) = std::exp(-kI * energies(k) * t);
  }
  const Operator& v = eig.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

// Hilbert-Schmidt inner product Tr[b^dagger a]; conjugate-linear in b.
inline Complex hs_inner(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "hs_inner");
  return (b.conjugate().cwiseProduct(a)).sum();
}

// Minimum-norm least-squares solution of A x = b. Works for real and complex
// scalars.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lstsq(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("lstsq: row count of A and length of b differ");
  }
  Eigen::CompleteOrthogonalDecomposition<
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>
      cod(a);
  return cod.solve(b);
}

// Singular-value summary of a matrix: numerical rank and 2-norm condition
// number restricted to the column space.
struct SpectrumSummary {
  Index rank = 0;
  double condition_number = 0.0;
  double smallest_singular_value = 0.0;
};

template <typename Derived>
SpectrumSummary singular_summary(const Eigen::MatrixBase<Derived>& a,
                                 double relative_tol = 1e-10) {
  Eigen::JacobiSVD<typename Derived::PlainObject> svd(a);
  const auto& s = svd.singularValues();
  SpectrumSummary out;
  if (s.size() == 0 || s(0) == 0.0) {
    out.condition_number = std::numeric_limits<double>::infinity();
    return out;
  }
  for (Index k = 0; k < s.size(); ++k) {
    if (s(k) > relative_tol * s(0)) ++out.rank;
  }
  out.smallest_singular_value = s(s.size() - 1);
  out.condition_number = out.smallest_singular_value > 0.0
                             ? s(0) / out.smallest_singular_value
                             : std::numeric_limits<double>::infinity();
  return out;
}

enum class BasisKind { elementary, fixed_kraus };

struct BasisSet {
  BasisKind kind;
  Index dim;
  std::vector<Operator> elements;

  std::size_t size() const { return elements.size(); }
  const Operator& operator[](std::size_t k) const { return elements[k]; }
};

/// Operator bases over q qubits.
///
/// elementary: |a><b| ordered by index a * 2^q + b (row-major over (a, b)),
/// orthonormal under hs_inner.
///
/// fixed_kraus: the ordered tensor power of {I, X, -iY, Z}; pairwise
/// Tr[E_m^dagger E_n] = 2^q delta_mn.
inline BasisSet make_basis(BasisKind kind, int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("make_basis: n_qubits < 1");
  const Index dim = Index{1} << n_qubits;
  BasisSet basis{kind, dim, {}};
  basis.elements.reserve(static_cast<std::size_t>(dim * dim));
  if (kind == BasisKind::elementary) {
    for (Index a = 0; a < dim; ++a) {
      for (Index b = 0; b < dim; ++b) basis.elements.push_back(ket_bra(dim, a, b));
    }
    return basis;
  }
  const std::vector<Operator> single{pauli::I(), pauli::X(), -kI * pauli::Y(),
                                     pauli::Z()};
  std::vector<Operator> current{identity(1)};
  for (int q = 0; q < n_qubits; ++q) {
    std::vector<Operator> next;
    next.reserve(current.size() * 4);
    for (const Operator& prefix : current) {
      for (const Operator& s : single) next.push_back(tensor(prefix, s));
    }
    current = std::move(next);
  }
  basis.elements = std::move(current);
  return basis;
}

// Row-major vectorization used for lambda and chi: entry (r, c) -> r * cols + c.
inline ComplexVector vec_row_major(const Operator& m) {
  ComplexVector v(m.size());
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) v(r * m.cols() + c) = m(r, c);
  }
  return v;
}

inline Operator unvec_row_major(const ComplexVector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) {
    throw DimensionError("unvec_row_major: length mismatch");
  }
  Operator m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = v(r * cols + c);
  }
  return m;
}

}  // namespace sspt
