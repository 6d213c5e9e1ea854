// Copyright 2026 The lgsp Authors
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

// jumps.hpp - coupling-operator sets and filtered jump operators.

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lgsp/basis.hpp"
#include "lgsp/core.hpp"
#include "lgsp/filter.hpp"
#include "lgsp/integrals.hpp"

namespace lgsp {

enum class CouplingKind { kTypeI, kTypeII, kSI, kSII, kTII };

inline const char* to_string(CouplingKind k) {
  switch (k) {
    case CouplingKind::kTypeI: return "type1";
    case CouplingKind::kTypeII: return "type2";
    case CouplingKind::kSI: return "s1";
    case CouplingKind::kSII: return "s2";
    case CouplingKind::kTII: return "t2";
  }
  return "?";
}

inline CouplingKind coupling_from_string(const std::string& s) {
  if (s == "type1") return CouplingKind::kTypeI;
  if (s == "type2") return CouplingKind::kTypeII;
  if (s == "s1") return CouplingKind::kSI;
  if (s == "s2") return CouplingKind::kSII;
  if (s == "t2") return CouplingKind::kTII;
  throw ArgumentError("unknown coupling kind '" + s + "'");
}

inline bool is_number_conserving(CouplingKind k) {
  return k == CouplingKind::kTypeII || k == CouplingKind::kSII || k == CouplingKind::kTII;
}

struct CouplingSet {
  CouplingKind kind = CouplingKind::kTypeI;
  int r = 0;
  std::vector<std::string> labels;
  std::vector<OperatorMatrix> matrices;
  CMatrix rotation;  // b_k^+ = sum_p a_p^+ U_pk

  std::size_t size() const noexcept { return matrices.size(); }
};

// Spatial orbitals (0-based) of the active window for the reduced sets.
//
// The window is 2r spatial orbitals centred on the HOMO spatial orbital
// h = ceil(N_e / 2): 1-based orbitals h-r+1 .. h+r.
inline std::vector<int> active_window(int num_spatial, int num_electrons, int r) {
  if (r < 1) throw ArgumentError("active window: r must be >= 1");
  const int h = (num_electrons + 1) / 2;
  const int lo = h - r + 1;
  const int hi = h + r;
  if (lo < 1 || hi > num_spatial) {
    throw ArgumentError("active window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                        "] not inside [1, " + std::to_string(num_spatial) + "]");
  }
  std::vector<int> w;
  for (int i = lo; i <= hi; ++i) w.push_back(i - 1);
  return w;
}

inline std::string orbital_label(int p) {
  return std::to_string(p / 2 + 1) + (p % 2 == 0 ? "a" : "b");
}

namespace detail {

inline void check_unitary(const CMatrix& u, int n) {
  if (u.rows() != n || u.cols() != n) throw ArgumentError("rotation has wrong dimension");
  const double defect = (u.adjoint() * u - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (defect > 1e-10) throw ArgumentError("rotation is not unitary within 1e-10");
}

// Matrices of a_p and a_p^+ for every spin orbital, Fock or sector basis.
struct LadderTable {
  std::vector<SparseCMatrix> create, annihilate;
};

inline LadderTable ladder_table(const BasisPtr& basis) {
  LadderTable t;
  for (int p = 0; p < basis->num_spin_orbitals(); ++p) {
    t.create.push_back(build_operator_matrix({lgsp::create(p)}, basis).matrix);
    t.annihilate.push_back(build_operator_matrix({lgsp::annihilate(p)}, basis).matrix);
  }
  return t;
}

inline bool is_identity(const CMatrix& u) {
  return (u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace detail

// Coupling operators in the rotated single-particle basis.
inline CouplingSet build_coupling_set(CouplingKind kind, int num_electrons, int r,
                                      const CMatrix& rotation, const BasisPtr& basis) {
  const int L = basis->num_spatial();
  const int n = 2 * L;
  detail::check_unitary(rotation, n);
  if (!is_number_conserving(kind) && !basis->sector().is_fock()) {
    throw SectorError(std::string("coupling set '") + to_string(kind) +
                      "' changes particle number; use a Fock-space basis");
  }
  CouplingSet cs;
  cs.kind = kind;
  cs.r = r;
  cs.rotation = rotation;

  std::vector<int> spins;  // active spin orbitals
  if (kind == CouplingKind::kTypeI || kind == CouplingKind::kTypeII) {
    for (int p = 0; p < n; ++p) spins.push_back(p);
  } else {
    for (int i : active_window(L, num_electrons, r)) {
      spins.push_back(2 * i);
      spins.push_back(2 * i + 1);
    }
  }

  const bool raw = detail::is_identity(rotation);
  const auto dim = static_cast<Eigen::Index>(basis->size());
  auto push = [&](std::string label, SparseCMatrix m) {
    cs.labels.push_back(std::move(label));
    cs.matrices.push_back({basis, std::move(m)});
  };

  if (!is_number_conserving(kind)) {
    const auto table = detail::ladder_table(basis);
    auto rotated = [&](int k, bool creation) {
      if (raw) return creation ? table.create[k] : table.annihilate[k];
      SparseCMatrix m(dim, dim);
      for (int p = 0; p < n; ++p) {
        const Complex u = rotation(p, k);
        if (u == Complex(0.0)) continue;
        m += creation ? SparseCMatrix(u * table.create[p])
                      : SparseCMatrix(std::conj(u) * table.annihilate[p]);
      }
      return m;
    };
    for (int p : spins) push("c+_" + orbital_label(p), rotated(p, true));
    for (int p : spins) push("c_" + orbital_label(p), rotated(p, false));
    return cs;
  }

  // Pair operators b_i^+ b_j = sum_pq U_pi conj(U_qj) a_p^+ a_q.
  std::vector<SparseCMatrix> hop(static_cast<std::size_t>(n) * n);
  auto hop_raw = [&](int p, int q) -> const SparseCMatrix& {
    auto& m = hop[static_cast<std::size_t>(p) * n + q];
    if (m.rows() == 0) m = build_operator_matrix({lgsp::create(p), lgsp::annihilate(q)}, basis).matrix;
    return m;
  };
  auto pair = [&](int i, int j) {
    if (raw) return hop_raw(i, j);
    SparseCMatrix m(dim, dim);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        const Complex u = rotation(p, i) * std::conj(rotation(q, j));
        if (std::abs(u) == 0.0) continue;
        m += SparseCMatrix(u * hop_raw(p, q));
      }
    return m;
  };
  for (int i : spins)
    for (int j : spins) {
      // T_II keeps ordered nearest-neighbour spatial pairs, all four spins.
      if (kind == CouplingKind::kTII && std::abs(i / 2 - j / 2) != 1) continue;
      push("c+_" + orbital_label(i) + " c_" + orbital_label(j), pair(i, j));
    }
  return cs;
}

inline CouplingSet build_coupling_set(CouplingKind kind, int num_electrons, int r,
                                      const BasisPtr& basis) {
  const int n = basis->num_spin_orbitals();
  return build_coupling_set(kind, num_electrons, r, CMatrix::Identity(n, n), basis);
}

// Expected cardinality of a coupling set.
inline std::size_t coupling_count(CouplingKind kind, int L, int r) {
  switch (kind) {
    case CouplingKind::kTypeI: return 4 * static_cast<std::size_t>(L);
    case CouplingKind::kTypeII: return 4 * static_cast<std::size_t>(L) * L;
    case CouplingKind::kSI: return 8 * static_cast<std::size_t>(r);
    case CouplingKind::kSII: return 16 * static_cast<std::size_t>(r) * r;
    case CouplingKind::kTII: return 4 * 2 * static_cast<std::size_t>(2 * r - 1);
  }
  return 0;
}

enum class Provenance { kExactEigenbasis, kQuadrature, kClosedForm };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kExactEigenbasis: return "exact-eigenbasis";
    case Provenance::kQuadrature: return "quadrature";
    case Provenance::kClosedForm: return "closed-form";
  }
  return "?";
}

struct JumpOperator {
  CMatrix matrix;
  Provenance provenance = Provenance::kExactEigenbasis;
  std::string label;
};

namespace detail {

inline void check_complete(const Eigenpairs& eigs, Eigen::Index dim) {
  if (eigs.vectors.rows() != dim || eigs.vectors.cols() != dim || eigs.values.size() != dim) {
    throw ArgumentError("jump construction needs the complete eigendecomposition");
  }
}

// K = V (W .* V^+ A V) V^+ with W_ij = w(lambda_i - lambda_j).
template <class Weight>
CMatrix reweight(const Eigenpairs& eigs, const CMatrix& a, Weight&& w) {
  const auto d = eigs.values.size();
  CMatrix at = eigs.vectors.adjoint() * a * eigs.vectors;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) at(i, j) *= w(eigs.values(i) - eigs.values(j));
  return eigs.vectors * at * eigs.vectors.adjoint();
}

}  // namespace detail

inline JumpOperator jump_exact(const Eigenpairs& eigs, const CMatrix& a,
                               const SpectralFilter& filter, std::string label = {}) {
  detail::check_complete(eigs, a.rows());
  return {detail::reweight(eigs, a, [&](double w) { return Complex(filter(w), 0.0); }),
          Provenance::kExactEigenbasis, std::move(label)};
}

inline JumpOperator jump_exact(const Eigenpairs& eigs, const OperatorMatrix& a,
                               const SpectralFilter& filter, std::string label = {}) {
  return jump_exact(eigs, a.dense(), filter, std::move(label));
}

// Frequency response of the truncated trapezoid rule:
// sum_l w_l f(s_l) exp(i omega s_l).
inline Complex quadrature_response(double omega, const FilterParams& p, const QuadratureGrid& g) {
  Complex acc = 0.0;
  for (int l = -g.half_count(); l <= g.half_count(); ++l) {
    const double s = g.node(l);
    acc += g.weight(l) * filter_time(s, p) * std::exp(Complex(0.0, omega * s));
  }
  return acc;
}

// sum_l w_l f(s_l) e^{iHs_l} A e^{-iHs_l}, with the Heisenberg factors
// applied in the eigenbasis of H.
inline JumpOperator jump_quadrature(const Eigenpairs& eigs, const CMatrix& a,
                                    const FilterParams& p, const QuadratureGrid& g,
                                    std::string label = {}) {
  detail::check_complete(eigs, a.rows());
  return {detail::reweight(eigs, a, [&](double w) { return quadrature_response(w, p, g); }),
          Provenance::kQuadrature, std::move(label)};
}

inline JumpOperator jump_quadrature(const HamiltonianMatrix& h, const CMatrix& a,
                                    const FilterParams& p, const QuadratureGrid& g,
                                    std::string label = {}) {
  return jump_quadrature(exact_eigensystem(h), a, p, g, std::move(label));
}

inline std::vector<JumpOperator> exact_jumps(const Eigenpairs& eigs, const CouplingSet& cs,
                                             const SpectralFilter& filter) {
  std::vector<JumpOperator> out;
  out.reserve(cs.size());
  for (std::size_t k = 0; k < cs.size(); ++k)
    out.push_back(jump_exact(eigs, cs.matrices[k], filter, cs.labels[k]));
  return out;
}

inline std::vector<JumpOperator> quadrature_jumps(const Eigenpairs& eigs, const CouplingSet& cs,
                                                  const FilterParams& p,
                                                  const QuadratureGrid& g) {
  std::vector<JumpOperator> out;
  out.reserve(cs.size());
  for (std::size_t k = 0; k < cs.size(); ++k)
    out.push_back(jump_quadrature(eigs, cs.matrices[k].dense(), p, g, cs.labels[k]));
  return out;
}

}  // namespace lgsp
