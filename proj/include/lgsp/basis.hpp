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

// basis.hpp - Occupation-number determinants, Fock/sector bases and
// sign-correct fermionic ladder operators.
//
// Spin orbitals are 0-based. Spatial orbital i (ascending orbital energy)
// maps to spin orbital 2i for spin alpha and 2i+1 for spin beta, and spin
// orbital p is bit p of the occupation mask. Ladder operators carry the
// sign (-1)^(number of occupied orbitals with index < p).

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lgsp/core.hpp"

namespace lgsp {

using Occupation = std::uint64_t;

inline constexpr int kMaxSpatialOrbitals = 20;

inline int spin_orbital(int spatial, int spin) { return 2 * spatial + spin; }

struct Determinant {
  Occupation occupation = 0;
  int num_spatial = 0;

  int num_spin_orbitals() const noexcept { return 2 * num_spatial; }
  int particle_count() const noexcept { return std::popcount(occupation); }
  bool occupied(int p) const noexcept { return (occupation >> p) & 1U; }

  friend bool operator==(const Determinant&, const Determinant&) = default;
};

enum class LadderKind { kCreate, kAnnihilate };

struct LadderOp {
  int index = 0;
  LadderKind kind = LadderKind::kCreate;
};

inline LadderOp create(int p) { return {p, LadderKind::kCreate}; }
inline LadderOp annihilate(int p) { return {p, LadderKind::kAnnihilate}; }

struct LadderResult {
  Determinant det;
  int sign = 1;
};

// Returns nullopt when the action annihilates the state.
inline std::optional<LadderResult> ladder_action(const Determinant& det, int p,
                                                 LadderKind kind) {
  if (p < 0 || p >= det.num_spin_orbitals()) {
    throw ArgumentError("ladder_action: spin-orbital index " + std::to_string(p) +
                        " outside [0, " + std::to_string(det.num_spin_orbitals()) + ")");
  }
  const Occupation bit = Occupation{1} << p;
  const bool occ = (det.occupation & bit) != 0;
  if (occ == (kind == LadderKind::kCreate)) return std::nullopt;
  const int below = std::popcount(det.occupation & (bit - 1));
  Determinant out = det;
  out.occupation ^= bit;
  return LadderResult{out, (below & 1) ? -1 : 1};
}

// Fock space (all particle numbers) or a fixed particle-number sector.
struct Sector {
  std::optional<int> num_particles;

  static Sector fock() { return {}; }
  static Sector fixed(int n) { return {n}; }
  bool is_fock() const noexcept { return !num_particles.has_value(); }
  friend bool operator==(const Sector&, const Sector&) = default;
};

inline std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / i;
  return r;
}

// Determinants ordered by ascending mask value, with a reverse lookup.
class SectorBasis {
 public:
  SectorBasis(int num_spatial, Sector sector, std::vector<Occupation> masks)
      : num_spatial_(num_spatial), sector_(sector), masks_(std::move(masks)) {
    index_.reserve(masks_.size());
    for (std::size_t i = 0; i < masks_.size(); ++i) index_.emplace(masks_[i], i);
  }

  int num_spatial() const noexcept { return num_spatial_; }
  int num_spin_orbitals() const noexcept { return 2 * num_spatial_; }
  const Sector& sector() const noexcept { return sector_; }
  std::size_t size() const noexcept { return masks_.size(); }
  Occupation mask(std::size_t i) const { return masks_.at(i); }
  Determinant determinant(std::size_t i) const { return {masks_.at(i), num_spatial_}; }
  const std::vector<Occupation>& masks() const noexcept { return masks_; }

  std::optional<std::size_t> find(Occupation m) const {
    auto it = index_.find(m);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(Occupation m) const {
    if (auto i = find(m)) return *i;
    throw ArgumentError("determinant not in basis");
  }

  // Unit vector for a determinant.
  CVector basis_vector(Occupation m) const {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(size()));
    v(static_cast<Eigen::Index>(index_of(m))) = 1.0;
    return v;
  }

 private:
  int num_spatial_;
  Sector sector_;
  std::vector<Occupation> masks_;
  std::unordered_map<Occupation, std::size_t> index_;
};

using BasisPtr = std::shared_ptr<const SectorBasis>;

inline BasisPtr enumerate_basis(int num_spatial, Sector sector,
                                std::size_t max_dim = limits::max_basis_dim()) {
  if (num_spatial < 1 || num_spatial > kMaxSpatialOrbitals) {
    throw ArgumentError("enumerate_basis: orbital count must lie in [1, 20]");
  }
  const int n = 2 * num_spatial;
  if (sector.num_particles && (*sector.num_particles < 0 || *sector.num_particles > n)) {
    throw ArgumentError("enumerate_basis: particle number outside [0, 2L]");
  }
  const std::size_t dim = sector.is_fock() ? (std::size_t{1} << n)
                                           : binomial(n, *sector.num_particles);
  if (dim > max_dim) {
    throw CapacityError("enumerate_basis: dimension " + std::to_string(dim) +
                        " exceeds cap " + std::to_string(max_dim));
  }
  std::vector<Occupation> masks;
  masks.reserve(dim);
  if (sector.is_fock()) {
    for (Occupation m = 0; m < (Occupation{1} << n); ++m) masks.push_back(m);
  } else {
    const int k = *sector.num_particles;
    if (k == 0) {
      masks.push_back(0);
    } else {
      // Gosper's hack walks fixed-popcount masks in ascending order.
      Occupation m = (Occupation{1} << k) - 1;
      const Occupation limit = Occupation{1} << n;
      while (m < limit) {
        masks.push_back(m);
        const Occupation c = m & (~m + 1);
        const Occupation r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
      }
    }
  }
  return std::make_shared<const SectorBasis>(num_spatial, sector, std::move(masks));
}

// Sparse matrix of an operator over a basis.
struct OperatorMatrix {
  BasisPtr basis;
  SparseCMatrix matrix;

  Eigen::Index dim() const noexcept { return matrix.rows(); }
  CMatrix dense() const { return CMatrix(matrix); }
};

// Net change in particle number of an ordered ladder string.
inline int particle_change(const std::vector<LadderOp>& ops) {
  int d = 0;
  for (const auto& op : ops) d += op.kind == LadderKind::kCreate ? 1 : -1;
  return d;
}

// Applies a ladder string (rightmost operator first) to one determinant.
inline std::optional<LadderResult> apply_string(const std::vector<LadderOp>& ops,
                                                Determinant det) {
  int sign = 1;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    auto r = ladder_action(det, it->index, it->kind);
    if (!r) return std::nullopt;
    det = r->det;
    sign *= r->sign;
  }
  return LadderResult{det, sign};
}

// Matrix of coeff * ops[0] ops[1] ... ops[n-1] over the basis.
inline OperatorMatrix build_operator_matrix(const std::vector<LadderOp>& ops,
                                            const BasisPtr& basis, Complex coeff = 1.0) {
  if (!basis->sector().is_fock() && particle_change(ops) != 0) {
    throw SectorError("build_operator_matrix: string changes particle number on a fixed sector");
  }
  for (const auto& op : ops) {
    if (op.index < 0 || op.index >= basis->num_spin_orbitals()) {
      throw ArgumentError("build_operator_matrix: index out of range");
    }
  }
  const auto dim = static_cast<Eigen::Index>(basis->size());
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(basis->size());
  for (std::size_t col = 0; col < basis->size(); ++col) {
    auto r = apply_string(ops, basis->determinant(col));
    if (!r) continue;
    auto row = basis->find(r->det.occupation);
    if (!row) continue;
    trips.emplace_back(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col),
                       coeff * static_cast<double>(r->sign));
  }
  SparseCMatrix m(dim, dim);
  m.setFromTriplets(trips.begin(), trips.end());
  return {basis, std::move(m)};
}

inline OperatorMatrix number_operator(int p, const BasisPtr& basis) {
  return build_operator_matrix({create(p), annihilate(p)}, basis);
}

inline OperatorMatrix total_number_operator(const BasisPtr& basis) {
  const auto dim = static_cast<Eigen::Index>(basis->size());
  SparseCMatrix m(dim, dim);
  std::vector<Eigen::Triplet<Complex>> trips;
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const auto n = std::popcount(basis->mask(i));
    if (n != 0) trips.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), n);
  }
  m.setFromTriplets(trips.begin(), trips.end());
  return {basis, std::move(m)};
}

// Mask of the closed-shell aufbau determinant with n lowest spin orbitals filled.
inline Occupation aufbau_mask(int n) {
  return n >= 64 ? ~Occupation{0} : (Occupation{1} << n) - 1;
}

}  // namespace lgsp
