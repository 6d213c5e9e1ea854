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


#include <gtest/gtest.h>

#include <set>

#include "lgsp/basis.hpp"
#include "oracles.hpp"

namespace lgsp {
namespace {

TEST(EnumerateBasis, Cardinalities) {
  EXPECT_EQ(enumerate_basis(2, Sector::fock())->size(), 16u);
  EXPECT_EQ(enumerate_basis(4, Sector::fixed(4))->size(), 70u);
  const auto vac = enumerate_basis(1, Sector::fixed(0));
  ASSERT_EQ(vac->size(), 1u);
  EXPECT_EQ(vac->mask(0), 0u);
  EXPECT_EQ(enumerate_basis(3, Sector::fixed(3))->size(), binomial(6, 3));
}

TEST(EnumerateBasis, AscendingAndStable) {
  const auto a = enumerate_basis(4, Sector::fixed(3));
  const auto b = enumerate_basis(4, Sector::fixed(3));
  ASSERT_EQ(a->size(), b->size());
  for (std::size_t i = 0; i < a->size(); ++i) {
    EXPECT_EQ(a->mask(i), b->mask(i));
    EXPECT_EQ(std::popcount(a->mask(i)), 3);
    if (i > 0) EXPECT_LT(a->mask(i - 1), a->mask(i));
    EXPECT_EQ(a->index_of(a->mask(i)), i);
  }
}

TEST(EnumerateBasis, Errors) {
  EXPECT_THROW(enumerate_basis(0, Sector::fock()), ArgumentError);
  EXPECT_THROW(enumerate_basis(21, Sector::fixed(1)), ArgumentError);
  EXPECT_THROW(enumerate_basis(2, Sector::fixed(5)), ArgumentError);
  EXPECT_THROW(enumerate_basis(10, Sector::fock()), CapacityError);
  EXPECT_NO_THROW(enumerate_basis(10, Sector::fock(), 1u << 20));
}

TEST(LadderAction, Examples) {
  // Orbitals {1,2} occupied in 1-based terms are bits 0 and 1.
  const Determinant d{0b011, 2};
  const auto r = ladder_action(d, 2, LadderKind::kCreate);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->det.occupation, 0b111u);
  EXPECT_EQ(r->sign, +1);
  EXPECT_FALSE(ladder_action(Determinant{0, 2}, 0, LadderKind::kAnnihilate).has_value());
  EXPECT_FALSE(ladder_action(d, 1, LadderKind::kCreate).has_value());
  EXPECT_THROW(ladder_action(d, 4, LadderKind::kCreate), ArgumentError);
  EXPECT_THROW(ladder_action(d, -1, LadderKind::kCreate), ArgumentError);
  const auto s = ladder_action(Determinant{0b101, 2}, 2, LadderKind::kAnnihilate);
  EXPECT_EQ(s->sign, -1);
}

TEST(OperatorMatrix, MatchesJordanWigner) {
  for (int L = 1; L <= 3; ++L) {
    const auto basis = enumerate_basis(L, Sector::fock());
    for (int p = 0; p < 2 * L; ++p) {
      const CMatrix a = build_operator_matrix({annihilate(p)}, basis).dense();
      EXPECT_EQ((a - oracle::jw_annihilate(p, 2 * L)).cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(OperatorMatrix, CanonicalAnticommutation) {
  for (int L = 1; L <= 3; ++L) {
    const auto basis = enumerate_basis(L, Sector::fock());
    const auto d = static_cast<Eigen::Index>(basis->size());
    const CMatrix id = CMatrix::Identity(d, d);
    std::vector<CMatrix> a, ad;
    for (int p = 0; p < 2 * L; ++p) {
      a.push_back(build_operator_matrix({annihilate(p)}, basis).dense());
      ad.push_back(build_operator_matrix({create(p)}, basis).dense());
    }
    for (int p = 0; p < 2 * L; ++p) {
      EXPECT_EQ((a[p] * a[p]).cwiseAbs().maxCoeff(), 0.0);
      EXPECT_EQ((ad[p] * ad[p]).cwiseAbs().maxCoeff(), 0.0);
      for (int q = 0; q < 2 * L; ++q) {
        const CMatrix acomm = a[p] * ad[q] + ad[q] * a[p] - (p == q ? id : CMatrix::Zero(d, d));
        EXPECT_EQ(acomm.cwiseAbs().maxCoeff(), 0.0) << "p=" << p << " q=" << q;
        EXPECT_EQ((a[p] * a[q] + a[q] * a[p]).cwiseAbs().maxCoeff(), 0.0);
      }
    }
  }
}

TEST(OperatorMatrix, NumberOperatorDiagonal) {
  const auto basis = enumerate_basis(1, Sector::fock());
  for (int p = 0; p < 2; ++p) {
    const CMatrix n = number_operator(p, basis).dense();
    for (std::size_t i = 0; i < basis->size(); ++i) {
      EXPECT_EQ(n(i, i).real(), static_cast<double>((basis->mask(i) >> p) & 1U));
    }
    EXPECT_EQ((n - CMatrix(n.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(OperatorMatrix, HoppingInOneElectronSector) {
  // L=2, N=1 sector; a_1^+ a_2 in 1-based labels is create(0) annihilate(1).
  const auto basis = enumerate_basis(2, Sector::fixed(1));
  ASSERT_EQ(basis->size(), 4u);
  const CMatrix m = build_operator_matrix({create(0), annihilate(1)}, basis).dense();
  CMatrix expect = CMatrix::Zero(4, 4);
  expect(basis->index_of(0b0001), basis->index_of(0b0010)) = 1.0;
  EXPECT_EQ((m - expect).cwiseAbs().maxCoeff(), 0.0);
}

TEST(OperatorMatrix, SectorViolationThrows) {
  const auto basis = enumerate_basis(2, Sector::fixed(1));
  EXPECT_THROW(build_operator_matrix({create(0)}, basis), SectorError);
  EXPECT_THROW(build_operator_matrix({annihilate(0), annihilate(1)}, basis), SectorError);
}

TEST(OperatorMatrix, NumberPreservingStringsCommuteWithN) {
  const auto basis = enumerate_basis(2, Sector::fock());
  const CMatrix n = total_number_operator(basis).dense();
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q)
      for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) {
          const CMatrix m =
              build_operator_matrix({create(p), create(q), annihilate(r), annihilate(s)}, basis)
                  .dense();
          EXPECT_EQ((m * n - n * m).cwiseAbs().maxCoeff(), 0.0);
        }
}

TEST(OperatorMatrix, SectorBlockMatchesFockRestriction) {
  const auto fock = enumerate_basis(2, Sector::fock());
  const auto sec = enumerate_basis(2, Sector::fixed(2));
  const CMatrix full = build_operator_matrix({create(3), annihilate(0)}, fock).dense();
  const CMatrix blk = build_operator_matrix({create(3), annihilate(0)}, sec).dense();
  for (std::size_t i = 0; i < sec->size(); ++i)
    for (std::size_t j = 0; j < sec->size(); ++j)
      EXPECT_EQ(blk(i, j), full(fock->index_of(sec->mask(i)), fock->index_of(sec->mask(j))));
}

TEST(Aufbau, FillsLowestSpinOrbitals) {
  EXPECT_EQ(aufbau_mask(0), 0u);
  EXPECT_EQ(aufbau_mask(2), 0b11u);
  EXPECT_EQ(aufbau_mask(5), 0b11111u);
}

}  // namespace
}  // namespace lgsp
