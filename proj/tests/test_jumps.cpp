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

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "lgsp/jumps.hpp"
#include "oracles.hpp"

namespace lgsp {
namespace {

struct H2 {
  IntegralSet ints;
  BasisPtr basis;
  HamiltonianMatrix h;
  Eigenpairs eigs;
  double norm = 0.0;
  double gap = 0.0;

  H2() {
    std::ifstream in(oracle::fixture("h2_sto3g.fcidump"));
    ints = parse_fcidump(in);
    basis = enumerate_basis(2, Sector::fock());
    h = assemble_hamiltonian(ints, basis);
    eigs = exact_eigensystem(h);
    norm = eigs.spectral_norm();
    gap = eigs.gap();
  }
};

const H2& h2() {
  static const H2 x;
  return x;
}

TEST(CouplingSet, Cardinalities) {
  const auto fock2 = enumerate_basis(2, Sector::fock());
  EXPECT_EQ(build_coupling_set(CouplingKind::kTypeI, 2, 0, fock2).size(), 8u);
  EXPECT_EQ(build_coupling_set(CouplingKind::kTypeII, 2, 0, fock2).size(), 16u);
  EXPECT_EQ(build_coupling_set(CouplingKind::kSI, 2, 1, fock2).size(), 8u);
  for (const auto& [L, ne] : {std::pair{2, 2}, {3, 2}, {4, 4}}) {
    const auto b = enumerate_basis(L, Sector::fixed(ne));
    EXPECT_EQ(build_coupling_set(CouplingKind::kSII, ne, 1, b).size(), 16u);
    EXPECT_EQ(build_coupling_set(CouplingKind::kTII, ne, 1, b).size(),
              coupling_count(CouplingKind::kTII, L, 1));
  }
  const auto b44 = enumerate_basis(4, Sector::fixed(4));
  EXPECT_EQ(build_coupling_set(CouplingKind::kSII, 4, 2, b44).size(), 64u);
  EXPECT_EQ(build_coupling_set(CouplingKind::kTII, 4, 2, b44).size(), 24u);
  EXPECT_EQ(coupling_count(CouplingKind::kTII, 4, 2), 24u);
  EXPECT_EQ(build_coupling_set(CouplingKind::kTypeII, 4, 0, b44).size(), 64u);
}

TEST(CouplingSet, TypeIIIdentityOnOneOrbital) {
  const auto b = enumerate_basis(1, Sector::fock());
  const auto cs = build_coupling_set(CouplingKind::kTypeII, 1, 0, b);
  ASSERT_EQ(cs.size(), 4u);
  std::size_t k = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j, ++k) {
      const CMatrix ref = oracle::jw_create(i, 2) * oracle::jw_annihilate(j, 2);
      EXPECT_EQ((cs.matrices[k].dense() - ref).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(CouplingSet, Errors) {
  const auto sec = enumerate_basis(2, Sector::fixed(2));
  EXPECT_THROW(build_coupling_set(CouplingKind::kTypeI, 2, 0, sec), SectorError);
  EXPECT_THROW(build_coupling_set(CouplingKind::kSI, 2, 1, sec), SectorError);
  EXPECT_THROW(build_coupling_set(CouplingKind::kSII, 2, 2, sec), ArgumentError);
  EXPECT_THROW(build_coupling_set(CouplingKind::kSII, 2, 0, sec), ArgumentError);
  EXPECT_THROW(build_coupling_set(CouplingKind::kSII, 2, 1, CMatrix::Ones(4, 4), sec),
               ArgumentError);
}

TEST(CouplingSet, RotatedLaddersObeyCar) {
  std::mt19937_64 rng(9);
  const CMatrix u = oracle::random_unitary(4, rng);
  const auto b = enumerate_basis(2, Sector::fock());
  const auto cs = build_coupling_set(CouplingKind::kTypeI, 2, 0, u, b);
  const CMatrix id = CMatrix::Identity(16, 16);
  for (int p = 0; p < 4; ++p) {
    // b_p^+ = sum_q a_q^+ U_qp
    CMatrix ref = CMatrix::Zero(16, 16);
    for (int q = 0; q < 4; ++q) ref += u(q, p) * oracle::jw_create(q, 4);
    EXPECT_LT((cs.matrices[p].dense() - ref).cwiseAbs().maxCoeff(), 1e-14);
    for (int q = 0; q < 4; ++q) {
      const CMatrix bq = cs.matrices[4 + q].dense(), bpd = cs.matrices[p].dense();
      const CMatrix ac = bq * bpd + bpd * bq - (p == q ? id : CMatrix::Zero(16, 16));
      EXPECT_LT(ac.cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(JumpExact, TwoLevelExample) {
  Eigenpairs e{Eigen::Vector2d(0.0, 1.0), CMatrix::Identity(2, 2)};
  CMatrix a(2, 2);
  a << 0, 1, 1, 0;
  const auto k = jump_exact(e, a, SpectralFilter::ideal(1.0));
  CMatrix ref = CMatrix::Zero(2, 2);
  ref(0, 1) = 1.0;
  EXPECT_EQ(k.matrix, ref);
  EXPECT_EQ(k.provenance, Provenance::kExactEigenbasis);
  EXPECT_THROW(jump_exact(Eigenpairs{Eigen::Vector2d(0, 1), CMatrix::Identity(2, 1)}, a,
                          SpectralFilter::ideal(1.0)),
               ArgumentError);
}

TEST(JumpExact, IdealFilterLowersEnergyOnly) {
  const auto& m = h2();
  const auto f = SpectralFilter::ideal(m.gap);
  const CVector g = m.eigs.ground_state();
  for (auto kind : {CouplingKind::kTypeI, CouplingKind::kTypeII}) {
    const auto cs = build_coupling_set(kind, 2, 0, m.basis);
    for (const auto& k : exact_jumps(m.eigs, cs, f)) {
      EXPECT_LE((k.matrix * g).norm(), 1e-12) << k.label;
      const CMatrix kt = m.eigs.vectors.adjoint() * k.matrix * m.eigs.vectors;
      for (Eigen::Index i = 0; i < 16; ++i)
        for (Eigen::Index j = 0; j < 16; ++j)
          if (m.eigs.values(i) >= m.eigs.values(j)) EXPECT_LE(std::abs(kt(i, j)), 1e-13);
    }
  }
  const auto id = jump_exact(m.eigs, CMatrix(CMatrix::Identity(16, 16)), f);
  EXPECT_LE(id.matrix.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(JumpExact, ErfFilterGroundLeakageBound) {
  const auto& m = h2();
  const CVector g = m.eigs.ground_state();
  const auto cs = build_coupling_set(CouplingKind::kTypeI, 2, 0, m.basis);
  // Default parameters (b = delta_b): leakage bounded by f(gap) |A|.
  const auto [p, grid] = default_filter_params(m.norm, m.gap);
  const double tail = filter_freq(m.gap, p);
  for (const auto& k : exact_jumps(m.eigs, cs, SpectralFilter::erf(p))) {
    EXPECT_LE((k.matrix * g).norm(), tail * 1.0 + 1e-15) << k.label;
  }
  // With b / delta_b = 3.5 the leakage drops below 1e-4.
  FilterParams sharp = p;
  sharp.delta_b = p.b / 3.5;
  for (const auto& k : exact_jumps(m.eigs, cs, SpectralFilter::erf(sharp))) {
    EXPECT_LE((k.matrix * g).norm(), 1e-4) << k.label;
  }
}

TEST(JumpExact, GaugeCovariance) {
  const auto& m = h2();
  std::mt19937_64 rng(21);
  const auto [p, grid] = default_filter_params(m.norm, m.gap);
  const auto f = SpectralFilter::erf(p);
  const CMatrix rho = oracle::random_density(16, rng);
  auto sums = [&](const std::vector<JumpOperator>& ks) {
    CMatrix g = CMatrix::Zero(16, 16), d = CMatrix::Zero(16, 16);
    for (const auto& k : ks) {
      g += k.matrix.adjoint() * k.matrix;
      d += k.matrix * rho * k.matrix.adjoint();
    }
    return std::pair{g, d};
  };
  const auto base = sums(exact_jumps(m.eigs, build_coupling_set(CouplingKind::kTypeI, 2, 0, m.basis), f));
  const CMatrix u = oracle::random_unitary(4, rng);
  const auto rot =
      sums(exact_jumps(m.eigs, build_coupling_set(CouplingKind::kTypeI, 2, 0, u, m.basis), f));
  EXPECT_LT((base.first - rot.first).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((base.second - rot.second).cwiseAbs().maxCoeff(), 1e-10);

  // Direct mixing of the operator list {A_k} -> {sum_j A_j V_jk}.
  const auto cs = build_coupling_set(CouplingKind::kTypeI, 2, 0, m.basis);
  const CMatrix v = oracle::random_unitary(8, rng);
  std::vector<JumpOperator> mixed;
  for (int k = 0; k < 8; ++k) {
    CMatrix a = CMatrix::Zero(16, 16);
    for (int j = 0; j < 8; ++j) a += v(j, k) * cs.matrices[j].dense();
    mixed.push_back(jump_exact(m.eigs, a, f));
  }
  const auto mix = sums(mixed);
  EXPECT_LT((base.first - mix.first).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((base.second - mix.second).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(JumpExact, TypeIICommutesWithNumber) {
  const auto& m = h2();
  const CMatrix n = total_number_operator(m.basis).dense();
  const auto [p, grid] = default_filter_params(m.norm, m.gap);
  const auto cs = build_coupling_set(CouplingKind::kTypeII, 2, 0, m.basis);
  for (const auto& k : exact_jumps(m.eigs, cs, SpectralFilter::erf(p)))
    EXPECT_LE((k.matrix * n - n * k.matrix).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(JumpQuadrature, ZeroCoupling) {
  const auto& m = h2();
  const auto [p, g] = default_filter_params(m.norm, m.gap);
  const auto k = jump_quadrature(m.h, CMatrix(CMatrix::Zero(16, 16)), p, g);
  EXPECT_EQ(k.matrix.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(k.provenance, Provenance::kQuadrature);
}

// Independent route: explicit Heisenberg factors by dense matrix exponential.
TEST(JumpQuadrature, MatchesExplicitHeisenbergSum) {
  const auto& m = h2();
  const auto [p, g] = default_filter_params(m.norm, m.gap);
  const CMatrix a = build_operator_matrix({annihilate(1)}, m.basis).dense();
  const CMatrix h = m.h.dense();
  const CMatrix step = (CMatrix(kI * g.spacing() * h)).exp();
  CMatrix u = (CMatrix(-kI * g.truncation() * h)).exp();
  CMatrix acc = CMatrix::Zero(16, 16);
  for (int l = -g.half_count(); l <= g.half_count(); ++l) {
    acc += g.weight(l) * filter_time(g.node(l), p) * (u * a * u.adjoint());
    u = step * u;
  }
  const auto k = jump_quadrature(m.eigs, a, p, g);
  EXPECT_LT((k.matrix - acc).norm(), 1e-9 * acc.norm());
}

TEST(JumpQuadrature, FidelityAndRefinement) {
  const auto& m = h2();
  const auto [p, g] = default_filter_params(m.norm, m.gap);
  const auto f = SpectralFilter::erf(p);
  const auto cs = build_coupling_set(CouplingKind::kTypeI, 2, 0, m.basis);
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const CMatrix ex = jump_exact(m.eigs, cs.matrices[k], f).matrix;
    const CMatrix qu = jump_quadrature(m.eigs, cs.matrices[k].dense(), p, g).matrix;
    EXPECT_LE((qu - ex).norm() / ex.norm(), 1e-2) << cs.labels[k];
    // Trapezoid refinement at fixed S_s from an eight-times coarser grid.
    double prev = std::numeric_limits<double>::infinity();
    for (int level : {8, 4, 2, 1}) {
      const QuadratureGrid gl(g.truncation(), std::max(1, g.half_count() / level));
      const double err =
          (jump_quadrature(m.eigs, cs.matrices[k].dense(), p, gl).matrix - ex).norm() / ex.norm();
      EXPECT_LT(err, prev) << cs.labels[k] << " level " << level;
      prev = err;
    }
  }
}

}  // namespace
}  // namespace lgsp
