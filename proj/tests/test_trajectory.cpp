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

#include "lgsp/trajectory.hpp"
#include "oracles.hpp"

namespace lgsp {
namespace {

LindbladModel damping(double gamma) {
  CMatrix k = CMatrix::Zero(2, 2);
  k(0, 1) = std::sqrt(gamma);
  return LindbladModel(nullptr, CMatrix(CMatrix::Zero(2, 2)), {{k, Provenance::kExactEigenbasis, "s-"}});
}

CVector excited() { return CVector::Unit(2, 1); }

TEST(CounterRng, Deterministic) {
  CounterRng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
  CounterRng u(7);
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform();
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
    mean += x;
  }
  EXPECT_NEAR(mean / 100000, 0.5, 5e-3);
  EXPECT_NE(trajectory_seed(1, 0), trajectory_seed(1, 1));
  EXPECT_NE(trajectory_seed(1, 0), trajectory_seed(2, 0));
}

TEST(JumpProbabilities, Basics) {
  const auto m = damping(1.0);
  const auto p = jump_probabilities(m, excited(), 0.1);
  ASSERT_EQ(p.p.size(), 1u);
  EXPECT_DOUBLE_EQ(p.p[0], 0.1);
  EXPECT_EQ(p.p[0] + p.no_jump, 1.0);
  EXPECT_THROW(jump_probabilities(m, excited(), 0.2), StepSizeError);
  EXPECT_NO_THROW(jump_probabilities(m, excited(), 0.2, 0.5));
  EXPECT_EQ(jump_probabilities(m, CVector::Unit(2, 0), 0.5).p[0], 0.0);
}

TEST(RunTrajectory, NoJumpsFollowsPhases) {
  const CMatrix h = Eigen::Vector3d(-1.0, 0.5, 2.0).cast<Complex>().asDiagonal();
  const LindbladModel m(nullptr, h, {});
  CVector psi0 = CVector::Ones(3) / std::sqrt(3.0);
  TrajectoryConfig cfg;
  cfg.dt = 0.01;
  cfg.T = 2.0;
  cfg.sample_every = 50;
  cfg.drift = DriftScheme::kExact;
  const auto r = run_trajectory(m, psi0, cfg, 1);
  for (std::size_t s = 0; s < r.times.size(); ++s) {
    CVector ref(3);
    for (int i = 0; i < 3; ++i) ref(i) = psi0(i) * std::exp(-kI * h(i, i).real() * r.times[s]);
    EXPECT_LT((r.states[s] - ref).norm(), 1e-12);
  }
  cfg.drift = DriftScheme::kEuler;
  const auto e = run_trajectory(m, psi0, cfg, 1);
  CVector ref(3);
  for (int i = 0; i < 3; ++i) ref(i) = psi0(i) * std::exp(-kI * h(i, i).real() * 2.0);
  EXPECT_LT(std::abs(std::abs(ref.dot(e.states.back())) - 1.0), 1e-3);
  // Euler drift reweights populations by O(T dt).
  EXPECT_NEAR(e.energy.back(), (h.diagonal().real().sum()) / 3.0, 0.05);
}

TEST(RunEnsemble, BitIdenticalAcrossRunsAndWorkers) {
  const auto m = damping(1.0);
  TrajectoryConfig cfg;
  cfg.dt = 0.05;
  cfg.T = 3.0;
  cfg.ntraj = 97;
  cfg.seed = 1234;
  cfg.workers = 1;
  const auto a = run_ensemble(m, excited(), cfg, excited());
  cfg.workers = 5;
  const auto b = run_ensemble(m, excited(), cfg, excited());
  const auto c = run_ensemble(m, excited(), cfg, excited());
  EXPECT_EQ(a.energy, b.energy);
  EXPECT_EQ(a.overlap, b.overlap);
  EXPECT_EQ(b.overlap, c.overlap);
  ASSERT_EQ(a.rho.size(), b.rho.size());
  for (std::size_t s = 0; s < a.rho.size(); ++s) EXPECT_EQ(a.rho[s], b.rho[s]);
  cfg.seed = 1235;
  EXPECT_NE(run_ensemble(m, excited(), cfg, excited()).overlap, a.overlap);
}

TEST(RunEnsemble, SingleTrajectoryEqualsRunTrajectory) {
  const auto m = damping(1.0);
  TrajectoryConfig cfg;
  cfg.dt = 0.05;
  cfg.T = 2.0;
  cfg.seed = 99;
  const auto e = run_ensemble(m, excited(), cfg, excited());
  const auto t = run_trajectory(m, excited(), cfg, trajectory_seed(99, 0), excited());
  EXPECT_EQ(e.energy, t.energy);
  EXPECT_EQ(e.overlap, t.overlap);
  EXPECT_EQ(e.times, t.times);
}

TEST(RunEnsemble, AmplitudeDampingPopulation) {
  const auto m = damping(1.0);
  TrajectoryConfig cfg;
  cfg.dt = 0.01;
  cfg.T = 3.0;
  cfg.ntraj = 10000;
  cfg.seed = 2024;
  cfg.sample_every = 10;
  for (auto variant : {TrajectoryVariant::kPerStep, TrajectoryVariant::kNormDecay}) {
    cfg.variant = variant;
    const auto r = run_ensemble(m, excited(), cfg, excited());
    double sq = 0.0, var = 0.0;
    for (std::size_t s = 0; s < r.times.size(); ++s) {
      const double exact = std::exp(-r.times[s]);
      EXPECT_LE(std::abs(r.overlap[s] - exact), 3.0 * r.overlap_stderr[s] + 1e-12)
          << "t=" << r.times[s];
      const double d = r.rho[s](1, 1).real() - exact;
      sq += d * d;
      var += r.overlap_stderr[s] * r.overlap_stderr[s] * cfg.ntraj;
    }
    const double n = static_cast<double>(r.times.size());
    EXPECT_LE(std::sqrt(sq / n), 3.0 / std::sqrt(cfg.ntraj) * std::sqrt(var / n));
  }
}

TEST(RunEnsemble, VariantsAgree) {
  const auto m = damping(0.8);
  TrajectoryConfig cfg;
  cfg.dt = 0.02;
  cfg.T = 2.0;
  cfg.ntraj = 5000;
  cfg.seed = 5;
  cfg.sample_every = 10;
  const CVector plus = CVector::Ones(2) / std::sqrt(2.0);
  const auto a = run_ensemble(m, plus, cfg, excited());
  cfg.variant = TrajectoryVariant::kNormDecay;
  const auto b = run_ensemble(m, plus, cfg, excited());
  for (std::size_t s = 0; s < a.times.size(); ++s) {
    const double se = std::hypot(a.overlap_stderr[s], b.overlap_stderr[s]);
    EXPECT_LE(std::abs(a.overlap[s] - b.overlap[s]), 3.0 * se + 2.0 * cfg.dt);
  }
}

TEST(RunEnsemble, GroundStateHasNoSpuriousJumps) {
  std::ifstream in(oracle::fixture("h2_sto3g.fcidump"));
  const auto ints = parse_fcidump(in);
  const auto basis = enumerate_basis(2, Sector::fock());
  const auto h = assemble_hamiltonian(ints, basis);
  const auto eigs = exact_eigensystem(h);
  const auto cs = build_coupling_set(CouplingKind::kSI, 2, 1, basis);
  const LindbladModel m(basis, h, exact_jumps(eigs, cs, SpectralFilter::ideal(eigs.gap())));
  TrajectoryConfig cfg;
  cfg.dt = 0.1;
  cfg.T = 5.0;
  cfg.ntraj = 20;
  cfg.record_events = true;
  const auto r = run_ensemble(m, eigs.ground_state(), cfg, eigs.ground_state());
  for (double e : r.energy) EXPECT_NEAR(e, eigs.ground_energy(), 1e-6);
  for (const auto& ev : r.events) EXPECT_TRUE(ev.empty());
}

TEST(RunEnsemble, FailureNamesSeed) {
  const auto m = damping(1.0);
  TrajectoryConfig cfg;
  cfg.dt = 0.5;
  cfg.T = 1.0;
  cfg.ntraj = 3;
  try {
    run_ensemble(m, excited(), cfg);
    FAIL();
  } catch (const DiagnosticError& e) {
    EXPECT_NE(std::string(e.what()).find("seed"), std::string::npos);
  }
}

}  // namespace
}  // namespace lgsp
