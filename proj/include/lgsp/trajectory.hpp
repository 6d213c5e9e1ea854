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

// trajectory.hpp - quantum-jump unraveling of the Lindblad dynamics.
//
// Seeding: trajectory i of an ensemble with master seed S draws from the
// SplitMix64 stream keyed by mix(S ^ mix(i + 1)). Draw n of a stream keyed
// by k is mix(k + (n + 1) * 0x9E3779B97F4A7C15), so every trajectory is a
// pure function of (model, psi0, config, S, i) and ensembles do not depend
// on how trajectories are scheduled across workers.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "lgsp/core.hpp"
#include "lgsp/lindblad.hpp"

namespace lgsp {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter-based SplitMix64 stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next() {
    ++counter_;
    return splitmix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }
  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

enum class TrajectoryVariant { kPerStep, kNormDecay };
enum class DriftScheme { kEuler, kExact };

struct TrajectoryConfig {
  double dt = 0.1;
  double T = 1.0;
  int ntraj = 1;
  std::uint64_t seed = 0;
  TrajectoryVariant variant = TrajectoryVariant::kPerStep;
  DriftScheme drift = DriftScheme::kEuler;
  int sample_every = 1;   // record every n-th step
  double p_max = 0.1;     // per-step total jump probability guard
  int workers = 0;        // 0 = hardware concurrency
  bool record_density = true;
  bool record_events = false;

  void validate() const {
    if (!(dt > 0.0)) throw ArgumentError("TrajectoryConfig: dt must be positive");
    if (!(T >= 0.0)) throw ArgumentError("TrajectoryConfig: T must be non-negative");
    if (ntraj < 1) throw ArgumentError("TrajectoryConfig: ntraj must be >= 1");
    if (sample_every < 1) throw ArgumentError("TrajectoryConfig: sample_every must be >= 1");
    if (!(p_max > 0.0 && p_max <= 1.0)) throw ArgumentError("TrajectoryConfig: p_max in (0, 1]");
  }
  long steps() const { return std::lround(T / dt); }
  std::vector<double> sample_times() const {
    std::vector<double> t;
    for (long n = 0; n <= steps(); n += sample_every) t.push_back(static_cast<double>(n) * dt);
    return t;
  }
};

struct JumpProbabilities {
  std::vector<double> p;  // p_k = |K_k psi|^2 dt
  double no_jump = 1.0;   // 1 - sum p_k
};

inline JumpProbabilities jump_probabilities(const LindbladModel& m, const CVector& psi, double dt,
                                            double p_max = 0.1) {
  JumpProbabilities out;
  double total = 0.0;
  out.p.reserve(m.jumps().size());
  for (const auto& k : m.jumps()) {
    const double pk = (k.matrix * psi).squaredNorm() * dt;
    out.p.push_back(pk);
    total += pk;
  }
  if (total > p_max) {
    throw StepSizeError("jump probability " + std::to_string(total) + " exceeds p_max " +
                        std::to_string(p_max) + "; reduce dt");
  }
  out.no_jump = 1.0 - total;
  return out;
}

struct JumpEvent {
  double t = 0.0;
  int k = 0;
};

struct TrajectoryResult {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> overlap;  // empty when no reference state is given
  std::vector<CVector> states;  // normalized, when density recording is on
  std::vector<JumpEvent> events;
};

namespace detail {

inline int pick(const std::vector<double>& w, double u) {
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    acc += w[k];
    if (u < acc) return static_cast<int>(k);
  }
  return -1;
}

struct Propagator {
  const LindbladModel& m;
  CMatrix step;  // exp(J dt) for the exact drift
  Propagator(const LindbladModel& model, const TrajectoryConfig& cfg) : m(model) {
    if (cfg.drift == DriftScheme::kExact) step = (m.effective_generator() * Complex(cfg.dt)).exp();
  }
  CVector drift(const CVector& psi, const TrajectoryConfig& cfg) const {
    if (cfg.drift == DriftScheme::kExact) return step * psi;
    return psi + cfg.dt * (m.effective_generator() * psi);
  }
};

inline TrajectoryResult run_trajectory(const Propagator& prop, const CVector& psi0,
                                       const TrajectoryConfig& cfg, std::uint64_t seed,
                                       const std::optional<CVector>& reference) {
  const LindbladModel& m = prop.m;
  CounterRng rng(seed);
  TrajectoryResult out;
  CVector psi = psi0;
  const long nsteps = cfg.steps();
  auto record = [&](double t) {
    const double nn = psi.squaredNorm();
    out.times.push_back(t);
    out.energy.push_back(psi.dot(m.hamiltonian() * psi).real() / nn);
    if (reference) out.overlap.push_back(std::norm(reference->dot(psi)) / nn);
    if (cfg.record_density) out.states.push_back(psi / std::sqrt(nn));
  };
  auto jump = [&](int k, double t) {
    psi = m.jumps()[k].matrix * psi;
    psi /= psi.norm();
    if (cfg.record_events) out.events.push_back({t, k});
  };

  double threshold = rng.uniform();
  std::vector<double> w(m.jumps().size());
  record(0.0);
  for (long n = 1; n <= nsteps; ++n) {
    const double t = static_cast<double>(n) * cfg.dt;
    if (cfg.variant == TrajectoryVariant::kPerStep) {
      const auto pr = jump_probabilities(m, psi, cfg.dt, cfg.p_max);
      const int k = pick(pr.p, rng.uniform());
      if (k >= 0) {
        jump(k, t);
      } else {
        psi = prop.drift(psi, cfg);
        psi /= psi.norm();
      }
    } else {
      psi = prop.drift(psi, cfg);
      if (psi.squaredNorm() < threshold) {
        double tot = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) {
          w[k] = (m.jumps()[k].matrix * psi).squaredNorm();
          tot += w[k];
        }
        if (tot > 0.0) {
          for (double& x : w) x /= tot;
          int k = pick(w, rng.uniform());
          if (k < 0) k = static_cast<int>(w.size()) - 1;
          jump(k, t);
        } else {
          psi /= psi.norm();
        }
        threshold = rng.uniform();
      }
    }
    if (n % cfg.sample_every == 0) record(t);
  }
  return out;
}

}  // namespace detail

inline TrajectoryResult run_trajectory(const LindbladModel& m, const CVector& psi0,
                                       const TrajectoryConfig& cfg, std::uint64_t seed,
                                       const std::optional<CVector>& reference = std::nullopt) {
  cfg.validate();
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw ArgumentError("run_trajectory: |psi0| != 1");
  return detail::run_trajectory(detail::Propagator(m, cfg), psi0, cfg, seed, reference);
}

struct EnsembleResult {
  std::vector<double> times;
  std::vector<double> energy, energy_stderr;
  std::vector<double> overlap, overlap_stderr;
  std::vector<CMatrix> rho;  // mean |psi><psi| per sample, when recorded
  std::vector<std::vector<JumpEvent>> events;
  int ntraj = 0;
};

// Runs cfg.ntraj trajectories on a worker pool. Results are merged in
// trajectory-index order, so the output is bit-identical for any worker
// count.
inline EnsembleResult run_ensemble(const LindbladModel& m, const CVector& psi0,
                                   const TrajectoryConfig& cfg,
                                   const std::optional<CVector>& reference = std::nullopt) {
  cfg.validate();
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw ArgumentError("run_ensemble: |psi0| != 1");
  const detail::Propagator prop(m, cfg);
  const auto times = cfg.sample_times();
  const std::size_t ns = times.size();
  const auto d = m.dim();

  EnsembleResult out;
  out.times = times;
  out.ntraj = cfg.ntraj;
  std::vector<double> e_sum(ns, 0.0), e_sq(ns, 0.0), o_sum(ns, 0.0), o_sq(ns, 0.0);
  if (cfg.record_density) out.rho.assign(ns, CMatrix::Zero(d, d));

  const int workers = std::max(
      1, cfg.workers > 0 ? cfg.workers : static_cast<int>(std::thread::hardware_concurrency()));
  const int block = std::max(workers * 4, 1);
  std::vector<TrajectoryResult> buf;

  for (int base = 0; base < cfg.ntraj; base += block) {
    const int count = std::min(block, cfg.ntraj - base);
    buf.assign(count, {});
    std::atomic<int> next{0};
    std::exception_ptr failure;
    int failed_index = -1;
    std::mutex mu;
    auto work = [&] {
      for (int i; (i = next.fetch_add(1)) < count;) {
        try {
          const auto idx = static_cast<std::uint64_t>(base + i);
          buf[i] = detail::run_trajectory(prop, psi0, cfg, trajectory_seed(cfg.seed, idx),
                                          reference);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure || base + i < failed_index) {
            failure = std::current_exception();
            failed_index = base + i;
          }
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < std::min(workers, count); ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (failure) {
      try {
        std::rethrow_exception(failure);
      } catch (const Error& e) {
        throw DiagnosticError("trajectory " + std::to_string(failed_index) + " (seed " +
                              std::to_string(trajectory_seed(cfg.seed, failed_index)) +
                              ") failed: " + e.what());
      }
    }
    for (int i = 0; i < count; ++i) {
      const auto& r = buf[i];
      for (std::size_t s = 0; s < ns; ++s) {
        e_sum[s] += r.energy[s];
        e_sq[s] += r.energy[s] * r.energy[s];
        if (reference) {
          o_sum[s] += r.overlap[s];
          o_sq[s] += r.overlap[s] * r.overlap[s];
        }
        if (cfg.record_density) out.rho[s].noalias() += r.states[s] * r.states[s].adjoint();
      }
      if (cfg.record_events) out.events.push_back(r.events);
    }
  }

  const double n = cfg.ntraj;
  auto finish = [&](const std::vector<double>& sum, const std::vector<double>& sq,
                    std::vector<double>& mean, std::vector<double>& se) {
    mean.resize(ns);
    se.resize(ns);
    for (std::size_t s = 0; s < ns; ++s) {
      mean[s] = sum[s] / n;
      const double var = n > 1 ? std::max(0.0, (sq[s] - n * mean[s] * mean[s]) / (n - 1)) : 0.0;
      se[s] = std::sqrt(var / n);
    }
  };
  finish(e_sum, e_sq, out.energy, out.energy_stderr);
  if (reference) finish(o_sum, o_sq, out.overlap, out.overlap_stderr);
  for (auto& r : out.rho) r /= n;
  return out;
}

}  // namespace lgsp
