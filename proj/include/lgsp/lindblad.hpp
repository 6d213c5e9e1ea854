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


#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "lgsp/basis.hpp"
#include "lgsp/core.hpp"
#include "lgsp/jumps.hpp"
#include "lgsp/ode.hpp"

namespace lgsp {

// Hamiltonian plus jump operators over one basis. Caches
// G = sum K^+ K and J = -iH - G/2 so that L[rho] = J rho + rho J^+ + sum K rho K^+.
class LindbladModel {
 public:
  LindbladModel(BasisPtr basis, CMatrix h, std::vector<JumpOperator> jumps)
      : basis_(std::move(basis)), h_(std::move(h)), jumps_(std::move(jumps)) {
    const auto d = h_.rows();
    if (h_.cols() != d) throw ArgumentError("LindbladModel: H must be square");
    if (basis_ && static_cast<Eigen::Index>(basis_->size()) != d) {
      throw ArgumentError("LindbladModel: H dimension differs from basis size");
    }
    g_ = CMatrix::Zero(d, d);
    for (const auto& k : jumps_) {
      if (k.matrix.rows() != d || k.matrix.cols() != d) {
        throw ArgumentError("LindbladModel: jump '" + k.label + "' has wrong dimension");
      }
      g_.noalias() += k.matrix.adjoint() * k.matrix;
    }
    j_ = -kI * h_ - 0.5 * g_;
  }

  LindbladModel(BasisPtr basis, const HamiltonianMatrix& h, std::vector<JumpOperator> jumps)
      : LindbladModel(std::move(basis), h.dense(), std::move(jumps)) {}

  Eigen::Index dim() const noexcept { return h_.rows(); }
  const BasisPtr& basis() const noexcept { return basis_; }
  const CMatrix& hamiltonian() const noexcept { return h_; }
  const std::vector<JumpOperator>& jumps() const noexcept { return jumps_; }
  // sum_k K_k^+ K_k
  const CMatrix& jump_gram() const noexcept { return g_; }
  // -iH - G/2
  const CMatrix& effective_generator() const noexcept { return j_; }

 private:
  BasisPtr basis_;
  CMatrix h_;
  std::vector<JumpOperator> jumps_;
  CMatrix g_;
  CMatrix j_;
};

struct DensityMatrix {
  CMatrix rho;
  double t = 0.0;

  static DensityMatrix pure(const CVector& psi, double t = 0.0) {
    const CVector v = psi / psi.norm();
    return {v * v.adjoint(), t};
  }

  double trace() const { return rho.trace().real(); }
  double purity() const { return (rho * rho).trace().real(); }
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  }

  // Throws DiagnosticError when the stated tolerances are violated.
  void check(double herm_tol = 1e-10, double trace_tol = 1e-8, double pos_tol = 1e-8) const {
    if (hermiticity_defect(rho) > herm_tol) throw DiagnosticError("density matrix not Hermitian");
    if (std::abs(trace() - 1.0) > trace_tol) throw DiagnosticError("density matrix trace != 1");
    if (min_eigenvalue() < -pos_tol) throw DiagnosticError("density matrix not positive");
  }
};

inline CMatrix apply_generator(const LindbladModel& m, const CMatrix& rho) {
  if (rho.rows() != m.dim() || rho.cols() != m.dim()) {
    throw ArgumentError("apply_generator: density matrix dimension differs from model");
  }
  CMatrix out = m.effective_generator() * rho;
  out.noalias() += rho * m.effective_generator().adjoint();
  for (const auto& k : m.jumps()) out.noalias() += k.matrix * rho * k.matrix.adjoint();
  return out;
}

// Column-major vec: vec(A X B) = (B^T kron A) vec(X).
inline CVector vec(const CMatrix& x) { return Eigen::Map<const CVector>(x.data(), x.size()); }

inline CMatrix unvec(const CVector& v, Eigen::Index d) {
  return Eigen::Map<const CMatrix>(v.data(), d, d);
}

namespace detail {

inline void check_superop_cap(Eigen::Index d, std::size_t cap) {
  if (static_cast<std::size_t>(d) > cap) {
    throw CapacityError("vectorized generator: dimension " + std::to_string(d) +
                        " exceeds cap " + std::to_string(cap));
  }
}

inline CMatrix vectorize(const CMatrix& j, const std::vector<const CMatrix*>& ks) {
  const auto d = j.rows();
  const CMatrix id = CMatrix::Identity(d, d);
  CMatrix l = Eigen::kroneckerProduct(id, j).eval();
  l += Eigen::kroneckerProduct(j.conjugate(), id).eval();
  for (const CMatrix* k : ks) l += Eigen::kroneckerProduct(k->conjugate(), *k).eval();
  return l;
}

}  // namespace detail

inline CMatrix vectorized_generator(const LindbladModel& m,
                                    std::size_t cap = limits::kDefaultMaxSuperopDim) {
  detail::check_superop_cap(m.dim(), cap);
  std::vector<const CMatrix*> ks;
  for (const auto& k : m.jumps()) ks.push_back(&k.matrix);
  return detail::vectorize(m.effective_generator(), ks);
}

inline constexpr double kZeroEigenvalueThreshold = 1e-9;

// -max Re(lambda) over eigenvalues of the vectorized generator with
// |lambda| > zero_tol.
inline double spectral_gap(const CMatrix& superop, double zero_tol = kZeroEigenvalueThreshold) {
  Eigen::ComplexEigenSolver<CMatrix> es(superop, false);
  if (es.info() != Eigen::Success) throw DiagnosticError("spectral_gap: eigensolver failed");
  bool has_zero = false;
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Complex lam = es.eigenvalues()(i);
    if (std::abs(lam) <= zero_tol) {
      has_zero = true;
    } else {
      top = std::max(top, lam.real());
    }
  }
  if (!has_zero) throw DiagnosticError("spectral_gap: no stationary mode found");
  return std::isfinite(top) ? -top : 0.0;
}

inline double spectral_gap(const LindbladModel& m, double zero_tol = kZeroEigenvalueThreshold,
                           std::size_t cap = limits::kDefaultMaxSuperopDim) {
  return spectral_gap(vectorized_generator(m, cap), zero_tol);
}

struct ParentHamiltonian {
  CMatrix h_dp;               // (1/2) sum K^+ K
  double gap = 0.0;           // lowest nonzero level above the ground level
  double ground_level = 0.0;  // zero for a frustration-free parent
  double commutator_norm = 0.0;  // |[H, H_dp]|_F
};

inline ParentHamiltonian dissipative_parent_hamiltonian(const LindbladModel& m,
                                                        double degeneracy_tol = 1e-9) {
  if (m.jumps().empty()) throw ArgumentError("dissipative_parent_hamiltonian: no jumps");
  ParentHamiltonian out;
  out.h_dp = 0.5 * m.jump_gram();
  const auto eigs = exact_eigensystem(CMatrix(0.5 * (out.h_dp + out.h_dp.adjoint())));
  out.ground_level = eigs.values(0);
  out.gap = eigs.gap(degeneracy_tol);
  out.commutator_norm = (m.hamiltonian() * out.h_dp - out.h_dp * m.hamiltonian()).norm();
  return out;
}

// P_ij = Tr(rho a_j^+ a_i), evaluated from the determinant expansion of rho.
inline CMatrix one_rdm(const SectorBasis& basis, const CMatrix& rho) {
  const int n = basis.num_spin_orbitals();
  CMatrix p = CMatrix::Zero(n, n);
  // Tr(rho a_j^+ a_i) = sum_{D} <D| rho a_j^+ a_i |D> = sum_D rho(D', D) s
  // where a_j^+ a_i |D> = s |D'>.
  for (std::size_t c = 0; c < basis.size(); ++c) {
    const Determinant det = basis.determinant(c);
    for (int i = 0; i < n; ++i) {
      if (!det.occupied(i)) continue;
      const auto di = ladder_action(det, i, LadderKind::kAnnihilate);
      for (int j = 0; j < n; ++j) {
        const auto dj = ladder_action(di->det, j, LadderKind::kCreate);
        if (!dj) continue;
        const auto row = basis.find(dj->det.occupation);
        if (!row) continue;
        p(i, j) += rho(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(*row)) *
                   static_cast<double>(di->sign * dj->sign);
      }
    }
  }
  return p;
}

struct Observation {
  double t = 0.0;
  double energy = 0.0;
  double overlap = std::numeric_limits<double>::quiet_NaN();
  double trace = 0.0;
  double purity = 0.0;
  double min_eigenvalue = 0.0;
  std::optional<CMatrix> rdm;
};

struct ObservableSeries {
  std::vector<Observation> samples;

  std::size_t size() const noexcept { return samples.size(); }
  const Observation& back() const { return samples.back(); }
  void push(Observation o) {
    if (!samples.empty() && !(o.t > samples.back().t)) {
      throw ArgumentError("ObservableSeries: times must increase strictly");
    }
    samples.push_back(std::move(o));
  }
};

struct ObservableOptions {
  std::optional<CVector> ground_state;
  bool record_rdm = false;
};

inline Observation observables(const LindbladModel& m, const CMatrix& rho, double t,
                               const ObservableOptions& opt = {}) {
  Observation o;
  o.t = t;
  o.energy = (m.hamiltonian() * rho).trace().real();
  o.trace = rho.trace().real();
  o.purity = (rho * rho).trace().real();
  o.min_eigenvalue = DensityMatrix{rho, t}.min_eigenvalue();
  if (opt.ground_state) {
    const CVector& g = *opt.ground_state;
    o.overlap = g.dot(rho * g).real();
  }
  if (opt.record_rdm) {
    if (!m.basis()) throw ArgumentError("observables: 1-RDM needs a determinant basis");
    o.rdm = one_rdm(*m.basis(), rho);
  }
  return o;
}

struct PropagationResult {
  ObservableSeries series;
  DensityMatrix final_state;
  OdeStats stats;
};

// DOPRI5 on the matrix ODE; rho is re-symmetrized after each accepted step.
inline PropagationResult propagate_density(const LindbladModel& m, const CMatrix& rho0,
                                           const std::vector<double>& sample_times,
                                           const ObservableOptions& obs = {},
                                           const OdeOptions& ode = {}) {
  if (rho0.rows() != m.dim() || rho0.cols() != m.dim()) {
    throw ArgumentError("propagate_density: initial state dimension differs from model");
  }
  PropagationResult out;
  CMatrix rho = rho0;
  auto rhs = [&](double, const CMatrix& x) { return apply_generator(m, x); };
  auto record = [&](double t, const CMatrix& x) { out.series.push(observables(m, x, t, obs)); };
  auto symmetrize = [](CMatrix& x) { x = (0.5 * (x + x.adjoint())).eval(); };
  out.stats = dopri5(rhs, rho, 0.0, sample_times, record, symmetrize, ode);
  out.final_state = {rho, sample_times.empty() ? 0.0 : sample_times.back()};
  return out;
}

// exp(L tau) applied to rho through the vectorized generator.
inline CMatrix exact_channel(const LindbladModel& m, const CMatrix& rho, double tau,
                             std::size_t cap = limits::kDefaultMaxSuperopDim) {
  const CMatrix e = (vectorized_generator(m, cap) * Complex(tau)).exp();
  return unvec(e * vec(rho), m.dim());
}

// exp(L_H tau) then exp(L_K tau).
inline CMatrix trotter_step(const LindbladModel& m, const CMatrix& rho, double tau,
                            std::size_t cap = limits::kDefaultMaxSuperopDim) {
  if (tau < 0.0) throw ArgumentError("trotter_step: tau must be non-negative");
  detail::check_superop_cap(m.dim(), cap);
  const CMatrix u = (CMatrix(-kI * tau * m.hamiltonian())).exp();
  const CMatrix r1 = u * rho * u.adjoint();
  if (m.jumps().empty()) return r1;
  std::vector<const CMatrix*> ks;
  for (const auto& k : m.jumps()) ks.push_back(&k.matrix);
  const CMatrix lk = detail::vectorize(CMatrix(-0.5 * m.jump_gram()), ks);
  return unvec((lk * Complex(tau)).exp() * vec(r1), m.dim());
}

// Dilation K~ = [[0, K^+], [K, 0]] on ancilla (x) system; returns
// Tr_a[U (|0><0| (x) rho) U^+] with U = exp(-i K~ sqrt(tau)).
inline CMatrix dilated_step(const CMatrix& k, const CMatrix& rho, double tau) {
  if (tau < 0.0) throw ArgumentError("dilated_step: tau must be non-negative");
  const auto d = k.rows();
  CMatrix kt = CMatrix::Zero(2 * d, 2 * d);
  kt.topRightCorner(d, d) = k.adjoint();
  kt.bottomLeftCorner(d, d) = k;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(kt);
  const double st = std::sqrt(tau);
  CVector ph(2 * d);
  for (Eigen::Index i = 0; i < 2 * d; ++i) ph(i) = std::exp(-kI * st * es.eigenvalues()(i));
  const CMatrix u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  const CMatrix u00 = u.topLeftCorner(d, d);
  const CMatrix u10 = u.bottomLeftCorner(d, d);
  return u00 * rho * u00.adjoint() + u10 * rho * u10.adjoint();
}

inline CMatrix dilated_step(const LindbladModel& m, const CMatrix& rho, double tau) {
  if (m.jumps().size() != 1) {
    throw ArgumentError("dilated_step: model must hold exactly one jump; apply jumps sequentially");
  }
  return dilated_step(m.jumps().front().matrix, rho, tau);
}

}  // namespace lgsp
