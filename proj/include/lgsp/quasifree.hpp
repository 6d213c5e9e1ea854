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

// quasifree.hpp - Hartree-Fock level dynamics: Fock models, the closed
// 1-RDM equation of motion, HF many-body Lindblad models and mean-field
// Type-II rate equations.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lgsp/basis.hpp"
#include "lgsp/core.hpp"
#include "lgsp/filter.hpp"
#include "lgsp/jumps.hpp"
#include "lgsp/lindblad.hpp"
#include "lgsp/ode.hpp"

namespace lgsp {

inline constexpr double kDegeneracyTolerance = 1e-10;

// Fock matrix F = Phi diag(eps) Phi^+, eps ascending, with N_e electrons.
//
// Each eigenvector is phase-fixed so its first component of largest
// modulus is real positive; within degenerate clusters columns are sorted
// lexicographically by their real parts. When eps[N_e-1] < 0 < eps[N_e]
// fails, a chemical potential mu is chosen midway and the filter sees
// F - mu. eps() reports the unshifted spectrum.
class FockModel {
 public:
  FockModel(const CMatrix& f, int num_electrons) : f_(0.5 * (f + f.adjoint())), ne_(num_electrons) {
    const auto n = f.rows();
    if (f.cols() != n || n == 0) throw ArgumentError("FockModel: F must be square");
    if (hermiticity_defect(f) > 1e-10 * std::max(1.0, f.cwiseAbs().maxCoeff())) {
      throw ConsistencyError("FockModel: F not Hermitian");
    }
    if (num_electrons < 0 || num_electrons > n) {
      throw ArgumentError("FockModel: electron count outside [0, 2L]");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(f_);
    eps_ = es.eigenvalues();
    phi_ = es.eigenvectors();
    fix_gauge();

    const double lower = ne_ > 0 ? eps_(ne_ - 1) : eps_(0) - 1.0;
    const double upper = ne_ < n ? eps_(ne_) : eps_(n - 1) + 1.0;
    if (!(upper - lower > kDegeneracyTolerance)) {
      throw ApplicabilityError("FockModel: HOMO and LUMO are degenerate (open shell)");
    }
    if (!(lower < 0.0 && upper > 0.0)) mu_ = 0.5 * (lower + upper);
  }

  FockModel(const RMatrix& f, int num_electrons)
      : FockModel(CMatrix(f.cast<Complex>()), num_electrons) {}

  Eigen::Index dim() const noexcept { return f_.rows(); }
  int num_electrons() const noexcept { return ne_; }
  const CMatrix& F() const noexcept { return f_; }
  const CMatrix& phi() const noexcept { return phi_; }
  const RVector& eps() const noexcept { return eps_; }
  double mu() const noexcept { return mu_; }
  bool shifted() const noexcept { return mu_ != 0.0; }
  // Spectrum seen by the filter.
  RVector filter_eps() const { return eps_.array() - mu_; }

  // Largest gap parameter for which the ideal filter is an exact indicator
  // on every single-particle transition: min(-eps_HOMO, eps_LUMO, smallest
  // nonzero level spacing), all relative to mu.
  double ideal_gap() const {
    const RVector e = filter_eps();
    double g = std::numeric_limits<double>::infinity();
    if (ne_ > 0) g = std::min(g, -e(ne_ - 1));
    if (ne_ < dim()) g = std::min(g, e(ne_));
    for (Eigen::Index i = 1; i < e.size(); ++i) {
      const double s = e(i) - e(i - 1);
      if (s > kDegeneracyTolerance) g = std::min(g, s);
    }
    return g;
  }

  bool nondegenerate() const {
    for (Eigen::Index i = 1; i < eps_.size(); ++i)
      if (eps_(i) - eps_(i - 1) <= kDegeneracyTolerance) return false;
    return true;
  }

  // phi g(eps - mu) phi^+
  template <class Fn>
  CMatrix spectral(Fn&& g) const {
    const RVector e = filter_eps();
    CVector w(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) w(i) = g(e(i));
    return phi_ * w.asDiagonal() * phi_.adjoint();
  }

  // P~ = Phi^+ P Phi
  CMatrix to_mo(const CMatrix& p) const { return phi_.adjoint() * p * phi_; }
  CMatrix from_mo(const CMatrix& pt) const { return phi_ * pt * phi_.adjoint(); }

  // Aufbau 1-RDM in the raw gauge.
  CMatrix aufbau_rdm() const {
    CMatrix d = CMatrix::Zero(dim(), dim());
    for (int i = 0; i < ne_; ++i) d(i, i) = 1.0;
    return from_mo(d);
  }

 private:
  void fix_gauge() {
    const auto n = phi_.cols();
    for (Eigen::Index k = 0; k < n; ++k) {
      Eigen::Index arg = 0;
      double best = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double a = std::abs(phi_(i, k));
        if (a > best + 1e-12) {
          best = a;
          arg = i;
        }
      }
      phi_.col(k) *= std::conj(phi_(arg, k)) / std::abs(phi_(arg, k));
    }
    Eigen::Index start = 0;
    while (start < n) {
      Eigen::Index stop = start + 1;
      while (stop < n && eps_(stop) - eps_(stop - 1) <= kDegeneracyTolerance) ++stop;
      if (stop - start > 1) {
        std::vector<Eigen::Index> idx(stop - start);
        std::iota(idx.begin(), idx.end(), start);
        std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
          for (Eigen::Index i = 0; i < n; ++i) {
            const double x = phi_(i, a).real(), y = phi_(i, b).real();
            if (std::abs(x - y) > 1e-12) return x > y;
          }
          return a < b;
        });
        CMatrix block(n, stop - start);
        for (std::size_t c = 0; c < idx.size(); ++c) block.col(c) = phi_.col(idx[c]);
        phi_.middleCols(start, stop - start) = block;
      }
      start = stop;
    }
  }

  CMatrix f_;
  int ne_;
  RVector eps_;
  CMatrix phi_;
  double mu_ = 0.0;
};

enum class Gauge { kRaw, kMolecularOrbital };

struct OneRDM {
  CMatrix P;
  Gauge gauge = Gauge::kRaw;
  double t = 0.0;
};

struct QuasiFreeCoefficients {
  CMatrix B;
  CMatrix C;
};

// B = f(F) f(F)^+, C = f(-F) f(-F)^+, both through the eigenbasis of F.
inline QuasiFreeCoefficients bc_matrices(const FockModel& m, const SpectralFilter& f) {
  const CMatrix fp = m.spectral([&](double e) { return f(e); });
  const CMatrix fm = m.spectral([&](double e) { return f(-e); });
  return {fp * fp.adjoint(), fm * fm.adjoint()};
}

// dP/dt = -i[F, P] + B - (P (B + C) + (B + C) P) / 2
inline CMatrix rdm_rhs(const CMatrix& f, const QuasiFreeCoefficients& bc, const CMatrix& p) {
  const CMatrix s = bc.B + bc.C;
  return -kI * (f * p - p * f) + bc.B - 0.5 * (p * s + s * p);
}

inline std::vector<OneRDM> propagate_rdm(const FockModel& m, const QuasiFreeCoefficients& bc,
                                         const CMatrix& p0, const std::vector<double>& times,
                                         const OdeOptions& ode = {}) {
  if (p0.rows() != m.dim() || p0.cols() != m.dim()) {
    throw ArgumentError("propagate_rdm: P0 dimension differs from F");
  }
  std::vector<OneRDM> out;
  CMatrix p = p0;
  auto rhs = [&](double, const CMatrix& x) { return rdm_rhs(m.F(), bc, x); };
  auto record = [&](double t, const CMatrix& x) { out.push_back({x, Gauge::kRaw, t}); };
  auto symmetrize = [](CMatrix& x) { x = (0.5 * (x + x.adjoint())).eval(); };
  dopri5(rhs, p, 0.0, times, record, symmetrize, ode);
  return out;
}

inline constexpr double kTypeOneTolerance = 1e-8;

// P(t) = e^{-iFt} (P0 - P*) e^{iFt} e^{-t} + P*, valid when B + C = I.
// The fixed point is P* = B, which equals f(F) for an indicator filter.
inline OneRDM type1_closed_form(const FockModel& m, const QuasiFreeCoefficients& bc,
                                const CMatrix& p0, double t) {
  const auto n = m.dim();
  const double defect = (bc.B + bc.C - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (defect > kTypeOneTolerance) {
    throw ApplicabilityError("type1_closed_form: B + C differs from identity by " +
                             std::to_string(defect));
  }
  if (t == 0.0) return {p0, Gauge::kRaw, 0.0};
  CVector ph(n);
  for (Eigen::Index i = 0; i < n; ++i) ph(i) = std::exp(-kI * m.eps()(i) * t);
  const CMatrix u = m.phi() * ph.asDiagonal() * m.phi().adjoint();
  return {u * (p0 - bc.B) * u.adjoint() * std::exp(-t) + bc.B, Gauge::kRaw, t};
}

enum class HfKind { kTypeI, kTypeII };

// Many-body HF model on a basis of MO determinants: H = sum eps_p n_p and
// closed-form jumps
//   Type-I:  K_{p,+} = sum_k c_k^+ f(eps_k) conj(Phi_pk),
//            K_{q,-} = sum_k c_k f(-eps_k) Phi_qk,
//   Type-II: K_ij = sum_{p<q} c_p^+ c_q conj(Phi_ip) Phi_jq.
// `couplings` restricts the raw spin orbitals entering the set (reduced
// variants); empty means all.
inline LindbladModel build_hf_manybody_model(const FockModel& m, HfKind kind,
                                             const SpectralFilter& filter,
                                             const BasisPtr& basis,
                                             std::vector<int> couplings = {}) {
  const int n = static_cast<int>(m.dim());
  if (basis->num_spin_orbitals() != n) {
    throw ArgumentError("build_hf_manybody_model: basis orbital count differs from F");
  }
  if (kind == HfKind::kTypeI && !basis->sector().is_fock()) {
    throw SectorError("build_hf_manybody_model: Type-I jumps need a Fock-space basis");
  }
  if (couplings.empty()) {
    couplings.resize(n);
    std::iota(couplings.begin(), couplings.end(), 0);
  }
  const auto d = static_cast<Eigen::Index>(basis->size());
  CMatrix h = CMatrix::Zero(d, d);
  for (int p = 0; p < n; ++p) h += m.eps()(p) * number_operator(p, basis).dense();

  const RVector e = m.filter_eps();
  const CMatrix& phi = m.phi();
  std::vector<JumpOperator> jumps;

  if (kind == HfKind::kTypeI) {
    std::vector<CMatrix> cre(n), ann(n);
    for (int k = 0; k < n; ++k) {
      cre[k] = build_operator_matrix({create(k)}, basis).dense();
      ann[k] = build_operator_matrix({annihilate(k)}, basis).dense();
    }
    for (int p : couplings) {
      CMatrix k = CMatrix::Zero(d, d);
      for (int r = 0; r < n; ++r) k += filter(e(r)) * std::conj(phi(p, r)) * cre[r];
      jumps.push_back({k, Provenance::kClosedForm, "K+_" + orbital_label(p)});
    }
    for (int q : couplings) {
      CMatrix k = CMatrix::Zero(d, d);
      for (int r = 0; r < n; ++r) k += filter(-e(r)) * phi(q, r) * ann[r];
      jumps.push_back({k, Provenance::kClosedForm, "K-_" + orbital_label(q)});
    }
  } else {
    std::vector<CMatrix> hop(static_cast<std::size_t>(n) * n);
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q)
        hop[p * n + q] = build_operator_matrix({create(p), annihilate(q)}, basis).dense();
    for (int i : couplings)
      for (int j : couplings) {
        CMatrix k = CMatrix::Zero(d, d);
        for (int p = 0; p < n; ++p)
          for (int q = p + 1; q < n; ++q) {
            const Complex w = std::conj(phi(i, p)) * phi(j, q);
            if (w != Complex(0.0)) k += w * hop[p * n + q];
          }
        jumps.push_back(
            {k, Provenance::kClosedForm, "K_" + orbital_label(i) + "," + orbital_label(j)});
      }
  }
  return LindbladModel(basis, std::move(h), std::move(jumps));
}

// Mean-field Type-II rate equations for P~ in the MO gauge:
//   dP_rr/dt = -<M_r> P_rr + sum_{q>r} P_qq
//   dP_sr/dt = [-(1 + <M_r> + <M_s>)/2 + i(eps_r - eps_s)] P_sr
// with <M_k> = sum_{p<k} (1 - P_pp) + sum_{q>k} P_qq. The diagonal block
// evolves on its own; the off-diagonal entries only read it.
inline CMatrix meanfield_rhs(const RVector& eps, const CMatrix& pt) {
  const auto n = pt.rows();
  RVector dg(n);
  for (Eigen::Index k = 0; k < n; ++k) dg(k) = pt(k, k).real();
  RVector mk(n);
  double below = 0.0;  // sum_{p<k} (1 - d_p)
  double above = dg.sum();
  for (Eigen::Index k = 0; k < n; ++k) {
    above -= dg(k);
    mk(k) = below + above;
    below += 1.0 - dg(k);
  }
  CMatrix out(n, n);
  double tail = dg.sum();
  for (Eigen::Index r = 0; r < n; ++r) {
    tail -= dg(r);
    out(r, r) = -mk(r) * dg(r) + tail;
  }
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index s = 0; s < n; ++s) {
      if (r == s) continue;
      const Complex rate(-0.5 * (1.0 + mk(r) + mk(s)), eps(r) - eps(s));
      out(s, r) = rate * pt(s, r);
    }
  return out;
}

inline std::vector<OneRDM> meanfield_propagate(const FockModel& m, const CMatrix& pt0,
                                               const std::vector<double>& times,
                                               const OdeOptions& ode = {}) {
  if (pt0.rows() != m.dim() || pt0.cols() != m.dim()) {
    throw ArgumentError("meanfield_propagate: P~0 dimension differs from F");
  }
  for (Eigen::Index k = 0; k < pt0.rows(); ++k) {
    const double x = pt0(k, k).real();
    if (x < -1e-12 || x > 1.0 + 1e-12) {
      throw ArgumentError("meanfield_propagate: diagonal entries must lie in [0, 1]");
    }
  }
  std::vector<OneRDM> out;
  CMatrix p = pt0;
  const RVector eps = m.eps();
  auto rhs = [&](double, const CMatrix& x) { return meanfield_rhs(eps, x); };
  auto record = [&](double t, const CMatrix& x) {
    out.push_back({x, Gauge::kMolecularOrbital, t});
  };
  dopri5(rhs, p, 0.0, times, record, ode);
  return out;
}

}  // namespace lgsp
