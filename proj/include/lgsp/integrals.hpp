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

// integrals.hpp - FCIDUMP ingestion, spin-orbital integrals, many-body
// Hamiltonian assembly and the dense exact-diagonalization oracle.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Eigenvalues>

#include "lgsp/basis.hpp"
#include "lgsp/core.hpp"

namespace lgsp {

// Spatial-orbital integrals in chemists' notation, Hartree units.
class IntegralSet {
 public:
  IntegralSet() = default;
  IntegralSet(int num_orbitals, int num_electrons, int ms2 = 0)
      : norb_(num_orbitals),
        nelec_(num_electrons),
        ms2_(ms2),
        h_(RMatrix::Zero(num_orbitals, num_orbitals)),
        eri_(static_cast<std::size_t>(num_orbitals) * num_orbitals * num_orbitals * num_orbitals,
             0.0) {
    if (num_orbitals < 1 || num_orbitals > kMaxSpatialOrbitals) {
      throw ArgumentError("IntegralSet: orbital count must lie in [1, 20]");
    }
    if (num_electrons < 0 || num_electrons > 2 * num_orbitals) {
      throw ArgumentError("IntegralSet: electron count outside [0, 2L]");
    }
  }

  int num_orbitals() const noexcept { return norb_; }
  int num_electrons() const noexcept { return nelec_; }
  int ms2() const noexcept { return ms2_; }
  double core_energy() const noexcept { return ecore_; }
  void set_core_energy(double e) noexcept { ecore_ = e; }

  const RMatrix& one_body() const noexcept { return h_; }
  double h(int i, int j) const { return h_(i, j); }
  void set_h(int i, int j, double v) {
    h_(i, j) = v;
    h_(j, i) = v;
  }

  // (ij|kl), 0-based.
  double eri(int i, int j, int k, int l) const { return eri_[flat(i, j, k, l)]; }

  // Writes all eight permutation-equivalent entries.
  void set_eri(int i, int j, int k, int l, double v) {
    for (const auto& [a, b, c, d] : permutations(i, j, k, l)) eri_[flat(a, b, c, d)] = v;
  }

  static std::array<std::array<int, 4>, 8> permutations(int i, int j, int k, int l) {
    return {{{i, j, k, l}, {j, i, k, l}, {i, j, l, k}, {j, i, l, k},
             {k, l, i, j}, {l, k, i, j}, {k, l, j, i}, {l, k, j, i}}};
  }

  // Canonical representative: i>=j, k>=l, (ij)>=(kl).
  static std::array<int, 4> canonical(int i, int j, int k, int l) {
    if (i < j) std::swap(i, j);
    if (k < l) std::swap(k, l);
    if (std::make_pair(i, j) < std::make_pair(k, l)) {
      std::swap(i, k);
      std::swap(j, l);
    }
    return {i, j, k, l};
  }

  friend bool operator==(const IntegralSet& a, const IntegralSet& b) {
    return a.norb_ == b.norb_ && a.nelec_ == b.nelec_ && a.ms2_ == b.ms2_ &&
           a.ecore_ == b.ecore_ && a.h_ == b.h_ && a.eri_ == b.eri_;
  }

 private:
  std::size_t flat(int i, int j, int k, int l) const {
    const auto n = static_cast<std::size_t>(norb_);
    return ((static_cast<std::size_t>(i) * n + j) * n + k) * n + l;
  }

  int norb_ = 0;
  int nelec_ = 0;
  int ms2_ = 0;
  double ecore_ = 0.0;
  RMatrix h_;
  std::vector<double> eri_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

// Accepts Fortran 'D' exponents.
inline std::optional<double> parse_real(std::string tok) {
  std::replace(tok.begin(), tok.end(), 'D', 'E');
  std::replace(tok.begin(), tok.end(), 'd', 'e');
  std::istringstream is(tok);
  double v = 0.0;
  is >> v;
  if (!is || !is.eof()) {
    is >> std::ws;
    if (!is.eof() || is.fail()) return std::nullopt;
  }
  return v;
}

inline std::optional<long> parse_int(const std::string& tok) {
  std::size_t pos = 0;
  try {
    const long v = std::stol(tok, &pos);
    if (pos != tok.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline std::optional<long> header_int(const std::string& header, const std::string& key) {
  const std::regex re("\\b" + key + "\\s*=\\s*([-+]?[0-9]+)");
  std::smatch m;
  if (!std::regex_search(header, m, re)) return std::nullopt;
  return std::stol(m[1].str());
}

}  // namespace detail

inline constexpr double kDuplicateTolerance = 1e-10;

// Molpro-convention FCIDUMP. ORBSYM/ISYM are accepted and ignored, as are
// orbital-energy records "value i 0 0 0".
inline IntegralSet parse_fcidump(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::string header;
  std::size_t header_line = 0;
  bool in_header = false;
  bool header_done = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::upper(detail::trim(line));
    if (t.empty()) continue;
    if (!in_header) {
      if (t.rfind("&FCI", 0) != 0) throw ParseError("expected '&FCI' header", lineno);
      in_header = true;
      header_line = lineno;
    }
    std::string chunk = t;
    const auto end_pos = std::min(chunk.find("&END"), chunk.find('/'));
    if (end_pos != std::string::npos) {
      header += " " + chunk.substr(0, end_pos);
      header_done = true;
      break;
    }
    header += " " + chunk;
  }
  if (!in_header) throw ParseError("empty input: missing '&FCI' header", lineno);
  if (!header_done) throw ParseError("header not terminated by '&END' or '/'", lineno);

  const auto norb = detail::header_int(header, "NORB");
  const auto nelec = detail::header_int(header, "NELEC");
  if (!norb) throw ParseError("header lacks NORB", header_line);
  if (!nelec) throw ParseError("header lacks NELEC", header_line);
  const auto ms2 = detail::header_int(header, "MS2").value_or(0);
  if (*norb < 1 || *norb > kMaxSpatialOrbitals) {
    throw ArgumentError("FCIDUMP: NORB must lie in [1, 20]");
  }
  if (*nelec < 0 || *nelec > 2 * *norb) throw ArgumentError("FCIDUMP: NELEC outside [0, 2*NORB]");

  IntegralSet ints(static_cast<int>(*norb), static_cast<int>(*nelec), static_cast<int>(ms2));
  const int n = ints.num_orbitals();
  std::map<std::array<int, 4>, double> seen_eri;
  std::map<std::pair<int, int>, double> seen_h;
  std::optional<double> seen_core;

  auto check_dup = [&](std::optional<double> prev, double v, const char* what) {
    if (prev && std::abs(*prev - v) > kDuplicateTolerance) {
      throw ConsistencyError(std::string("FCIDUMP line ") + std::to_string(lineno) +
                             ": conflicting duplicate " + what);
    }
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string tok; ls >> tok;) toks.push_back(tok);
    if (toks.empty()) continue;
    if (toks.size() != 5) throw ParseError("expected 'value i j k l'", lineno);
    const auto v = detail::parse_real(toks[0]);
    if (!v) throw ParseError("non-numeric value '" + toks[0] + "'", lineno);
    std::array<int, 4> idx{};
    for (int m = 0; m < 4; ++m) {
      const auto x = detail::parse_int(toks[m + 1]);
      if (!x) throw ParseError("non-integer index '" + toks[m + 1] + "'", lineno);
      if (*x < 0 || *x > n) {
        throw ArgumentError("FCIDUMP line " + std::to_string(lineno) + ": index " +
                            std::to_string(*x) + " outside [0, NORB]");
      }
      idx[m] = static_cast<int>(*x);
    }
    const auto [i, j, k, l] = idx;
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      check_dup(seen_core, *v, "core energy");
      seen_core = *v;
      ints.set_core_energy(*v);
    } else if (i > 0 && j > 0 && k == 0 && l == 0) {
      const auto key = std::minmax(i, j);
      auto it = seen_h.find(key);
      check_dup(it == seen_h.end() ? std::nullopt : std::optional<double>(it->second), *v,
                "one-electron integral");
      seen_h[key] = *v;
      ints.set_h(i - 1, j - 1, *v);
    } else if (i > 0 && j == 0 && k == 0 && l == 0) {
      continue;  // orbital energy record
    } else if (i > 0 && j > 0 && k > 0 && l > 0) {
      const auto key = IntegralSet::canonical(i - 1, j - 1, k - 1, l - 1);
      auto it = seen_eri.find(key);
      check_dup(it == seen_eri.end() ? std::nullopt : std::optional<double>(it->second), *v,
                "two-electron integral");
      seen_eri[key] = *v;
      ints.set_eri(i - 1, j - 1, k - 1, l - 1, *v);
    } else {
      throw ParseError("unrecognized index pattern", lineno);
    }
  }
  return ints;
}

inline IntegralSet parse_fcidump(const std::string& text) {
  std::istringstream is(text);
  return parse_fcidump(is);
}

// Writes canonical entries only; zero integrals are omitted.
inline void write_fcidump(std::ostream& out, const IntegralSet& ints) {
  const int n = ints.num_orbitals();
  out << " &FCI NORB=" << n << ",NELEC=" << ints.num_electrons() << ",MS2=" << ints.ms2()
      << ",\n  ORBSYM=";
  for (int i = 0; i < n; ++i) out << "1,";
  out << "\n  ISYM=1,\n &END\n";
  out << std::setprecision(17) << std::scientific;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l <= k; ++l) {
          if (i * (i + 1) / 2 + j < k * (k + 1) / 2 + l) continue;
          const double v = ints.eri(i, j, k, l);
          if (v != 0.0) {
            out << ' ' << v << ' ' << i + 1 << ' ' << j + 1 << ' ' << k + 1 << ' ' << l + 1
                << '\n';
          }
        }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      if (ints.h(i, j) != 0.0) out << ' ' << ints.h(i, j) << ' ' << i + 1 << ' ' << j + 1 << " 0 0\n";
  out << ' ' << ints.core_energy() << " 0 0 0 0\n";
}

// Spin-orbital integrals for
//   H = sum T_pq c_p^+ c_q + 1/2 sum S_pqrs c_p^+ c_q^+ c_r c_s + E_core.
class SpinIntegrals {
 public:
  explicit SpinIntegrals(IntegralSet ints) : ints_(std::move(ints)) {
    const int n = 2 * ints_.num_orbitals();
    T_ = RMatrix::Zero(n, n);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        if (p % 2 == q % 2) T_(p, q) = ints_.h(p / 2, q / 2);
  }

  int num_spin_orbitals() const noexcept { return 2 * ints_.num_orbitals(); }
  const RMatrix& T() const noexcept { return T_; }
  double core_energy() const noexcept { return ints_.core_energy(); }
  const IntegralSet& spatial() const noexcept { return ints_; }

  // S_pqrs = (ps|qr) with spin(p)=spin(s) and spin(q)=spin(r).
  double S(int p, int q, int r, int s) const {
    if (p % 2 != s % 2 || q % 2 != r % 2) return 0.0;
    return ints_.eri(p / 2, s / 2, q / 2, r / 2);
  }

 private:
  IntegralSet ints_;
  RMatrix T_;
};

inline SpinIntegrals spin_expand(const IntegralSet& ints) { return SpinIntegrals(ints); }

// Energy of a single determinant from the integrals alone (Slater-Condon).
inline double determinant_energy(const SpinIntegrals& si, Occupation mask) {
  const int n = si.num_spin_orbitals();
  double e = si.core_energy();
  for (int p = 0; p < n; ++p) {
    if (!((mask >> p) & 1U)) continue;
    e += si.T()(p, p);
    for (int q = 0; q < n; ++q) {
      if (q == p || !((mask >> q) & 1U)) continue;
      e += 0.5 * (si.S(p, q, q, p) - si.S(p, q, p, q));
    }
  }
  return e;
}

struct HamiltonianMatrix {
  BasisPtr basis;
  SparseCMatrix matrix;

  Eigen::Index dim() const noexcept { return matrix.rows(); }
  CMatrix dense() const { return CMatrix(matrix); }
};

inline constexpr double kIntegralDropTolerance = 0.0;

inline HamiltonianMatrix assemble_hamiltonian(const SpinIntegrals& si, const BasisPtr& basis) {
  if (si.num_spin_orbitals() != basis->num_spin_orbitals()) {
    throw ArgumentError("assemble_hamiltonian: orbital count differs from basis");
  }
  const int n = si.num_spin_orbitals();
  const auto dim = static_cast<Eigen::Index>(basis->size());
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(basis->size() * 8);

  for (std::size_t col = 0; col < basis->size(); ++col) {
    const Determinant det = basis->determinant(col);
    const auto c = static_cast<Eigen::Index>(col);
    trips.emplace_back(c, c, si.core_energy());

    // One-body: T_pq a_p^+ a_q.
    for (int q = 0; q < n; ++q) {
      if (!det.occupied(q)) continue;
      const auto dq = ladder_action(det, q, LadderKind::kAnnihilate);
      for (int p = 0; p < n; ++p) {
        const double t = si.T()(p, q);
        if (t == 0.0) continue;
        const auto dp = ladder_action(dq->det, p, LadderKind::kCreate);
        if (!dp) continue;
        auto row = basis->find(dp->det.occupation);
        if (!row) continue;
        trips.emplace_back(static_cast<Eigen::Index>(*row), c, t * dq->sign * dp->sign);
      }
    }

    // Two-body: 1/2 S_pqrs a_p^+ a_q^+ a_r a_s (s acts first).
    for (int s = 0; s < n; ++s) {
      if (!det.occupied(s)) continue;
      const auto ds = ladder_action(det, s, LadderKind::kAnnihilate);
      for (int r = 0; r < n; ++r) {
        if (r == s || !ds->det.occupied(r)) continue;
        const auto dr = ladder_action(ds->det, r, LadderKind::kAnnihilate);
        for (int q = 0; q < n; ++q) {
          if (dr->det.occupied(q)) continue;
          const auto dq = ladder_action(dr->det, q, LadderKind::kCreate);
          for (int p = 0; p < n; ++p) {
            if (p == q || dq->det.occupied(p)) continue;
            const double v = si.S(p, q, r, s);
            if (v == 0.0) continue;
            const auto dp = ladder_action(dq->det, p, LadderKind::kCreate);
            auto row = basis->find(dp->det.occupation);
            if (!row) continue;
            const int sign = ds->sign * dr->sign * dq->sign * dp->sign;
            trips.emplace_back(static_cast<Eigen::Index>(*row), c, 0.5 * v * sign);
          }
        }
      }
    }
  }
  SparseCMatrix m(dim, dim);
  m.setFromTriplets(trips.begin(), trips.end());
  m.prune([](Eigen::Index, Eigen::Index, const Complex& v) {
    return std::abs(v) > kIntegralDropTolerance;
  });
  return {basis, std::move(m)};
}

inline HamiltonianMatrix assemble_hamiltonian(const IntegralSet& ints, const BasisPtr& basis) {
  if (basis->sector().num_particles && ints.num_orbitals() == basis->num_spatial() &&
      *basis->sector().num_particles != ints.num_electrons()) {
    throw ArgumentError("assemble_hamiltonian: basis electron count differs from integrals");
  }
  return assemble_hamiltonian(spin_expand(ints), basis);
}

// Ascending eigenpairs; vectors are columns.
struct Eigenpairs {
  RVector values;
  CMatrix vectors;

  Eigen::Index size() const noexcept { return values.size(); }
  double ground_energy() const { return values(0); }
  CVector ground_state() const { return vectors.col(0); }
  // lambda_1 - lambda_0 over distinct levels (degenerate ground manifolds
  // are skipped using the given tolerance).
  double gap(double degeneracy_tol = 1e-10) const {
    for (Eigen::Index i = 1; i < values.size(); ++i)
      if (values(i) - values(0) > degeneracy_tol) return values(i) - values(0);
    return 0.0;
  }
  double spectral_norm() const {
    return std::max(std::abs(values(0)), std::abs(values(values.size() - 1)));
  }
};

inline Eigenpairs exact_eigensystem(const CMatrix& h, Eigen::Index k = -1,
                                    std::size_t max_dim = limits::kDefaultMaxDenseDim) {
  if (static_cast<std::size_t>(h.rows()) > max_dim) {
    throw CapacityError("exact_eigensystem: dimension " + std::to_string(h.rows()) +
                        " exceeds dense cap " + std::to_string(max_dim));
  }
  if (k < 0 || k > h.rows()) k = h.rows();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw DiagnosticError("exact_eigensystem: solver failed");
  return {es.eigenvalues().head(k), es.eigenvectors().leftCols(k)};
}

inline Eigenpairs exact_eigensystem(const HamiltonianMatrix& h, Eigen::Index k = -1,
                                    std::size_t max_dim = limits::kDefaultMaxDenseDim) {
  return exact_eigensystem(h.dense(), k, max_dim);
}

// Power iteration on H^2 for sectors too large for the dense oracle. Stops
// when the residual |H^2 v - mu v| <= rtol * mu, which bounds the relative
// error of the returned |lambda|_max by rtol / 2.
inline double estimate_spectral_norm(const SparseCMatrix& h, double rtol = 1e-6,
                                     int max_iter = 100000) {
  const auto n = h.rows();
  if (n == 0) return 0.0;
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(1.0 + 0.01 * (i % 7), 0.003 * (i % 5));
  v.normalize();
  double mu = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const CVector w = h * (h * v);
    mu = v.dot(w).real();
    if (mu <= 0.0) return 0.0;
    if ((w - mu * v).norm() <= rtol * mu) break;
    v = w / w.norm();
  }
  return std::sqrt(mu);
}

inline constexpr double kFockSymmetryTolerance = 1e-10;

// First line: dimension; then that many rows of reals.
inline RMatrix parse_fock_matrix(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<long> dim;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    dim = detail::parse_int(t);
    if (!dim || *dim <= 0) throw ParseError("expected positive matrix dimension", lineno);
    break;
  }
  if (!dim) throw ParseError("empty Fock matrix file");
  RMatrix f(*dim, *dim);
  long row = 0;
  while (row < *dim && std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    std::istringstream ls(line);
    long col = 0;
    for (std::string tok; ls >> tok; ++col) {
      const auto v = detail::parse_real(tok);
      if (!v) throw ParseError("non-numeric token '" + tok + "'", lineno);
      if (col >= *dim) throw ParseError("too many columns", lineno);
      f(row, col) = *v;
    }
    if (col != *dim) throw ParseError("expected " + std::to_string(*dim) + " columns", lineno);
    ++row;
  }
  if (row != *dim) {
    throw ParseError("expected " + std::to_string(*dim) + " rows, found " + std::to_string(row),
                     lineno);
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (!detail::trim(line).empty()) throw ParseError("trailing data after matrix", lineno);
  }
  const double asym = (f - f.transpose()).cwiseAbs().maxCoeff();
  if (asym > kFockSymmetryTolerance) {
    throw ConsistencyError("Fock matrix asymmetric by " + std::to_string(asym));
  }
  return 0.5 * (f + f.transpose());
}

inline RMatrix parse_fock_matrix(const std::string& text) {
  std::istringstream is(text);
  return parse_fock_matrix(is);
}

}  // namespace lgsp
