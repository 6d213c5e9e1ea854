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

// Independent reference constructions shared by the unit tests. Nothing
// here calls into the library's ladder-sign or assembly code.

#pragma once

#include <cmath>
#include <complex>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "json.hpp"

namespace oracle {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Jordan-Wigner annihilator on n modes: state index bit p = occupation of
// mode p, string of Z factors over modes below p.
inline CMatrix jw_annihilate(int p, int n) {
  CMatrix z(2, 2), s(2, 2), id = CMatrix::Identity(2, 2);
  z << 1, 0, 0, -1;
  s << 0, 1, 0, 0;
  CMatrix out = CMatrix::Identity(1, 1);
  for (int q = n - 1; q >= 0; --q) {
    const CMatrix& f = q == p ? s : (q < p ? z : id);
    out = Eigen::kroneckerProduct(out, f).eval();
  }
  return out;
}

inline CMatrix jw_create(int p, int n) { return jw_annihilate(p, n).adjoint(); }

// Second-quantized Hamiltonian from spin-orbital tensors, by explicit
// Jordan-Wigner matrix products on the full Fock space.
template <class TFn, class SFn>
CMatrix jw_hamiltonian(int n, TFn&& t, SFn&& s, double ecore) {
  const int dim = 1 << n;
  std::vector<CMatrix> a(n), ad(n);
  for (int p = 0; p < n; ++p) {
    a[p] = jw_annihilate(p, n);
    ad[p] = a[p].adjoint();
  }
  CMatrix h = ecore * CMatrix::Identity(dim, dim);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (t(p, q) != 0.0) h += t(p, q) * ad[p] * a[q];
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const CMatrix pq = ad[p] * ad[q];
      for (int r = 0; r < n; ++r) {
        const CMatrix pqr = pq * a[r];
        for (int u = 0; u < n; ++u) {
          const double v = s(p, q, r, u);
          if (v != 0.0) h += 0.5 * v * pqr * a[u];
        }
      }
    }
  return h;
}

inline CMatrix random_hermitian(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return scale * 0.5 * (m + m.adjoint());
}

inline CMatrix random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(m);
  return qr.householderQ();
}

inline CVector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v / v.norm();
}

// Random density matrix: X X^+ / Tr.
inline CMatrix random_density(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = Complex(g(rng), g(rng));
  CMatrix r = x * x.adjoint();
  return r / r.trace();
}

inline std::string fixture(const std::string& name) {
  return std::string(LGSP_FIXTURE_DIR) + "/" + name;
}

inline nlohmann::json reference(const std::string& molecule) {
  std::ifstream in(fixture(molecule + ".reference.json"));
  return nlohmann::json::parse(in);
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
