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

// core.hpp - Shared numeric types, error hierarchy and size limits.

#pragma once

#include <complex>
#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace lgsp {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using SparseCMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;

inline constexpr Complex kI{0.0, 1.0};

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A requested dimension exceeds a configured cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// An operation is incompatible with a particle-number sector.
class SectorError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what), line_(0) {}

  // 1-based line number, 0 when not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Inputs that are individually well formed but mutually inconsistent.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// A closed-form shortcut was requested outside its domain of validity.
class ApplicabilityError : public Error {
 public:
  using Error::Error;
};

// The adaptive integrator could not make progress.
class StiffnessError : public Error {
 public:
  using Error::Error;
};

// A trajectory step would make the total jump probability too large.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

class DiagnosticError : public Error {
 public:
  using Error::Error;
};

namespace limits {

inline constexpr std::size_t kDefaultMaxBasisDim = 100000;
// Dense eigensolves and dense jump operators.
inline constexpr std::size_t kDefaultMaxDenseDim = 4096;
// Vectorized superoperators are (d^2 x d^2).
inline constexpr std::size_t kDefaultMaxSuperopDim = 256;

// Basis cap, overridable through the LGSP_MAX_DIM environment variable.
inline std::size_t max_basis_dim() {
  if (const char* env = std::getenv("LGSP_MAX_DIM")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultMaxBasisDim;
}

}  // namespace limits

// Frobenius norm of the anti-Hermitian part relative to the largest entry.
inline double hermiticity_defect(const CMatrix& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

inline CMatrix to_dense(const SparseCMatrix& m) { return CMatrix(m); }

}  // namespace lgsp
