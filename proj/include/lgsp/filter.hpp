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
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "lgsp/core.hpp"

namespace lgsp {

// Band-pass window [-a, -b] with erf edges of widths delta_a, delta_b.
struct FilterParams {
  double a = 0.0;
  double b = 0.0;
  double delta_a = 0.0;
  double delta_b = 0.0;

  void validate() const {
    if (!(a > b && b > 0.0)) throw ArgumentError("FilterParams: require a > b > 0");
    if (!(delta_a > 0.0 && delta_b > 0.0)) {
      throw ArgumentError("FilterParams: smoothing widths must be positive");
    }
  }
};

// Trapezoidal grid s_l = l * ds for l in [-M_s, M_s].
class QuadratureGrid {
 public:
  QuadratureGrid() = default;
  QuadratureGrid(double truncation, int half_count) : S_(truncation), M_(half_count) {
    if (!(truncation > 0.0) || half_count < 1) {
      throw ArgumentError("QuadratureGrid: need S_s > 0 and M_s >= 1");
    }
  }

  double truncation() const noexcept { return S_; }
  int half_count() const noexcept { return M_; }
  double spacing() const noexcept { return S_ / M_; }
  int size() const noexcept { return 2 * M_ + 1; }

  // l in [-M_s, M_s].
  double node(int l) const noexcept { return l * spacing(); }
  double weight(int l) const noexcept {
    return (l == -M_ || l == M_) ? 0.5 * spacing() : spacing();
  }

  // Same S_s, node count per half-interval multiplied by factor.
  QuadratureGrid refined(int factor) const { return {S_, M_ * factor}; }

 private:
  double S_ = 1.0;
  int M_ = 1;
};

inline double filter_freq(double omega, const FilterParams& p) {
  return 0.5 * (std::erf((omega + p.a) / p.delta_a) - std::erf((omega + p.b) / p.delta_b));
}

inline Complex filter_time(double s, const FilterParams& p) {
  if (std::abs(s) < 1e-8 / p.a) return {(p.a - p.b) / (2.0 * std::numbers::pi), 0.0};
  const Complex ea = std::exp(Complex(-0.25 * p.delta_a * p.delta_a * s * s, p.a * s));
  const Complex eb = std::exp(Complex(-0.25 * p.delta_b * p.delta_b * s * s, p.b * s));
  return (ea - eb) / (2.0 * std::numbers::pi * kI * s);
}

struct FilterSetup {
  FilterParams params;
  QuadratureGrid grid;
};

// a = 2.5 |H|, delta_a = a/5, b = delta_b = gap, S_s = 10/gap,
// M_s = ceil(S_s / (pi / (2a))).
inline FilterSetup default_filter_params(double norm_h, double gap) {
  if (!(norm_h > 0.0) || !(gap > 0.0)) {
    throw ArgumentError("default_filter_params: norm and gap must be positive");
  }
  if (gap >= norm_h) {
    throw ArgumentError("default_filter_params: gap >= |H| leaves an empty filter window");
  }
  FilterParams p;
  p.a = 2.5 * norm_h;
  p.delta_a = p.a / 5.0;
  p.b = gap;
  p.delta_b = gap;
  const double S = 10.0 / gap;
  const int M = static_cast<int>(std::ceil(S / (std::numbers::pi / (2.0 * p.a))));
  return {p, QuadratureGrid(S, M)};
}

// Frequency-domain filter used by the exact eigenbasis construction.
//
// kErf evaluates filter_freq. kIdeal is 1 for w <= -gap and 0 for w >= 0;
// on (-gap, 0) it is a rescaled erf step that is continuous at both ends.
// That interpolation is a free choice, so exact gap checks only use
// spectra that avoid (-gap, 0).
class SpectralFilter {
 public:
  enum class Kind { kErf, kIdeal };

  static SpectralFilter erf(const FilterParams& p) {
    p.validate();
    SpectralFilter f;
    f.kind_ = Kind::kErf;
    f.params_ = p;
    return f;
  }

  static SpectralFilter ideal(double gap) {
    if (!(gap > 0.0)) throw ArgumentError("SpectralFilter::ideal: gap must be positive");
    SpectralFilter f;
    f.kind_ = Kind::kIdeal;
    f.gap_ = gap;
    return f;
  }

  Kind kind() const noexcept { return kind_; }
  const FilterParams& params() const noexcept { return params_; }
  double gap() const noexcept { return kind_ == Kind::kIdeal ? gap_ : params_.b; }

  double operator()(double omega) const {
    if (kind_ == Kind::kErf) return filter_freq(omega, params_);
    if (omega <= -gap_) return 1.0;
    if (omega >= 0.0) return 0.0;
    constexpr double c = 3.0;
    const double x = (omega + gap_) / gap_;
    return 0.5 * (1.0 + std::erf(c * (1.0 - 2.0 * x)) / std::erf(c));
  }

 private:
  Kind kind_ = Kind::kIdeal;
  FilterParams params_{};
  double gap_ = 1.0;
};

}  // namespace lgsp
