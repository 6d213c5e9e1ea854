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

// ode.hpp - adaptive Dormand-Prince 5(4) integrator for Eigen-valued ODEs.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lgsp/core.hpp"

namespace lgsp {

struct OdeOptions {
  double atol = 1e-10;
  double rtol = 1e-8;
  double initial_step = 0.0;  // 0 selects a heuristic first step
  double max_step = std::numeric_limits<double>::infinity();
  double min_step = 1e-14;
  long max_steps = 50'000'000;

  void validate() const {
    if (!(atol > 0.0) || !(rtol > 0.0)) throw ArgumentError("ODE tolerances must be positive");
  }
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

namespace detail {

template <class M>
double scaled_rms(const M& err, const M& y0, const M& y1, double atol, double rtol) {
  const auto scale = (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array());
  const double s = (err.cwiseAbs().array() / scale).square().sum();
  return std::sqrt(s / static_cast<double>(err.size()));
}

}  // namespace detail

// Integrates y' = f(t, y) from t0 through every time in `samples`
// (ascending, >= t0), landing exactly on each and calling observe(t, y).
// `post` is applied to each accepted state. Throws StiffnessError when the
// step falls below min_step; y then holds the last accepted state.
template <class M, class Rhs, class Observe, class Post>
OdeStats dopri5(Rhs&& f, M& y, double t0, const std::vector<double>& samples,
                Observe&& observe, Post&& post, const OdeOptions& opt = {}) {
  opt.validate();
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  OdeStats st;
  double t = t0;
  M k1 = f(t, y);
  ++st.rhs_evals;

  double h = opt.initial_step;
  if (h <= 0.0) {
    const double d0 = y.norm(), d1 = k1.norm();
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, 0.1);
  }

  for (double target : samples) {
    if (target < t - 1e-14 * std::max(1.0, std::abs(t))) {
      throw ArgumentError("dopri5: sample times must be ascending and >= t0");
    }
    while (t < target) {
      if (st.accepted + st.rejected >= opt.max_steps) {
        throw StiffnessError("dopri5: step budget exhausted at t = " + std::to_string(t));
      }
      h = std::min(h, opt.max_step);
      const double h_free = h;
      bool last = false;
      if (t + h >= target || target - (t + h) < 1e-12 * std::max(1.0, std::abs(target))) {
        h = target - t;
        last = true;
      }
      const M k2 = f(t + c2 * h, M(y + h * a21 * k1));
      const M k3 = f(t + c3 * h, M(y + h * (a31 * k1 + a32 * k2)));
      const M k4 = f(t + c4 * h, M(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
      const M k5 = f(t + c5 * h, M(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
      const M k6 =
          f(t + h, M(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
      M y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const M k7 = f(t + h, y1);
      st.rhs_evals += 6;
      const M err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double en = detail::scaled_rms(err, y, y1, opt.atol, opt.rtol);

      if (en <= 1.0) {
        t = last ? target : t + h;
        post(y1);
        y = std::move(y1);
        // post() may modify y, so k1 is re-evaluated instead of reusing k7.
        k1 = f(t, y);
        ++st.rhs_evals;
        ++st.accepted;
        const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        h = last ? std::max(h * fac, h_free) : h * fac;
      } else {
        ++st.rejected;
        const double fac = std::isfinite(en) ? std::clamp(0.9 * std::pow(en, -0.2), 0.2, 1.0) : 0.2;
        h *= fac;
        if (h < opt.min_step) {
          throw StiffnessError("dopri5: step size underflow at t = " + std::to_string(t) +
                               "; state holds the last accepted step");
        }
      }
    }
    observe(t, static_cast<const M&>(y));
  }
  return st;
}

template <class M, class Rhs, class Observe>
OdeStats dopri5(Rhs&& f, M& y, double t0, const std::vector<double>& samples,
                Observe&& observe, const OdeOptions& opt = {}) {
  return dopri5(std::forward<Rhs>(f), y, t0, samples, std::forward<Observe>(observe),
                [](M&) {}, opt);
}

// t0, t0 + dt, ..., t_end (t_end included even when not a multiple of dt).
inline std::vector<double> uniform_times(double t0, double t_end, double dt) {
  if (!(dt > 0.0) || t_end < t0) throw ArgumentError("uniform_times: need dt > 0, t_end >= t0");
  std::vector<double> out;
  const long n = static_cast<long>(std::floor((t_end - t0) / dt + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(t0 + static_cast<double>(i) * dt);
  if (t_end - out.back() > 1e-9 * dt) out.push_back(t_end);
  return out;
}

}  // namespace lgsp
