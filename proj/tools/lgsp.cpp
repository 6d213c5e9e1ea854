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

// lgsp: command-line driver for dissipative ground-state preparation runs.
//
//   lgsp --mode fci-density --fcidump h2.fcidump --coupling s1 --r 1 --T 30 --out run/
//
// Options may also come from a `key = value` file given with --config;
// command-line flags take precedence. Exit status: 0 success, 1 numerical
// failure, 2 usage error.

#include <CLI11.hpp>

#include <iostream>

#include "lgsp/experiment.hpp"

namespace {

template <class T>
void bind_optional(CLI::App& app, const std::string& flag, std::optional<T>& target,
                   const std::string& help) {
  app.add_option_function<T>(flag, [&target](const T& v) { target = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  lgsp::ExperimentConfig cfg;
  CLI::App app{"Lindblad ground-state preparation simulator"};
  app.set_config("--config", "", "key = value file mirroring the long flags");
  app.set_version_flag("--version", lgsp::kVersion);

  app.add_option("--mode", cfg.mode, "hf-type1 | hf-type2 | fci-density | fci-traj | gap | filter-scan | resource")
      ->required();
  app.add_option("--fcidump", cfg.fcidump, "FCIDUMP integral file (MO basis)");
  app.add_option("--fock", cfg.fock, "Fock matrix text file (2L x 2L)");
  bind_optional(app, "--nelec", cfg.nelec, "electron count (default: NELEC from the FCIDUMP)");
  app.add_option("--coupling", cfg.coupling, "type1 | type2 | s1 | s2 | t2")->capture_default_str();
  app.add_option("--r", cfg.r, "reduced coupling radius")->capture_default_str();
  app.add_option("--filter", cfg.filter, "erf | ideal")->capture_default_str();
  app.add_option("--jumps", cfg.jumps, "exact | quadrature")->capture_default_str();
  bind_optional(app, "--filter-a", cfg.filter_a, "filter upper cutoff a");
  bind_optional(app, "--filter-b", cfg.filter_b, "filter lower cutoff b");
  bind_optional(app, "--delta-a", cfg.delta_a, "width of the upper erf edge");
  bind_optional(app, "--delta-b", cfg.delta_b, "width of the lower erf edge");
  bind_optional(app, "--gap", cfg.gap, "spectral gap override (Delta)");
  app.add_option("--init", cfg.init, "vacuum | hf | excited:P:Q | random:SEED")->capture_default_str();
  app.add_option("--T", cfg.T, "time horizon")->capture_default_str();
  app.add_option("--dt", cfg.dt, "sample spacing / trajectory step")->capture_default_str();
  app.add_option("--ntraj", cfg.ntraj, "number of trajectories")->capture_default_str();
  app.add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  app.add_option("--workers", cfg.workers, "trajectory worker threads (0 = hardware)")->capture_default_str();
  app.add_option("--p-max", cfg.p_max, "largest allowed jump probability per step")->capture_default_str();
  app.add_option("--variant", cfg.variant, "per-step | norm-decay")->capture_default_str();
  app.add_option("--drift", cfg.drift, "euler | exact")->capture_default_str();
  app.add_option("--atol", cfg.atol, "integrator absolute tolerance")->capture_default_str();
  app.add_option("--rtol", cfg.rtol, "integrator relative tolerance")->capture_default_str();
  bind_optional(app, "--t-mix", cfg.t_mix, "mixing time (resource mode)");
  bind_optional(app, "--N", cfg.size_n, "system size N (resource mode)");
  bind_optional(app, "--epsilon", cfg.epsilon, "target precision (resource mode)");
  app.add_option("--k", cfg.poly_degree, "polynomial degree of the jump cost (resource mode)")
      ->capture_default_str();
  app.add_option("--out", cfg.out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto rep = lgsp::run_experiment(cfg);
  if (rep.exit_code != 0) {
    std::cerr << "lgsp: " << rep.message << "\n";
    return rep.exit_code;
  }
  for (const auto& [k, v] : rep.results) std::cout << k << " = " << v << "\n";
  std::cout << "wrote " << rep.files.size() << " files to " << rep.out.string() << "\n";
  return 0;
}
