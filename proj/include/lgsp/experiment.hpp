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

// experiment.hpp - configuration, run modes and artifact emission for the
// command-line driver.
//
// Every run directory holds manifest.txt (resolved configuration, derived
// quantities, input digests, status), one or more series_<name>.csv files
// and a plot_<name>.svg rendered from each CSV.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lgsp/basis.hpp"
#include "lgsp/core.hpp"
#include "lgsp/filter.hpp"
#include "lgsp/integrals.hpp"
#include "lgsp/jumps.hpp"
#include "lgsp/lindblad.hpp"
#include "lgsp/quasifree.hpp"
#include "lgsp/trajectory.hpp"

namespace lgsp {

inline constexpr const char* kVersion = "0.1.0";

// 1 kcal/mol in Hartree.
inline constexpr double kChemicalAccuracy = 1.6e-3;

// Invalid or incomplete configuration; the driver exits with status 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

// t_mix^2 * gap^-1 * N^k / epsilon, logarithmic factors omitted.
inline double resource_estimate(double t_mix, double gap, double n, double epsilon, double k) {
  if (!(t_mix > 0.0 && gap > 0.0 && n > 0.0 && epsilon > 0.0 && k > 0.0)) {
    throw ArgumentError("resource_estimate: all inputs must be positive");
  }
  return t_mix * t_mix / gap * std::pow(n, k) / epsilon;
}

struct ExperimentConfig {
  std::string mode;
  std::string fcidump;
  std::string fock;
  std::optional<int> nelec;
  std::string coupling = "s1";
  int r = 1;
  std::string filter = "erf";  // erf | ideal
  std::string jumps = "exact";  // exact | quadrature
  std::optional<double> filter_a, filter_b, delta_a, delta_b;
  std::optional<double> gap;
  std::string init = "hf";
  double T = 30.0;
  double dt = 0.1;
  int ntraj = 100;
  std::uint64_t seed = 0;
  int workers = 0;
  double p_max = 0.1;
  std::string variant = "per-step";  // per-step | norm-decay
  std::string drift = "euler";  // euler | exact
  double atol = 1e-10;
  double rtol = 1e-8;
  std::optional<double> t_mix, size_n, epsilon;
  double poly_degree = 1.0;
  std::string out = "lgsp_out";

  static const std::vector<std::string>& modes() {
    static const std::vector<std::string> m{"hf-type1", "hf-type2",   "fci-density", "fci-traj",
                                            "gap",      "filter-scan", "resource"};
    return m;
  }

  void validate() const {
    auto need = [](bool ok, const std::string& what) {
      if (!ok) throw UsageError(what);
    };
    need(std::find(modes().begin(), modes().end(), mode) != modes().end(),
         "mode: expected one of hf-type1, hf-type2, fci-density, fci-traj, gap, filter-scan, "
         "resource (got '" + mode + "')");
    need(atol > 0.0, "atol: must be positive");
    need(rtol > 0.0, "rtol: must be positive");
    need(T > 0.0, "T: must be positive");
    need(dt > 0.0, "dt: must be positive");
    need(ntraj >= 1, "ntraj: must be >= 1");
    need(p_max > 0.0 && p_max <= 1.0, "p-max: must lie in (0, 1]");
    need(filter == "erf" || filter == "ideal", "filter: expected erf or ideal");
    need(jumps == "exact" || jumps == "quadrature", "jumps: expected exact or quadrature");
    need(variant == "per-step" || variant == "norm-decay", "variant: expected per-step or norm-decay");
    need(drift == "euler" || drift == "exact", "drift: expected euler or exact");
    if (gap) need(*gap > 0.0, "gap: must be positive");
    if (mode == "hf-type1" || mode == "hf-type2") {
      need(!fock.empty(), "fock: required for mode " + mode);
      need(nelec.has_value() || !fcidump.empty(), "nelec: required for mode " + mode);
    }
    if (mode == "fci-density" || mode == "fci-traj" || mode == "filter-scan") {
      need(!fcidump.empty(), "fcidump: required for mode " + mode);
    }
    if (mode == "gap") need(!fcidump.empty() || !fock.empty(), "fcidump or fock: required for mode gap");
    if (mode == "resource") {
      need(t_mix.has_value(), "t-mix: required for mode resource");
      need(gap.has_value(), "gap: required for mode resource");
      need(size_n.has_value(), "N: required for mode resource");
      need(epsilon.has_value(), "epsilon: required for mode resource");
    }
    for (const auto& f : {fcidump, fock})
      need(f.empty() || std::filesystem::exists(f), "input file not found: " + f);
  }
};

// ---------------------------------------------------------------------------
// Initial states

struct InitChoice {
  enum class Kind { kVacuum, kHf, kExcited, kRandom } kind = Kind::kHf;
  int from = 0;  // 0-based spin orbital vacated by kExcited
  int to = 0;    // 0-based spin orbital filled by kExcited
  std::uint64_t seed = 0;
};

// vacuum | hf | excited:P:Q (1-based spin orbitals, P occupied -> Q empty)
// | random:SEED
inline InitChoice parse_init(const std::string& s) {
  InitChoice choice;
  auto fail = [&] { throw UsageError("init: expected vacuum, hf, excited:P:Q or random:SEED (got '" + s + "')"); };
  if (s == "vacuum") {
    choice.kind = InitChoice::Kind::kVacuum;
  } else if (s == "hf") {
    choice.kind = InitChoice::Kind::kHf;
  } else if (s.rfind("excited:", 0) == 0) {
    choice.kind = InitChoice::Kind::kExcited;
    const auto rest = s.substr(8);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) fail();
    const auto p = detail::parse_int(rest.substr(0, colon));
    const auto q = detail::parse_int(rest.substr(colon + 1));
    if (!p || !q || *p < 1 || *q < 1) fail();
    choice.from = static_cast<int>(*p) - 1;
    choice.to = static_cast<int>(*q) - 1;
  } else if (s.rfind("random:", 0) == 0) {
    choice.kind = InitChoice::Kind::kRandom;
    const auto v = detail::parse_int(s.substr(7));
    if (!v || *v < 0) fail();
    choice.seed = static_cast<std::uint64_t>(*v);
  } else {
    fail();
  }
  return choice;
}

// Haar-random unit vector from a counter-based stream (Box-Muller).
inline CVector random_unit_vector(Eigen::Index n, std::uint64_t seed) {
  CounterRng rng(splitmix64(seed));
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    v(i) = Complex(rad * std::cos(2.0 * std::numbers::pi * u2),
                   rad * std::sin(2.0 * std::numbers::pi * u2));
  }
  return v / v.norm();
}

inline CVector initial_state(const InitChoice& choice, const SectorBasis& basis, int nelec) {
  Occupation mask = aufbau_mask(nelec);
  switch (choice.kind) {
    case InitChoice::Kind::kRandom:
      return random_unit_vector(static_cast<Eigen::Index>(basis.size()), choice.seed);
    case InitChoice::Kind::kVacuum:
      mask = 0;
      break;
    case InitChoice::Kind::kHf:
      break;
    case InitChoice::Kind::kExcited: {
      const int n = basis.num_spin_orbitals();
      if (choice.from >= n || choice.to >= n) throw UsageError("init: excitation index beyond 2L");
      if (!((mask >> choice.from) & 1U) || ((mask >> choice.to) & 1U)) {
        throw UsageError("init: excited:P:Q needs P occupied and Q empty in the aufbau state");
      }
      mask ^= (Occupation{1} << choice.from) | (Occupation{1} << choice.to);
      break;
    }
  }
  if (!basis.find(mask)) throw UsageError("init: requested determinant lies outside the basis sector");
  return basis.basis_vector(mask);
}

// ---------------------------------------------------------------------------
// Model construction shared by the modes

struct FciSetup {
  IntegralSet ints;
  CouplingKind kind = CouplingKind::kSI;
  BasisPtr basis;
  HamiltonianMatrix h;
  Eigenpairs eigs;
  double norm_h = 0.0;
  double gap = 0.0;  // Delta used by the filter
  FilterParams params;
  QuadratureGrid grid;
  CouplingSet couplings;
  std::optional<LindbladModel> model;
};

inline IntegralSet read_fcidump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("fcidump: cannot open " + path);
  return parse_fcidump(in);
}

inline RMatrix read_fock(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("fock: cannot open " + path);
  return parse_fock_matrix(in);
}

// Number-changing sets live on Fock space, the rest on the N_e sector. The
// active-space rotation is the identity since FCIDUMPs are in the MO basis.
inline FciSetup build_fci_model(const ExperimentConfig& cfg) {
  FciSetup s;
  s.ints = read_fcidump(cfg.fcidump);
  const int L = s.ints.num_orbitals();
  const int ne = cfg.nelec.value_or(s.ints.num_electrons());
  s.kind = coupling_from_string(cfg.coupling);
  const Sector sector = is_number_conserving(s.kind) ? Sector::fixed(ne) : Sector::fock();
  s.basis = enumerate_basis(L, sector);
  s.h = assemble_hamiltonian(spin_expand(s.ints), s.basis);
  s.eigs = exact_eigensystem(s.h);
  s.norm_h = s.eigs.spectral_norm();
  s.gap = cfg.gap.value_or(s.eigs.gap());
  const auto def = default_filter_params(s.norm_h, s.gap);
  s.params = def.params;
  s.grid = def.grid;
  if (cfg.filter_a) s.params.a = *cfg.filter_a;
  if (cfg.filter_b) s.params.b = *cfg.filter_b;
  if (cfg.delta_a) s.params.delta_a = *cfg.delta_a;
  if (cfg.delta_b) s.params.delta_b = *cfg.delta_b;
  s.params.validate();
  if (cfg.filter_a) {
    s.grid = QuadratureGrid(s.grid.truncation(),
                            static_cast<int>(std::ceil(s.grid.truncation() /
                                                       (std::numbers::pi / (2.0 * s.params.a)))));
  }
  s.couplings = build_coupling_set(s.kind, ne, cfg.r, s.basis);
  std::vector<JumpOperator> jumps;
  if (cfg.filter == "ideal") {
    jumps = exact_jumps(s.eigs, s.couplings, SpectralFilter::ideal(s.gap));
  } else if (cfg.jumps == "quadrature") {
    jumps = quadrature_jumps(s.eigs, s.couplings, s.params, s.grid);
  } else {
    jumps = exact_jumps(s.eigs, s.couplings, SpectralFilter::erf(s.params));
  }
  s.model.emplace(s.basis, s.h, std::move(jumps));
  return s;
}

inline FockModel build_fock_model(const ExperimentConfig& cfg) {
  int ne = 0;
  if (cfg.nelec) {
    ne = *cfg.nelec;
  } else {
    ne = read_fcidump(cfg.fcidump).num_electrons();
  }
  return FockModel(read_fock(cfg.fock), ne);
}

// ---------------------------------------------------------------------------
// Output

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// FNV-1a 64 of a file's bytes, hex.
inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Line plot of columns 1.. against column 0. Non-finite or (on log axes)
// non-positive points are skipped.
inline std::string render_svg(const Table& t, const std::string& title, bool log_y) {
  constexpr double W = 720, H = 440, ml = 70, mr = 160, mt = 40, mb = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
  auto usable = [&](double y) { return std::isfinite(y) && (!log_y || y > 0.0); };
  for (const auto& r : t.rows) {
    x0 = std::min(x0, r[0]);
    x1 = std::max(x1, r[0]);
    for (std::size_t c = 1; c < r.size(); ++c)
      if (usable(r[c])) {
        y0 = std::min(y0, ty(r[c]));
        y1 = std::max(y1, ty(r[c]));
      }
  }
  if (!std::isfinite(x0) || !std::isfinite(y0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (ty(y) - y0) / (y1 - y0) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::ostringstream s;
  s << std::setprecision(6);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
    << "</text>\n";
  s << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\""
    << H - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    const double sx = ml + (W - ml - mr) * i / 4.0, sy = H - mb - (H - mt - mb) * i / 4.0;
    s << "<text x=\"" << sx << "\" y=\"" << H - mb + 18 << "\" text-anchor=\"middle\">" << fx
      << "</text>\n";
    s << "<text x=\"" << ml - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">"
      << (log_y ? "1e" : "") << fy << "</text>\n";
  }
  s << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
    << t.header[0] << "</text>\n";
  for (std::size_t c = 1; c < t.header.size(); ++c) {
    const char* col = colors[(c - 1) % 10];
    s << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : t.rows)
      if (usable(r[c])) s << px(r[0]) << ',' << py(r[c]) << ' ';
    s << "\"/>\n";
    const double ly = mt + 14.0 * static_cast<double>(c);
    s << "<line x1=\"" << W - mr + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - mr + 30
      << "\" y2=\"" << ly - 4 << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << W - mr + 34 << "\" y=\"" << ly << "\">" << t.header[c] << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

class RunDirectory {
 public:
  explicit RunDirectory(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  const std::filesystem::path& path() const noexcept { return dir_; }
  const std::vector<std::string>& files() const noexcept { return files_; }

  // Writes series_<name>.csv and, when plot_columns is non-empty, plot_<name>.svg
  // using column 0 against the listed columns.
  void series(const std::string& name, const Table& t, const std::vector<std::string>& plot_columns,
              bool log_y = false) {
    const auto csv = dir_ / ("series_" + name + ".csv");
    std::ofstream out(csv);
    for (std::size_t c = 0; c < t.header.size(); ++c) out << (c ? "," : "") << t.header[c];
    out << '\n';
    for (const auto& r : t.rows) {
      for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_double(r[c]);
      out << '\n';
    }
    files_.push_back(csv.filename().string());
    if (plot_columns.empty()) return;
    Table sub;
    std::vector<std::size_t> idx{0};
    for (const auto& c : plot_columns) {
      const auto it = std::find(t.header.begin(), t.header.end(), c);
      if (it != t.header.end()) idx.push_back(static_cast<std::size_t>(it - t.header.begin()));
    }
    for (auto i : idx) sub.header.push_back(t.header[i]);
    for (const auto& r : t.rows) {
      std::vector<double> row;
      for (auto i : idx) row.push_back(r[i]);
      sub.rows.push_back(std::move(row));
    }
    const auto svg = dir_ / ("plot_" + name + ".svg");
    std::ofstream(svg) << render_svg(sub, name, log_y);
    files_.push_back(svg.filename().string());
  }

  // Row-major complex matrix with a gauge tag.
  void matrix(const std::string& name, const CMatrix& m, const std::string& gauge) {
    const auto p = dir_ / (name + ".csv");
    std::ofstream out(p);
    out << "# gauge=" << gauge << "\ni,j,re,im\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        out << i + 1 << ',' << j + 1 << ',' << format_double(m(i, j).real()) << ','
            << format_double(m(i, j).imag()) << '\n';
    files_.push_back(p.filename().string());
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

struct ExperimentReport {
  int exit_code = 0;
  std::string message;
  std::filesystem::path out;
  std::vector<std::string> files;
  std::vector<std::pair<std::string, std::string>> results;  // derived quantities

  std::optional<std::string> result(const std::string& key) const {
    for (const auto& [k, v] : results)
      if (k == key) return v;
    return std::nullopt;
  }
};

namespace detail {

struct Run {
  const ExperimentConfig& cfg;
  RunDirectory& dir;
  ExperimentReport& rep;

  void note(const std::string& k, double v) { rep.results.emplace_back(k, format_double(v)); }
  void note(const std::string& k, const std::string& v) { rep.results.emplace_back(k, v); }

  OdeOptions ode() const {
    OdeOptions o;
    o.atol = cfg.atol;
    o.rtol = cfg.rtol;
    return o;
  }

  std::vector<double> grid() const { return uniform_times(0.0, cfg.T, cfg.dt); }

  void hf_type1() {
    const FockModel m = build_fock_model(cfg);
    const double delta = cfg.gap.value_or(m.ideal_gap());
    const auto f = SpectralFilter::ideal(delta);
    const auto bc = bc_matrices(m, f);
    const auto n = m.dim();
    note("dim", static_cast<double>(n));
    note("nelec", m.num_electrons());
    note("mu", m.mu());
    note("ideal_gap", delta);

    const InitChoice init = parse_init(cfg.init);
    CMatrix p0;
    switch (init.kind) {
      case InitChoice::Kind::kVacuum: p0 = CMatrix::Zero(n, n); break;
      case InitChoice::Kind::kHf: p0 = m.aufbau_rdm(); break;
      case InitChoice::Kind::kExcited: {
        if (init.from >= n || init.to >= n || init.from >= m.num_electrons() ||
            init.to < m.num_electrons()) {
          throw UsageError("init: excited:P:Q needs P <= N_e < Q <= 2L");
        }
        CMatrix d = m.to_mo(m.aufbau_rdm());
        d(init.from, init.from) = 0.0;
        d(init.to, init.to) = 1.0;
        p0 = m.from_mo(d);
        break;
      }
      case InitChoice::Kind::kRandom: {
        // Random unitary from the QR of a counter-seeded Gaussian matrix;
        // spectrum drawn uniformly in [0, 1].
        CMatrix g(n, n);
        const CVector v = random_unit_vector(n * n, init.seed);
        for (Eigen::Index i = 0; i < n * n; ++i) g(i) = v(i);
        const CMatrix q = Eigen::HouseholderQR<CMatrix>(g).householderQ();
        CounterRng rng(init.seed ^ 0x5bd1e995ULL);
        CVector w(n);
        for (Eigen::Index i = 0; i < n; ++i) w(i) = rng.uniform();
        p0 = q * w.asDiagonal() * q.adjoint();
        break;
      }
    }
    const CMatrix pstar = bc.B;
    const double e_star = (m.F() * pstar).trace().real();
    const double e0 = (m.F() * p0).trace().real();
    note("e_star", e_star);
    note("e0", e0);
    const auto traj = propagate_rdm(m, bc, p0, grid(), ode());
    Table t{{"t", "energy", "energy_error", "normalized_error", "exp_minus_t", "rdm_distance"}, {}};
    for (const auto& s : traj) {
      const double e = (m.F() * s.P).trace().real();
      const double norm = e0 != e_star ? (e - e_star) / (e0 - e_star)
                                       : std::numeric_limits<double>::quiet_NaN();
      t.rows.push_back({s.t, e, e - e_star, norm, std::exp(-s.t), (s.P - pstar).norm()});
    }
    dir.series("energy", t, {"normalized_error", "exp_minus_t"}, true);
    dir.matrix("rdm_final", m.to_mo(traj.back().P), "molecular-orbital");
  }

  void hf_type2() {
    const FockModel m = build_fock_model(cfg);
    const int ne = m.num_electrons();
    const auto L = static_cast<int>(m.dim() / 2);
    if (2 * L != m.dim()) throw UsageError("fock: dimension must be even (2L)");
    const auto basis = enumerate_basis(L, Sector::fixed(ne));
    const double delta = cfg.gap.value_or(m.ideal_gap());
    const auto model =
        build_hf_manybody_model(m, HfKind::kTypeII, SpectralFilter::ideal(delta), basis);
    const CVector psi0 = initial_state(parse_init(cfg.init), *basis, ne);
    ObservableOptions obs;
    obs.ground_state = basis->basis_vector(aufbau_mask(ne));
    obs.record_rdm = true;
    note("dim", static_cast<double>(basis->size()));
    note("nelec", ne);
    const auto res = propagate_density(model, psi0 * psi0.adjoint(), grid(), obs, ode());
    write_density_series(res.series, aufbau_energy(m), "aufbau");
    Table rdm{{"t"}, {}};
    const auto n = m.dim();
    for (Eigen::Index r = 0; r < n; ++r) rdm.header.push_back("n" + std::to_string(r + 1));
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index s = r + 1; s < n; ++s)
        rdm.header.push_back("abs_p" + std::to_string(s + 1) + "_" + std::to_string(r + 1));
    for (const auto& o : res.series.samples) {
      std::vector<double> row{o.t};
      for (Eigen::Index r = 0; r < n; ++r) row.push_back((*o.rdm)(r, r).real());
      for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index s = r + 1; s < n; ++s) row.push_back(std::abs((*o.rdm)(s, r)));
      rdm.rows.push_back(std::move(row));
    }
    std::vector<std::string> occ(rdm.header.begin() + 1, rdm.header.begin() + 1 + n);
    dir.series("rdm", rdm, occ);
    dir.matrix("rdm_final", *res.series.back().rdm, "molecular-orbital");
    check_cptp(res.series);
  }

  static double aufbau_energy(const FockModel& m) {
    return m.eps().head(m.num_electrons()).sum();
  }

  void write_density_series(const ObservableSeries& s, double e_ref, const std::string& ref_name) {
    Table t{{"t", "energy", "energy_error", "overlap", "trace", "purity", "min_eigenvalue"}, {}};
    for (const auto& o : s.samples)
      t.rows.push_back({o.t, o.energy, o.energy - e_ref, o.overlap, o.trace, o.purity,
                        o.min_eigenvalue});
    dir.series("observables", t, {"energy_error", "overlap"});
    note("reference", ref_name);
    note("final_energy", s.back().energy);
    note("final_energy_error", s.back().energy - e_ref);
    note("final_overlap", s.back().overlap);
  }

  void check_cptp(const ObservableSeries& s) {
    double tr = 0.0, mn = 0.0;
    for (const auto& o : s.samples) {
      tr = std::max(tr, std::abs(o.trace - 1.0));
      mn = std::min(mn, o.min_eigenvalue);
    }
    note("max_trace_defect", tr);
    note("min_eigenvalue", mn);
    if (tr > 1e-8 || mn < -1e-8) {
      throw DiagnosticError("CPTP check failed: trace defect " + format_double(tr) +
                            ", min eigenvalue " + format_double(mn));
    }
  }

  void describe(const FciSetup& s) {
    note("dim", static_cast<double>(s.basis->size()));
    note("sector", s.basis->sector().is_fock() ? "fock" : "fixed");
    note("lambda0", s.eigs.ground_energy());
    note("norm_h", s.norm_h);
    note("gap", s.gap);
    note("filter_a", s.params.a);
    note("filter_b", s.params.b);
    note("delta_a", s.params.delta_a);
    note("delta_b", s.params.delta_b);
    note("S_s", s.grid.truncation());
    note("M_s", s.grid.half_count());
    note("num_jumps", static_cast<double>(s.couplings.size()));
  }

  void fci_density() {
    const FciSetup s = build_fci_model(cfg);
    describe(s);
    const int ne = cfg.nelec.value_or(s.ints.num_electrons());
    const CVector psi0 = initial_state(parse_init(cfg.init), *s.basis, ne);
    ObservableOptions obs;
    obs.ground_state = s.eigs.ground_state();
    const auto res = propagate_density(*s.model, psi0 * psi0.adjoint(), grid(), obs, ode());
    write_density_series(res.series, s.eigs.ground_energy(), "lambda0");
    check_cptp(res.series);
    note("chemical_accuracy",
         std::abs(res.series.back().energy - s.eigs.ground_energy()) <= kChemicalAccuracy ? "yes"
                                                                                          : "no");
  }

  void fci_traj() {
    const FciSetup s = build_fci_model(cfg);
    describe(s);
    const int ne = cfg.nelec.value_or(s.ints.num_electrons());
    const CVector psi0 = initial_state(parse_init(cfg.init), *s.basis, ne);
    TrajectoryConfig tc;
    tc.dt = cfg.dt;
    tc.T = cfg.T;
    tc.ntraj = cfg.ntraj;
    tc.seed = cfg.seed;
    tc.workers = cfg.workers;
    tc.p_max = cfg.p_max;
    tc.variant = cfg.variant == "norm-decay" ? TrajectoryVariant::kNormDecay : TrajectoryVariant::kPerStep;
    tc.drift = cfg.drift == "exact" ? DriftScheme::kExact : DriftScheme::kEuler;
    tc.record_density = false;
    const auto ens = run_ensemble(*s.model, psi0, tc, s.eigs.ground_state());
    ObservableOptions obs;
    obs.ground_state = s.eigs.ground_state();
    const auto exact = propagate_density(*s.model, psi0 * psi0.adjoint(), ens.times, obs, ode());
    Table t{{"t", "energy", "energy_se", "overlap", "overlap_se", "exact_energy", "exact_overlap"}, {}};
    double err = 0.0;
    for (std::size_t i = 0; i < ens.times.size(); ++i) {
      const auto& o = exact.series.samples[i];
      t.rows.push_back({ens.times[i], ens.energy[i], ens.energy_stderr[i], ens.overlap[i],
                        ens.overlap_stderr[i], o.energy, o.overlap});
      err += std::abs(ens.overlap[i] - o.overlap);
    }
    dir.series("ensemble", t, {"overlap", "exact_overlap"});
    note("ntraj", cfg.ntraj);
    note("seed", std::to_string(cfg.seed));
    note("time_averaged_overlap_error", err / static_cast<double>(ens.times.size()));
    note("final_overlap", ens.overlap.back());
  }

  void gap_mode() {
    if (!cfg.fock.empty()) {
      const FockModel m = build_fock_model(cfg);
      const auto L = static_cast<int>(m.dim() / 2);
      const double delta = cfg.gap.value_or(m.ideal_gap());
      const auto f = SpectralFilter::ideal(delta);
      const auto kind = coupling_from_string(cfg.coupling);
      if (kind != CouplingKind::kTypeI && kind != CouplingKind::kTypeII) {
        throw UsageError("coupling: gap mode with --fock supports type1 or type2");
      }
      const bool t1 = kind == CouplingKind::kTypeI;
      const auto basis = enumerate_basis(L, t1 ? Sector::fock() : Sector::fixed(m.num_electrons()));
      const auto model = build_hf_manybody_model(m, t1 ? HfKind::kTypeI : HfKind::kTypeII, f, basis);
      report_gap(model);
      return;
    }
    const FciSetup s = build_fci_model(cfg);
    describe(s);
    report_gap(*s.model);
  }

  void report_gap(const LindbladModel& model) {
    const CMatrix l = vectorized_generator(model);
    Eigen::ComplexEigenSolver<CMatrix> es(l, false);
    std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) {
      return a.real() != b.real() ? a.real() > b.real() : a.imag() < b.imag();
    });
    const double gap = spectral_gap(l);
    const auto dp = dissipative_parent_hamiltonian(model);
    note("dim", static_cast<double>(model.dim()));
    note("lindblad_gap", gap);
    note("hdp_gap", dp.gap);
    note("hdp_ground_level", dp.ground_level);
    note("commutator_norm", dp.commutator_norm);
    Table t{{"index", "re", "im"}, {}};
    for (std::size_t i = 0; i < ev.size(); ++i)
      t.rows.push_back({static_cast<double>(i), ev[i].real(), ev[i].imag()});
    dir.series("spectrum", t, {"re"});
  }

  void filter_scan() {
    ExperimentConfig c = cfg;
    c.filter = "erf";
    c.jumps = "exact";
    const FciSetup s = build_fci_model(c);
    describe(s);
    const auto f = SpectralFilter::erf(s.params);
    const auto exact = exact_jumps(s.eigs, s.couplings, f);
    Table t{{"M_s", "ds", "max_rel_error", "mean_rel_error"}, {}};
    for (int level : {8, 4, 2, 1}) {
      const QuadratureGrid g(s.grid.truncation(), std::max(1, s.grid.half_count() / level));
      const auto q = quadrature_jumps(s.eigs, s.couplings, s.params, g);
      double mx = 0.0, mean = 0.0;
      for (std::size_t k = 0; k < q.size(); ++k) {
        const double e = (q[k].matrix - exact[k].matrix).norm() / exact[k].matrix.norm();
        mx = std::max(mx, e);
        mean += e / static_cast<double>(q.size());
      }
      t.rows.push_back({static_cast<double>(g.half_count()), g.spacing(), mx, mean});
    }
    dir.series("refinement", t, {"max_rel_error", "mean_rel_error"}, true);
    note("default_max_rel_error", t.rows.back()[2]);

    Table w{{"omega", "filter", "quadrature"}, {}};
    const double lo = -1.5 * s.params.a, hi = 0.5 * s.params.a;
    for (int i = 0; i <= 400; ++i) {
      const double om = lo + (hi - lo) * i / 400.0;
      w.rows.push_back({om, filter_freq(om, s.params), quadrature_response(om, s.params, s.grid).real()});
    }
    dir.series("filter", w, {"filter", "quadrature"});
  }

  void resource() {
    const double est = resource_estimate(*cfg.t_mix, *cfg.gap, *cfg.size_n, *cfg.epsilon, cfg.poly_degree);
    note("estimate", est);
    note("formula", "t_mix^2 * gap^-1 * N^k / epsilon (logarithmic factors omitted)");
    Table t{{"t_mix", "gap", "N", "epsilon", "k", "estimate"},
            {{*cfg.t_mix, *cfg.gap, *cfg.size_n, *cfg.epsilon, cfg.poly_degree, est}}};
    dir.series("resource", t, {});
  }
};

inline void write_manifest(const ExperimentConfig& cfg, const ExperimentReport& rep,
                           const std::filesystem::path& dir, double seconds) {
  std::ofstream m(dir / "manifest.txt");
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("default"); };
  m << "# lgsp run manifest\n";
  m << "lgsp_version = " << kVersion << "\n";
  m << "eigen_version = " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.'
    << EIGEN_MINOR_VERSION << "\n";
  m << "compiler = " << __VERSION__ << "\n";
  m << "status = " << (rep.exit_code == 0 ? "ok" : "failed") << "\n";
  if (rep.exit_code != 0) {
    m << "error = " << rep.message << "\n";
    m << "partial_outputs = " << (rep.files.empty() ? "none" : "yes") << "\n";
  }
  m << "wall_seconds = " << format_double(seconds) << "\n";
  m << "\n[config]\n";
  m << "mode = " << cfg.mode << "\n";
  m << "fcidump = " << cfg.fcidump << "\n";
  if (!cfg.fcidump.empty() && std::filesystem::exists(cfg.fcidump))
    m << "fcidump_fnv1a64 = " << file_digest(cfg.fcidump) << "\n";
  m << "fock = " << cfg.fock << "\n";
  if (!cfg.fock.empty() && std::filesystem::exists(cfg.fock))
    m << "fock_fnv1a64 = " << file_digest(cfg.fock) << "\n";
  m << "nelec = " << (cfg.nelec ? std::to_string(*cfg.nelec) : "from-fcidump") << "\n";
  m << "coupling = " << cfg.coupling << "\nr = " << cfg.r << "\n";
  m << "filter = " << cfg.filter << "\njumps = " << cfg.jumps << "\n";
  m << "filter_a = " << opt(cfg.filter_a) << "\nfilter_b = " << opt(cfg.filter_b) << "\n";
  m << "delta_a = " << opt(cfg.delta_a) << "\ndelta_b = " << opt(cfg.delta_b) << "\n";
  m << "gap = " << opt(cfg.gap) << "\n";
  m << "init = " << cfg.init << "\n";
  m << "T = " << format_double(cfg.T) << "\ndt = " << format_double(cfg.dt) << "\n";
  m << "ntraj = " << cfg.ntraj << "\nseed = " << cfg.seed << "\n";
  m << "trajectory_seed_rule = splitmix64(seed ^ splitmix64(index + 1))\n";
  m << "p_max = " << format_double(cfg.p_max) << "\nvariant = " << cfg.variant
    << "\ndrift = " << cfg.drift << "\n";
  m << "atol = " << format_double(cfg.atol) << "\nrtol = " << format_double(cfg.rtol) << "\n";
  m << "max_basis_dim = " << limits::max_basis_dim() << "\n";
  if (cfg.mode == "resource") {
    m << "t_mix = " << opt(cfg.t_mix) << "\nN = " << opt(cfg.size_n) << "\nepsilon = "
      << opt(cfg.epsilon) << "\nk = " << format_double(cfg.poly_degree) << "\n";
  }
  m << "\n[results]\n";
  for (const auto& [k, v] : rep.results) m << k << " = " << v << "\n";
  m << "\n[files]\n";
  for (const auto& f : rep.files) m << f << "\n";
}

}  // namespace detail

// Exit code 0 on success, 2 for configuration errors, 1 for numerical
// failures. The manifest is written in every case where the output
// directory could be created.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.out = cfg.out;
  try {
    cfg.validate();
  } catch (const Error& e) {
    rep.exit_code = 2;
    rep.message = e.what();
    return rep;
  }
  const auto start = std::chrono::steady_clock::now();
  std::optional<RunDirectory> dir;
  try {
    dir.emplace(cfg.out);
  } catch (const std::exception& e) {
    rep.exit_code = 2;
    rep.message = std::string("out: cannot create directory: ") + e.what();
    return rep;
  }
  detail::Run run{cfg, *dir, rep};
  try {
    if (cfg.mode == "hf-type1") run.hf_type1();
    else if (cfg.mode == "hf-type2") run.hf_type2();
    else if (cfg.mode == "fci-density") run.fci_density();
    else if (cfg.mode == "fci-traj") run.fci_traj();
    else if (cfg.mode == "gap") run.gap_mode();
    else if (cfg.mode == "filter-scan") run.filter_scan();
    else run.resource();
  } catch (const UsageError& e) {
    rep.exit_code = 2;
    rep.message = e.what();
  } catch (const ArgumentError& e) {
    rep.exit_code = 2;
    rep.message = e.what();
  } catch (const Error& e) {
    rep.exit_code = 1;
    rep.message = e.what();
  } catch (const std::exception& e) {
    rep.exit_code = 1;
    rep.message = std::string("unexpected failure: ") + e.what();
  }
  rep.files = dir->files();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail::write_manifest(cfg, rep, dir->path(), secs);
  rep.files.insert(rep.files.begin(), "manifest.txt");
  return rep;
}

}  // namespace lgsp
