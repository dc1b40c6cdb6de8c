#pragma once

// Executes the tasks of a config in declaration order and writes plot-ready
// CSV plus a JSON report. Output bytes depend only on the config and options.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pawclock/experiment/build.hpp"
#include "pawclock/experiment/config.hpp"
#include "pawclock/pawclock.hpp"

namespace pawclock::experiment {

/// 17 significant digits; "nan" / "inf" / "-inf" for non-finite values.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add(const std::vector<double>& row) {
    if (row.size() != columns_.size()) throw DimensionError("CsvTable: row width does not match the header");
    rows_.push_back(row);
  }

  std::size_t rows() const { return rows_.size(); }

  std::string render(const std::string& comment) const {
    std::string out = "# " + comment + "\n";
    for (std::size_t k = 0; k < columns_.size(); ++k) out += (k ? "," : "") + columns_[k];
    out += "\n";
    for (const auto& r : rows_) {
      for (std::size_t k = 0; k < r.size(); ++k) out += (k ? "," : "") + format_number(r[k]);
      out += "\n";
    }
    return out;
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

/// One numeric verdict: passed iff value <= tolerance.
struct Check {
  std::string invariant;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct TaskOutcome {
  std::size_t index = 0;
  std::string name;
  bool required = true;
  std::string status = "passed";  // passed | failed | error
  std::string error;
  std::vector<Check> checks;
  Json results = Json::object();
  std::vector<std::pair<std::string, CsvTable>> tables;  // file stem suffix, table
  std::vector<std::string> files;
};

struct RunOptions {
  std::filesystem::path out_dir;
  double tol_scale = 1.0;
  std::optional<std::uint64_t> seed;  // overrides verify seeds
  bool write_files = true;
};

struct RunReport {
  std::string config_name;
  std::string config_hash;
  std::vector<Diagnostic> warnings;
  std::vector<TaskOutcome> tasks;
  double wall_clock_seconds = 0.0;

  /// 0 all required tasks passed, 1 an invariant failed, 3 a runtime error.
  int exit_code() const {
    bool failed = false, errored = false;
    for (const auto& t : tasks) {
      if (!t.required) continue;
      failed = failed || t.status == "failed";
      errored = errored || t.status == "error";
    }
    return errored ? 3 : failed ? 1 : 0;
  }

  /// The emitted report; wall-clock is left out so files stay byte-stable.
  Json to_json(bool include_wall_clock = false) const {
    Json j;
    j["header"] = {{"tool", "pawclock"}, {"version", kVersion}, {"config", config_name}, {"config_hash", config_hash}};
    j["warnings"] = Json::array();
    for (const auto& w : warnings) j["warnings"].push_back({{"path", w.path}, {"message", w.message}});
    j["tasks"] = Json::array();
    for (const auto& t : tasks) {
      Json e;
      e["index"] = t.index;
      e["name"] = t.name;
      e["required"] = t.required;
      e["status"] = t.status;
      if (!t.error.empty()) e["error"] = t.error;
      e["checks"] = Json::array();
      for (const auto& c : t.checks)
        e["checks"].push_back(
            {{"invariant", c.invariant}, {"value", c.value}, {"tolerance", c.tolerance}, {"passed", c.passed}});
      e["results"] = t.results;
      e["files"] = t.files;
      j["tasks"].push_back(e);
    }
    j["exit_code"] = exit_code();
    if (include_wall_clock) j["wall_clock_seconds"] = wall_clock_seconds;
    return j;
  }
};

namespace detail {

inline Json vec_json(const std::vector<double>& v) { return Json(v); }

class Context {
 public:
  Context(const ExperimentConfig& c, const RunOptions& o) : config(c), options(o) {}

  const ExperimentConfig& config;
  const RunOptions& options;

  const UniverseSpec& universe() {
    if (!universe_) universe_ = build_universe(config);
    return *universe_;
  }

  const HistoryState& history() {
    if (!history_) history_ = build_history(config, universe());
    return *history_;
  }

  double tol(double t) const { return t * options.tol_scale; }

 private:
  std::optional<UniverseSpec> universe_;
  std::optional<HistoryState> history_;
};

inline void check(TaskOutcome& out, const Context& ctx, std::string invariant, double value, double tolerance) {
  const double t = ctx.tol(tolerance);
  out.checks.push_back({std::move(invariant), value, t, value <= t});
}

inline Scope scope_of(const UniverseSpec& u, const std::string& s) {
  return s == "global" ? Scope::global() : Scope::local(u.clock.index_of(s));
}

inline TimeGrid grid_for(const Context& ctx, const TaskSpec& t, const UniverseSpec& u, Scope scope) {
  const GridSpec g = t.grid.value_or(ctx.config.grid);
  if (g.stop) return TimeGrid::linspace(g.start, *g.stop, g.nodes);
  return TimeGrid::uniform(g.start, g.periods * scope_clock_period(u, scope).second, g.nodes);
}

/// Observable "<op>@<site>" embedded on the space conditioned by `scope`.
inline Operator observable(const UniverseSpec& u, Scope scope, const std::string& spec) {
  const auto at = spec.find('@');
  const std::string op = spec.substr(0, at), site_name = spec.substr(at + 1);
  const std::size_t site = site_name == "S" ? u.system_site() : u.clock.index_of(site_name);
  const std::size_t dim = u.dims()[site];
  Operator local;
  if (op == "H") {
    local = site == u.system_site() ? u.system_hamiltonian : u.clock.clock(site).hamiltonian();
  } else {
    if (dim != 2) throw DimensionError("observable " + spec + ": Pauli operators need a two-level site");
    local = op == "sigma_x" ? pauli_x() : op == "sigma_y" ? pauli_y() : pauli_z();
  }
  return embed_in_rest(u, scope, local, site);
}

inline double constraint_tolerance(const UniverseSpec& u) {
  return tol::kKernel * std::max(1.0, op_norm(assemble_hamiltonian(u)));
}

// ---------------------------------------------------------------------------
// Tasks

inline void conditional_trace(Context& ctx, const TaskSpec& t, TaskOutcome& out) {
  const auto& u = ctx.universe();
  const auto& h = ctx.history();
  const Scope scope = scope_of(u, t.scope);
  const auto grid = grid_for(ctx, t, u, scope);
  const auto rest = product(rest_dims(u, scope));

  std::vector<std::string> cols{"t", "a"};
  for (std::size_t k = 0; k < rest; ++k) {
    cols.push_back("re_psi_" + std::to_string(k));
    cols.push_back("im_psi_" + std::to_string(k));
  }
  std::vector<Operator> obs;
  for (const auto& o : t.observables) {
    cols.push_back("<" + o + ">");
    obs.push_back(observable(u, scope, o));
  }
  CsvTable table(cols);

  std::optional<Operator> propagator_gen;
  if (scope.is_global()) {
    propagator_gen = u.system_hamiltonian;
  } else if (u.clock.size() == 1 || redshift(u, *scope.clock).invertible) {
    propagator_gen = effective_hamiltonian(u, *scope.clock).generator();
  }
  std::optional<Ket> first;
  double worst_infidelity = 0.0;
  std::size_t undefined = 0;
  for (double x : grid.nodes) {
    const Ket v = project_time(h, scope, x);
    const double a = v.norm();
    std::vector<double> row{x, a};
    if (a <= kConditioningFloor) {
      ++undefined;
      row.resize(cols.size(), std::numeric_limits<double>::quiet_NaN());
      table.add(row);
      continue;
    }
    const Ket psi = v / a;
    for (Eigen::Index k = 0; k < psi.size(); ++k) {
      row.push_back(psi(k).real());
      row.push_back(psi(k).imag());
    }
    for (const auto& o : obs) row.push_back(psi.dot(o * psi).real());
    table.add(row);
    if (!first) {
      first = psi;
      continue;
    }
    if (propagator_gen) {
      const auto ev = evolve_generator(*propagator_gen, x - grid.nodes.front());
      worst_infidelity = std::max(worst_infidelity, 1.0 - fidelity(psi, ev.propagator * *first));
    }
  }
  out.results["scope"] = t.scope;
  out.results["nodes"] = grid.nodes.size();
  out.results["undefined_nodes"] = undefined;
  out.results["constraint_residual"] = h.constraint_residual;
  check(out, ctx, "constraint residual ||H Psi||", h.constraint_residual, constraint_tolerance(u));
  if (propagator_gen && undefined == 0 && h.constraint_residual <= constraint_tolerance(u))
    check(out, ctx, "conditional state follows its Schroedinger equation (1 - fidelity)", worst_infidelity, 1e-10);
  out.tables.emplace_back("", std::move(table));
}

inline void amplitude_profile_task(Context& ctx, const TaskSpec& t, TaskOutcome& out) {
  const auto& u = ctx.universe();
  const auto& h = ctx.history();
  const Scope scope = scope_of(u, t.scope);
  const auto grid = grid_for(ctx, t, u, scope);
  const auto p = amplitude_profile(h, scope, grid);
  CsvTable table({"t", "a", "probability"});
  for (std::size_t k = 0; k < p.t.size(); ++k) table.add({p.t[k], p.a[k], p.probability[k]});
  out.results["scope"] = t.scope;
  out.results["period"] = p.period;
  out.results["a0"] = p.a.front();
  out.results["max_deviation"] = p.max_deviation();
  out.results["quadrature_sum"] = p.quadrature_sum;
  const bool satisfied = h.constraint_residual <= constraint_tolerance(u);
  out.results["constraint_satisfied"] = satisfied;
  if (satisfied && (scope.is_global() || u.clock.interaction() == Interaction::None))
    check(out, ctx, "a(t) constant over the grid (max deviation)", p.max_deviation(), 1e-12);

  // one uniform period with more nodes than max r_k is an exact resolution
  const GridSpec g = t.grid.value_or(ctx.config.grid);
  if (!g.stop && g.periods == 1.0) {
    const auto cls = scope.is_global() ? classify_spectrum(u.clock) : classify_spectrum(u.clock.clock(*scope.clock));
    if (cls.kind != SpectrumKind::IrrationalApproximated && static_cast<std::int64_t>(g.nodes) > cls.max_offset())
      check(out, ctx, "quadrature sum of Pr(t) over one period equals 1", std::abs(p.quadrature_sum - 1.0), 1e-8);
  }
  out.tables.emplace_back("", std::move(table));
}

inline void transition_amplitude_task(Context& ctx, const TaskSpec& t, TaskOutcome& out) {
  const auto& net = ctx.universe().clock;
  const auto n = net.size();
  double total = static_cast<double>(t.nodes);
  for (std::size_t j = 0; j < n; ++j) total *= static_cast<double>(t.nodes);
  if (total > 2e6) throw Error("transition-amplitude: grid has more than 2e6 points; lower nodes");
  std::vector<std::vector<double>> axes;
  for (std::size_t j = 0; j < n; ++j)
    axes.push_back(TimeGrid::uniform(0.0, classify_spectrum(net.clock(j)).period, t.nodes).nodes);
  const double t_period =
      net.size() > 1 && !net.degenerate() ? classify_spectrum(net).period : classify_spectrum(net.clock(0)).period;
  axes.push_back(TimeGrid::uniform(0.0, t_period, t.nodes).nodes);

  std::vector<std::string> cols;
  for (std::size_t j = 0; j < n; ++j) cols.push_back("tau_" + net.label(j));
  for (const char* c : {"t", "re", "im", "abs"}) cols.emplace_back(c);
  CsvTable table(cols);
  const bool free = net.interaction() == Interaction::None;
  double factor_err = 0.0;
  std::vector<std::size_t> idx(n + 1, 0);
  std::vector<double> taus(n);
  for (;;) {
    for (std::size_t j = 0; j < n; ++j) taus[j] = axes[j][idx[j]];
    const double x = axes[n][idx[n]];
    const Complex f = net.transition_amplitude(taus, x);
    std::vector<double> row(taus);
    row.insert(row.end(), {x, f.real(), f.imag(), std::abs(f)});
    table.add(row);
    if (free) {
      Complex prod = 1.0;
      for (std::size_t j = 0; j < n; ++j) prod *= net.clock(j).overlap(taus[j], x);
      factor_err = std::max(factor_err, std::abs(f - prod));
    }
    std::size_t d = n + 1;
    while (d > 0 && ++idx[d - 1] == axes[d - 1].size()) idx[--d] = 0;
    if (d == 0) break;
  }
  out.results["points"] = table.rows();
  out.results["interaction"] = free ? "none" : "gravitational-like";
  if (free) {
    out.results["max_factorization_error"] = factor_err;
    check(out, ctx, "F factorizes into local overlaps (prod_J <tau_J|t>_J)", factor_err, 1e-12);
  }
  out.tables.emplace_back("", std::move(table));
}

inline ResolutionKind resolution_kind(const std::string& s) {
  if (s == "discrete-orthonormal") return ResolutionKind::DiscreteOrthonormal;
  if (s == "overcomplete-discrete") return ResolutionKind::OvercompleteDiscrete;
  return ResolutionKind::Quadrature;
}

inline void resolution_task(Context& ctx, const TaskSpec& t, TaskOutcome& out) {
  const auto& u = ctx.universe();
  const ClockModel clock = u.clock.size() == 1 ? u.clock.clock(0) : u.clock.global_clock();
  const auto cls = classify_spectrum(clock);
  out.results["spectrum"] = to_string(cls.kind);
  out.results["period"] = cls.period;
  out.results["offsets"] = cls.offsets;
  out.results["max_frequency_error"] = cls.max_frequency_error;
  const auto res = build_resolution(clock, resolution_kind(t.resolution));
  out.results["kind"] = to_string(res.kind);
  out.results["nodes"] = res.nodes.size();
  out.results["weight"] = res.weight;
  out.results["defect"] = res.defect;
  Json conv = Json::array();
  for (const auto& [n, d] : res.convergence) conv.push_back({{"nodes", n}, {"defect", d}});
  out.results["convergence"] = conv;
  check(out, ctx, "resolution identity defect", res.defect, res.tolerance);

  CsvTable table({"n", "t_n", "weight"});
  for (std::size_t k = 0; k < res.nodes.size(); ++k) table.add({static_cast<double>(k), res.nodes[k], res.weight});
  out.tables.emplace_back("", std::move(table));

  const auto& h = ctx.history();
  double povm = 0.0;
  for (double x : res.nodes) povm += res.weight * project_time(h, Scope::global(), x).squaredNorm();
  out.results["povm_sum"] = povm;
  check(out, ctx, "POVM normalization weight * sum_n a^2(t_n) = 1", std::abs(povm - 1.0), 1e-10);
  const double f = fidelity(reconstruct_history(h, res), h.psi);
  out.results["reconstruction_fidelity"] = f;
  check(out, ctx, "history rebuilt from conditional states (1 - fidelity)", 1.0 - f, 1e-10);
}

/// Shared by tidit and tidit-sweep: everything about clock `a` of one universe.
struct TiditSummary {
  Json results = Json::object();
  std::vector<Check> checks;
  std::optional<CsvTable> trace;
  bool invertible = true;
  std::vector<double> redshifts;
  std::vector<int> signs;
  double min_fidelity = std::numeric_limits<double>::quiet_NaN();
  double redshift_drift = std::numeric_limits<double>::quiet_NaN();
  double frozen_stationarity = std::numeric_limits<double>::quiet_NaN();
  double stationary_residual = std::numeric_limits<double>::quiet_NaN();
  double amplitude_deviation = std::numeric_limits<double>::quiet_NaN();
};

inline TiditSummary analyze_tidit(const Context& ctx, const UniverseSpec& u, const HistoryState& h, std::size_t a,
                                  const TaskSpec& t, const TimeGrid& grid) {
  TiditSummary s;
  auto add = [&](std::string name, double value, double tolerance) {
    const double tl = ctx.tol(tolerance);
    s.checks.push_back({std::move(name), value, tl, value <= tl});
  };
  const auto b = redshift(u, a);
  s.invertible = b.invertible;
  s.redshifts = b.eigenvalues();
  s.results["clock"] = u.clock.label(a);
  s.results["redshift_eigenvalues"] = s.redshifts;
  s.results["spectral_radius"] = b.spectral_radius;
  s.results["invertible"] = b.invertible;
  Json map = Json::array();
  for (const auto& d : dilation_sign_map(u, a)) {
    map.push_back({{"redshift", d.redshift},
                   {"multiplicity", d.multiplicity},
                   {"time_scale", d.time_scale ? Json(*d.time_scale) : Json(nullptr)},
                   {"sign", d.sign}});
    for (std::size_t k = 0; k < d.multiplicity; ++k) s.signs.push_back(d.sign);
  }
  s.results["dilation"] = map;

  if (b.invertible) {
    const auto mode = t.mode == "series" ? InversionMode::series(t.order) : InversionMode::exact();
    const auto eff = effective_hamiltonian(u, a, mode);
    s.results["antihermitian_defect"] = eff.antihermitian_defect;
    const double comm = op_norm(commutator(b.redshift, eff.generator()));
    s.results["redshift_commutator"] = comm;
    if (op_norm(commutator(b.phi, eff.conditional)) <= 1e-10) add("[R, H_eff] vanishes when [Phi, H^(A)] does", comm, 1e-10);
    if (mode.kind == InversionMode::Kind::Series) {
      const std::size_t m = eff.series.size() - 1;
      const double err = op_norm(eff.series.back() - *eff.exact);
      s.results["series_order"] = m;
      s.results["series_error"] = err;
      add("series truncation error within rho^(m+1)/(1-rho) envelope (excess over bound)",
          std::max(0.0, err - eff.series_bound(m)), 64 * std::numeric_limits<double>::epsilon() * op_norm(eff.conditional));
    }
    const auto cmp = compare_routes(h, a, grid, mode);
    const auto traj = propagate_time_dilated(u, a, condition_local(h, a, grid.nodes.front()).psi, grid, mode);
    CsvTable table({"tau", "a", "fidelity", "redshift_expectation"});
    double r0 = 0.0, drift = 0.0;
    for (std::size_t k = 0; k < cmp.tau.size(); ++k) {
      const Ket& v = traj.states[k];
      const double r = v.dot(b.redshift * v).real() / v.squaredNorm();
      if (k == 0) r0 = r;
      drift = std::max(drift, std::abs(r - r0));
      table.add({cmp.tau[k], cmp.amplitude[k], cmp.fidelity[k], r});
    }
    s.min_fidelity = cmp.min_fidelity;
    s.redshift_drift = drift;
    s.amplitude_deviation = cmp.amplitude_deviation;
    s.results["min_fidelity"] = cmp.min_fidelity;
    s.results["redshift_drift"] = drift;
    s.results["amplitude_deviation"] = cmp.amplitude_deviation;
    s.results["norm_drift"] = traj.max_norm_drift;
    add("local conditioning matches time-dilated propagation (1 - min fidelity)", 1.0 - cmp.min_fidelity, 1e-8);
    add("<R> conserved along the trajectory", drift, b.spectral_radius > 1.0 ? 1e-8 : 1e-10);
    s.trace = std::move(table);
  } else {
    const auto split = degenerate_split(u, a);
    s.results["frozen_energies"] = split.frozen_energies;
    s.results["dynamical_redshifts"] = split.dynamical_redshifts;
    s.results["stationary_states"] = split.stationary_states.size();
    s.results["stationary_residual"] = split.stationary_constraint_residual;
    s.results["block_coupling"] = split.block_coupling;
    s.stationary_residual = split.stationary_constraint_residual;
    if (!split.stationary_states.empty())
      add("stationary states solve the frozen constraint", split.stationary_constraint_residual, 1e-10);
    CsvTable table({"tau", "a", "frozen_weight", "frozen_fidelity"});
    const Ket first = split.frozen_projector * condition_local(h, a, grid.nodes.front()).psi;
    if (first.norm() > kConditioningFloor) {
      double worst = 1.0;
      std::size_t vanishing = 0;
      for (double x : grid.nodes) {
        const auto c = condition_local(h, a, x);
        const Ket v = split.frozen_projector * c.psi;
        if (v.norm() <= kFrozenNodeFloor * first.norm()) {
          ++vanishing;
          table.add({x, c.amplitude, v.norm(), std::numeric_limits<double>::quiet_NaN()});
          continue;
        }
        const double f = fidelity(first, v);
        worst = std::min(worst, f);
        table.add({x, c.amplitude, v.norm(), f});
      }
      s.frozen_stationarity = worst;
      s.results["frozen_stationarity"] = worst;
      s.results["frozen_vanishing_nodes"] = vanishing;
      add("frozen-subspace component is stationary (1 - min fidelity)", 1.0 - worst, 1e-10);
    } else {
      s.results["frozen_stationarity"] = nullptr;
    }
    s.trace = std::move(table);
  }
  return s;
}

inline void tidit_task(Context& ctx, const TaskSpec& t, TaskOutcome& out) {
  const auto& u = ctx.universe();
  const auto& h = ctx.history();
  const std::size_t a = u.clock.index_of(t.clock);
  auto s = analyze_tidit(ctx, u, h, a, t, grid_for(ctx, t, u, Scope::local(a)));
  out.results = std::move(s.results);
  out.checks = std::move(s.checks);
  if (s.trace) out.tables.emplace_back("", std::move(*s.trace));
}

inline ExperimentConfig with_coupling(const ExperimentConfig& c, const std::string& a, const std::string& b, double g) {
  ExperimentConfig out = c;
  if (out.couplings.count(b)) out.couplings[b].erase(a);
  out.couplings[a][b] = g;
  if (!out.interaction && g == 0.0) out.interaction = "gravitational-like";
  return out;
}

inline void tidit_sweep_task(Context& ctx, const TaskSpec& t, TaskOutcome& out) {
  std::vector<std::string> cols{"g", "invertible"};
  const auto base = build_universe(ctx.config);
  const std::size_t a = base.clock.index_of(t.clock);
  const std::size_t rest = product(rest_dims(base, a));
  for (std::size_t k = 0; k < rest; ++k) {
    cols.push_back("epsilon_" + std::to_string(k));
    cols.push_back("sign_" + std::to_string(k));
  }
  for (const char* c : {"min_fidelity", "redshift_drift", "frozen_stationarity", "stationary_residual"})
    cols.emplace_back(c);
  CsvTable table(cols);
  Json points = Json::array();
  for (double g : t.g_values) {
    const auto cfg = with_coupling(ctx.config, t.pair[0], t.pair[1], g);
    const auto u = build_universe(cfg);
    const auto h = build_history(cfg, u);
    const auto grid = grid_for(ctx, t, u, Scope::local(a));
    auto s = analyze_tidit(ctx, u, h, a, t, grid);
    std::vector<double> row{g, s.invertible ? 1.0 : 0.0};
    for (std::size_t k = 0; k < rest; ++k) {
      row.push_back(s.redshifts[k]);
      row.push_back(static_cast<double>(s.signs[k]));
    }
    row.insert(row.end(), {s.min_fidelity, s.redshift_drift, s.frozen_stationarity, s.stationary_residual});
    table.add(row);
    s.results["g"] = g;
    s.results["degenerate"] = !s.invertible;
    points.push_back(s.results);
    for (auto& c : s.checks) {
      c.invariant = "g=" + format_number(g) + ": " + c.invariant;
      out.checks.push_back(std::move(c));
    }
  }
  out.results["pair"] = t.pair;
  out.results["points"] = points;
  out.tables.emplace_back("", std::move(table));
}

inline void verify_task(Context& ctx, const TaskSpec& t, TaskOutcome& out) {
  const std::uint64_t seed = ctx.options.seed.value_or(t.seed);
  out.results["seed"] = seed;
  out.results["count"] = t.count;
  Json skipped = Json::array();

  // the configured universe
  const auto& u = ctx.universe();
  const auto& h = ctx.history();
  check(out, ctx, "config: constraint residual", h.constraint_residual, constraint_tolerance(u));
  const bool global_ok = u.clock.size() == 1 || !u.clock.degenerate();
  if (global_ok) {
    const auto grid = default_grid(u, Scope::global(), 64);
    check(out, ctx, "config: a(t) constancy", amplitude_profile(h, Scope::global(), grid).max_deviation(), 1e-12);
    const Ket psi0 = condition_global(h, grid.nodes.front()).psi;
    const auto spec = eig_hermitian(u.system_hamiltonian);
    double worst = 0.0;
    for (double x : grid.nodes)
      worst = std::max(worst, 1.0 - fidelity(condition_global(h, x).psi, spec.evolve(x - grid.nodes.front()) * psi0));
    check(out, ctx, "config: evolution without evolution (1 - fidelity)", worst, 1e-10);
    const ClockModel clock = u.clock.size() == 1 ? u.clock.clock(0) : u.clock.global_clock();
    const auto cls = classify_spectrum(clock);
    if (cls.kind != SpectrumKind::IrrationalApproximated && cls.max_offset() < 4096) {
      const auto res = build_resolution(clock, ResolutionKind::OvercompleteDiscrete);
      check(out, ctx, "config: overcomplete resolution defect", res.defect, res.tolerance);
      check(out, ctx, "config: reconstruction from conditional states (1 - fidelity)",
            1.0 - fidelity(reconstruct_history(h, res), h.psi), 1e-10);
    } else {
      skipped.push_back("config: resolution (spectrum period too long for an exact discrete resolution)");
    }
  } else {
    skipped.push_back("config: global-clock invariants (degenerate global spectrum)");
  }
  if (u.clock.size() > 1) {
    TaskSpec ts;
    for (std::size_t a = 0; a < u.clock.size(); ++a) {
      const auto grid = TimeGrid::uniform(0.0, scope_clock_period(u, Scope::local(a)).second, 64);
      try {
        auto s = analyze_tidit(ctx, u, h, a, ts, grid);
        for (auto& c : s.checks) {
          c.invariant = "config clock " + u.clock.label(a) + ": " + c.invariant;
          out.checks.push_back(std::move(c));
        }
      } catch (const ZeroAmplitude&) {
        skipped.push_back("config clock " + u.clock.label(a) + ": conditional amplitude vanishes on the grid");
      }
    }
  }

  // seeded random universes
  double worst_evo = 0.0, worst_flat = 0.0, worst_res = 0.0;
  for (std::size_t k = 0; k < t.count; ++k) {
    const std::size_t dc = 2 + k % 3, ds = 2 + (k / 3) % 2;
    const auto r = random_universe(seed + k, dc, ds);
    worst_res = std::max(worst_res, r.history.constraint_residual / constraint_tolerance(r.universe));
    const auto grid = TimeGrid::uniform(0.0, 20.0, 256);
    const Ket psi0 = condition_global(r.history, 0.0).psi;
    const auto spec = eig_hermitian(r.universe.system_hamiltonian);
    for (double x : grid.nodes)
      worst_evo = std::max(worst_evo, 1.0 - fidelity(condition_global(r.history, x).psi, spec.evolve(x) * psi0));
    worst_flat = std::max(worst_flat, amplitude_profile(r.history, Scope::global(), grid).max_deviation());
  }
  check(out, ctx, "random universes: constraint residual (relative to tolerance)", worst_res, 1.0);
  check(out, ctx, "random universes: evolution without evolution (1 - fidelity)", worst_evo, 1e-10);
  check(out, ctx, "random universes: a(t) constancy", worst_flat, 1e-12);
  out.results["skipped"] = skipped;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + p.string());
  f << text;
}

inline std::string two_digits(std::size_t n) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02zu", n);
  return buf;
}

}  // namespace detail

inline RunReport run(const ExperimentConfig& config, const RunOptions& options = {},
                     std::vector<Diagnostic> warnings = {}) {
  const auto started = std::chrono::steady_clock::now();
  RunReport report;
  report.config_name = config.name;
  report.config_hash = config_hash(config);
  report.warnings = std::move(warnings);
  detail::Context ctx(config, options);
  const std::string comment = std::string("pawclock ") + kVersion + " config " + report.config_hash;
  const bool csv = std::find(config.outputs.formats.begin(), config.outputs.formats.end(), "csv") !=
                   config.outputs.formats.end();
  const bool json = std::find(config.outputs.formats.begin(), config.outputs.formats.end(), "json") !=
                    config.outputs.formats.end();
  if (options.write_files) std::filesystem::create_directories(options.out_dir);

  for (std::size_t i = 0; i < config.tasks.size(); ++i) {
    const auto& t = config.tasks[i];
    TaskOutcome out;
    out.index = i;
    out.name = t.name;
    out.required = t.required;
    try {
      if (t.name == "conditional-trace") detail::conditional_trace(ctx, t, out);
      else if (t.name == "amplitude-profile") detail::amplitude_profile_task(ctx, t, out);
      else if (t.name == "transition-amplitude") detail::transition_amplitude_task(ctx, t, out);
      else if (t.name == "resolution") detail::resolution_task(ctx, t, out);
      else if (t.name == "tidit") detail::tidit_task(ctx, t, out);
      else if (t.name == "tidit-sweep") detail::tidit_sweep_task(ctx, t, out);
      else if (t.name == "verify") detail::verify_task(ctx, t, out);
      else throw Error("unknown task " + t.name);
      for (const auto& c : out.checks)
        if (!c.passed) out.status = "failed";
    } catch (const InfeasibleResolution& e) {
      out.status = "failed";
      out.error = e.what();
    } catch (const std::exception& e) {
      out.status = "error";
      out.error = e.what();
    }
    if (options.write_files && csv)
      for (const auto& [suffix, table] : out.tables) {
        const std::string file = detail::two_digits(i) + "-" + t.name + suffix + ".csv";
        detail::write_file(options.out_dir / file, table.render(comment));
        out.files.push_back(file);
      }
    report.tasks.push_back(std::move(out));
  }
  if (options.write_files && json) detail::write_file(options.out_dir / "report.json", report.to_json().dump(2) + "\n");
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace pawclock::experiment
