#pragma once

// Declarative experiment configuration (JSON surface syntax).
//
// Every validation problem is collected with the dotted path of the key that
// caused it, so one pass reports all of them.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pawclock/errors.hpp"
#include "pawclock/tidit.hpp"
#include "pawclock/universe.hpp"

namespace pawclock::experiment {

using Json = nlohmann::ordered_json;

struct Diagnostic {
  std::string path;
  std::string message;
  bool operator==(const Diagnostic&) const = default;
};

/// Syntax or validation failure; carries every diagnostic found.
class ConfigError : public Error {
 public:
  enum class Kind { Syntax, Validation };

  ConfigError(Kind kind, std::vector<Diagnostic> diagnostics)
      : Error(summarize(kind, diagnostics)), kind_(kind), diagnostics_(std::move(diagnostics)) {}

  Kind kind() const noexcept { return kind_; }
  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  static std::string summarize(Kind kind, const std::vector<Diagnostic>& d) {
    std::string s = kind == Kind::Syntax ? "config syntax error" : "config validation failed";
    for (const auto& x : d) s += "\n  " + (x.path.empty() ? std::string("<root>") : x.path) + ": " + x.message;
    return s;
  }

  Kind kind_;
  std::vector<Diagnostic> diagnostics_;
};

struct ClockSpec {
  std::string label;
  std::string kind = "spin";  // spin | custom
  double omega = 1.0;         // spin
  std::vector<double> frequencies;  // custom
  std::vector<double> phases;
  bool operator==(const ClockSpec&) const = default;
};

struct SystemSpec {
  std::string preset = "zero";  // zero | sigma_x | matched | matrix
  std::size_t dim = 1;          // zero
  double scale = 1.0;           // sigma_x
  std::vector<std::size_t> levels;  // matched: clock product levels to cancel
  std::uint64_t seed = 1;           // matched: basis seed
  std::vector<std::vector<Complex>> matrix;
  bool operator==(const SystemSpec&) const = default;
};

struct ConstraintSpec {
  std::string rule = "energy-paired";  // energy-paired | kernel
  std::vector<Complex> coefficients;   // empty = equal weights
  bool operator==(const ConstraintSpec&) const = default;
};

/// Either [start, stop] with `nodes` points (inclusive) or `periods` of the
/// scoped clock's period sampled at `nodes` uniform points.
struct GridSpec {
  double start = 0.0;
  std::optional<double> stop;
  std::size_t nodes = kDefaultGridNodes;
  double periods = 1.0;
  bool operator==(const GridSpec&) const = default;
};

struct TaskSpec {
  std::string name;
  bool required = true;
  std::string scope = "global";  // global | clock label
  std::vector<std::string> observables;  // "<op>@<site>", op in sigma_x|sigma_y|sigma_z|H
  std::string resolution = "quadrature";
  std::string clock = "A";
  std::string mode = "exact";  // exact | series
  std::optional<std::size_t> order;
  std::vector<double> g_values;
  std::vector<std::string> pair;
  std::size_t nodes = 16;  // transition-amplitude grid per axis
  std::optional<GridSpec> grid;
  std::uint64_t seed = 1;
  std::size_t count = 20;
  bool operator==(const TaskSpec&) const = default;
};

struct OutputSpec {
  std::string directory = "pawclock-out";
  std::vector<std::string> formats{"csv", "json"};
  bool operator==(const OutputSpec&) const = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<ClockSpec> clocks;
  std::string coupling_units = "dimensionless";  // dimensionless | inverse-energy
  std::map<std::string, std::map<std::string, double>> couplings;
  std::optional<std::string> interaction;  // none | gravitational-like; inferred when absent
  SystemSpec system;
  ConstraintSpec constraint;
  GridSpec grid;
  std::vector<TaskSpec> tasks;
  OutputSpec outputs;
  bool operator==(const ExperimentConfig&) const = default;
};

inline const std::set<std::string>& task_names() {
  static const std::set<std::string> names{"conditional-trace", "amplitude-profile", "transition-amplitude",
                                           "resolution",        "tidit",             "tidit-sweep",
                                           "verify"};
  return names;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json grid_to_json(const GridSpec& g) {
  Json j;
  j["start"] = g.start;
  if (g.stop) j["stop"] = *g.stop;
  j["nodes"] = g.nodes;
  if (!g.stop || g.periods != GridSpec{}.periods) j["periods"] = g.periods;
  return j;
}

}  // namespace detail

inline Json to_json(const ExperimentConfig& c) {
  Json j;
  j["name"] = c.name;
  j["clocks"] = Json::array();
  for (const auto& k : c.clocks) {
    Json e;
    e["label"] = k.label;
    e["kind"] = k.kind;
    if (k.kind == "spin")
      e["omega"] = k.omega;
    else
      e["frequencies"] = k.frequencies;
    if (!k.phases.empty()) e["phases"] = k.phases;
    j["clocks"].push_back(e);
  }
  j["coupling_units"] = c.coupling_units;
  j["couplings"] = Json::object();
  for (const auto& [a, row] : c.couplings)
    for (const auto& [b, g] : row) j["couplings"][a][b] = g;
  if (c.interaction) j["interaction"] = *c.interaction;

  // a key is written when its preset uses it or it differs from the default,
  // so parse -> serialize -> parse is the identity
  const SystemSpec sd;
  Json s;
  s["preset"] = c.system.preset;
  const auto& sp = c.system.preset;
  if (sp == "zero" || c.system.dim != sd.dim) s["dim"] = c.system.dim;
  if (sp == "sigma_x" || c.system.scale != sd.scale) s["scale"] = c.system.scale;
  if (sp == "matched" || c.system.levels != sd.levels) s["levels"] = c.system.levels;
  if (sp == "matched" || c.system.seed != sd.seed) s["seed"] = c.system.seed;
  if (sp == "matrix" || !c.system.matrix.empty()) {
    s["matrix"] = Json::array();
    for (const auto& row : c.system.matrix) {
      Json r = Json::array();
      for (auto z : row) r.push_back(detail::complex_to_json(z));
      s["matrix"].push_back(r);
    }
  }
  j["system"] = s;

  Json con;
  con["rule"] = c.constraint.rule;
  if (!c.constraint.coefficients.empty()) {
    con["coefficients"] = Json::array();
    for (auto z : c.constraint.coefficients) con["coefficients"].push_back(detail::complex_to_json(z));
  }
  j["constraint"] = con;
  j["grid"] = detail::grid_to_json(c.grid);

  j["tasks"] = Json::array();
  const TaskSpec td;
  for (const auto& t : c.tasks) {
    Json e;
    e["name"] = t.name;
    e["required"] = t.required;
    const auto& n = t.name;
    const bool trace = n == "conditional-trace", tidit = n == "tidit" || n == "tidit-sweep";
    if (trace || n == "amplitude-profile" || t.scope != td.scope) e["scope"] = t.scope;
    if (trace || t.observables != td.observables) e["observables"] = t.observables;
    if (n == "resolution" || t.resolution != td.resolution) e["resolution"] = t.resolution;
    if (tidit || t.clock != td.clock) e["clock"] = t.clock;
    if (tidit || t.mode != td.mode) e["mode"] = t.mode;
    if (t.order) e["order"] = *t.order;
    if (n == "tidit-sweep" || t.g_values != td.g_values) e["g_values"] = t.g_values;
    if (n == "tidit-sweep" || t.pair != td.pair) e["pair"] = t.pair;
    if (n == "transition-amplitude" || t.nodes != td.nodes) e["nodes"] = t.nodes;
    if (n == "verify" || t.seed != td.seed) e["seed"] = t.seed;
    if (n == "verify" || t.count != td.count) e["count"] = t.count;
    if (t.grid) e["grid"] = detail::grid_to_json(*t.grid);
    j["tasks"].push_back(e);
  }
  j["outputs"]["directory"] = c.outputs.directory;
  j["outputs"]["formats"] = c.outputs.formats;
  return j;
}

inline std::string serialize_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

/// FNV-1a 64 of the compact canonical serialization, as 16 hex digits.
inline std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Parsing and validation

namespace detail {

class Reader {
 public:
  std::vector<Diagnostic> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back({path, msg}); }

  void allow_keys(const Json& j, const std::string& path, std::initializer_list<const char*> keys) {
    if (!j.is_object()) return;
    for (const auto& [k, v] : j.items()) {
      bool ok = false;
      for (const char* a : keys) ok = ok || k == a;
      if (!ok) fail(join(path, k), "unknown key");
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  bool object(const Json& j, const std::string& path) {
    if (j.is_object()) return true;
    fail(path, "expected an object");
    return false;
  }

  template <class T>
  void get(const Json& j, const std::string& path, const char* key, T& out) {
    if (!j.is_object() || !j.contains(key)) return;
    read(j.at(key), join(path, key), out);
  }

  void read(const Json& v, const std::string& path, double& out) {
    if (!v.is_number()) return fail(path, "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) fail(path, "must be finite");
  }
  void read(const Json& v, const std::string& path, std::size_t& out) {
    if (!v.is_number_integer() || v.get<long long>() < 0) return fail(path, "expected a nonnegative integer");
    out = v.get<std::size_t>();
  }
  void read(const Json& v, const std::string& path, bool& out) {
    if (!v.is_boolean()) return fail(path, "expected true or false");
    out = v.get<bool>();
  }
  void read(const Json& v, const std::string& path, std::string& out) {
    if (!v.is_string()) return fail(path, "expected a string");
    out = v.get<std::string>();
  }
  void read(const Json& v, const std::string& path, Complex& out) {
    if (v.is_number()) {
      out = v.get<double>();
      return;
    }
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      return fail(path, "expected a complex number [re, im]");
    out = {v[0].get<double>(), v[1].get<double>()};
  }
  template <class T>
  void read(const Json& v, const std::string& path, std::optional<T>& out) {
    T x{};
    const auto before = errors.size();
    read(v, path, x);
    if (errors.size() == before) out = x;
  }
  template <class T>
  void read(const Json& v, const std::string& path, std::vector<T>& out) {
    if (!v.is_array()) return fail(path, "expected an array");
    out.clear();
    for (std::size_t k = 0; k < v.size(); ++k) {
      T x{};
      read(v[k], path + "." + std::to_string(k), x);
      out.push_back(x);
    }
  }

  void read(const Json& v, const std::string& path, GridSpec& g) {
    if (!object(v, path)) return;
    allow_keys(v, path, {"start", "stop", "nodes", "periods"});
    get(v, path, "start", g.start);
    get(v, path, "stop", g.stop);
    get(v, path, "nodes", g.nodes);
    get(v, path, "periods", g.periods);
    if (g.nodes < 2) fail(join(path, "nodes"), "need at least 2 nodes");
    if (g.nodes > 1'000'000) fail(join(path, "nodes"), "at most 1000000 nodes");
    if (g.stop && !(*g.stop > g.start)) fail(join(path, "stop"), "must exceed start");
    if (!g.stop && !(g.periods > 0.0)) fail(join(path, "periods"), "must be positive");
  }
};

inline bool is_observable_op(const std::string& op) {
  return op == "sigma_x" || op == "sigma_y" || op == "sigma_z" || op == "H";
}

}  // namespace detail

/// Clock network described by a (structurally valid) config.
inline ClockNetwork build_network(const ExperimentConfig& c) {
  const auto n = c.clocks.size();
  std::vector<std::string> labels;
  for (const auto& k : c.clocks) labels.push_back(k.label);
  auto index = [&](const std::string& l) {
    return static_cast<std::size_t>(std::find(labels.begin(), labels.end(), l) - labels.begin());
  };
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& [a, row] : c.couplings)
    for (const auto& [b, v] : row) {
      const auto i = static_cast<Eigen::Index>(index(a)), j = static_cast<Eigen::Index>(index(b));
      g(i, j) = v;
      g(j, i) = v;
    }
  const bool any = !g.isZero(0.0);
  Interaction inter = any ? Interaction::GravitationalLike : Interaction::None;
  if (c.interaction) inter = *c.interaction == "none" ? Interaction::None : Interaction::GravitationalLike;

  std::vector<ClockModel> clocks;
  for (const auto& k : c.clocks) {
    if (k.kind == "spin")
      clocks.push_back(ClockModel::spin(k.omega, k.phases));
    else
      clocks.push_back(ClockModel::from_spectrum(k.frequencies, k.phases));
  }
  if (c.coupling_units == "dimensionless") {
    // g_JK = gt_JK omega_0 / (omega_J omega_K), same convention as ClockNetwork::spins
    for (Eigen::Index j = 0; j < g.rows(); ++j)
      for (Eigen::Index k = 0; k < g.cols(); ++k)
        g(j, k) *= c.clocks[0].omega / (c.clocks[static_cast<std::size_t>(j)].omega *
                                        c.clocks[static_cast<std::size_t>(k)].omega);
    g = 0.5 * (g + g.transpose()).eval();
  }
  return ClockNetwork(std::move(clocks), labels, g, inter);
}

namespace detail {

/// Semantic checks that need the assembled network; appends diagnostics.
inline void validate_semantics(const ExperimentConfig& c, Reader& r, std::vector<Diagnostic>& warnings) {
  std::optional<ClockNetwork> net;
  try {
    net = build_network(c);
  } catch (const Error& e) {
    r.fail("clocks", e.what());
    return;
  }
  if (net->size() > 1 && net->degenerate())
    warnings.push_back({"clocks", "global clock spectrum is degenerate (e.g. equal local frequencies); "
                                  "global-scope tasks and resolutions are unavailable"});
  if (c.interaction && *c.interaction == "none" &&
      std::any_of(c.couplings.begin(), c.couplings.end(), [](const auto& row) {
        return std::any_of(row.second.begin(), row.second.end(), [](const auto& e) { return e.second != 0.0; });
      }))
    warnings.push_back({"interaction", "couplings are ignored because interaction is none"});

  const auto& s = c.system;
  if (s.preset == "matched")
    for (std::size_t k = 0; k < s.levels.size(); ++k)
      if (s.levels[k] >= net->dim())
        r.fail("system.levels." + std::to_string(k),
               "clock level out of range (global clock has " + std::to_string(net->dim()) + " levels)");
  if (s.preset == "sigma_x" && s.scale == 0.0) r.fail("system.scale", "must be nonzero");
  if (s.preset == "matrix") {
    const auto n = s.matrix.size();
    bool square = n > 0;
    for (std::size_t i = 0; i < n; ++i)
      if (s.matrix[i].size() != n) {
        r.fail("system.matrix." + std::to_string(i), "matrix must be square");
        square = false;
      }
    if (square)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
          if (std::abs(s.matrix[i][j] - std::conj(s.matrix[j][i])) > 1e-12 * (1.0 + std::abs(s.matrix[i][j])))
            r.fail("system.matrix." + std::to_string(i) + "." + std::to_string(j), "matrix is not Hermitian");
  }

  auto known = [&](const std::string& l) {
    return std::any_of(c.clocks.begin(), c.clocks.end(), [&](const ClockSpec& k) { return k.label == l; });
  };
  for (std::size_t t = 0; t < c.tasks.size(); ++t) {
    const auto& task = c.tasks[t];
    const std::string p = "tasks." + std::to_string(t);
    if (task.scope != "global" && !known(task.scope)) r.fail(p + ".scope", "unknown clock label '" + task.scope + "'");
    for (std::size_t k = 0; k < task.observables.size(); ++k) {
      const auto& o = task.observables[k];
      const auto at = o.find('@');
      const std::string path = p + ".observables." + std::to_string(k);
      if (at == std::string::npos || !is_observable_op(o.substr(0, at))) {
        r.fail(path, "expected <sigma_x|sigma_y|sigma_z|H>@<site>");
        continue;
      }
      const std::string site = o.substr(at + 1);
      if (site != "S" && !known(site)) r.fail(path, "unknown site '" + site + "'");
      if (site == task.scope) r.fail(path, "cannot observe the conditioning clock");
      if (task.scope == "global" && site != "S") r.fail(path, "global scope only exposes the system S");
    }
    if (task.name == "tidit" || task.name == "tidit-sweep") {
      if (!known(task.clock)) r.fail(p + ".clock", "unknown clock label '" + task.clock + "'");
      if (c.clocks.size() < 2) r.fail(p, "needs at least two local clocks");
    }
    if (task.name == "tidit-sweep") {
      if (task.pair.size() != 2 || task.pair[0] == task.pair[1]) r.fail(p + ".pair", "expected two distinct labels");
      for (std::size_t k = 0; k < task.pair.size(); ++k)
        if (!known(task.pair[k])) r.fail(p + ".pair." + std::to_string(k), "unknown clock label");
      if (task.g_values.empty()) r.fail(p + ".g_values", "need at least one value");
    }
  }
}

}  // namespace detail

inline ExperimentConfig config_from_json(const Json& root, std::vector<Diagnostic>* warnings = nullptr) {
  detail::Reader r;
  ExperimentConfig c;
  if (!r.object(root, "")) throw ConfigError(ConfigError::Kind::Validation, r.errors);
  r.allow_keys(root, "", {"name", "clocks", "coupling_units", "couplings", "interaction", "system", "constraint",
                          "grid", "tasks", "outputs"});
  r.get(root, "", "name", c.name);

  if (!root.contains("clocks") || !root["clocks"].is_array() || root["clocks"].empty()) {
    r.fail("clocks", "expected a nonempty array of clocks");
  } else {
    std::set<std::string> seen;
    for (std::size_t k = 0; k < root["clocks"].size(); ++k) {
      const auto& e = root["clocks"][k];
      const std::string p = "clocks." + std::to_string(k);
      ClockSpec s;
      s.label = std::string(1, static_cast<char>('A' + k % 26));
      if (r.object(e, p)) {
        r.allow_keys(e, p, {"label", "kind", "omega", "frequencies", "phases"});
        r.get(e, p, "label", s.label);
        r.get(e, p, "kind", s.kind);
        r.get(e, p, "omega", s.omega);
        r.get(e, p, "frequencies", s.frequencies);
        r.get(e, p, "phases", s.phases);
        if (s.label.empty() || s.label == "S" || s.label == "global")
          r.fail(p + ".label", "label must be nonempty and not 'S' or 'global'");
        if (!seen.insert(s.label).second) r.fail(p + ".label", "duplicate label '" + s.label + "'");
        if (s.kind == "spin") {
          if (s.omega == 0.0) r.fail(p + ".omega", "must be nonzero");
          if (e.contains("frequencies")) r.fail(p + ".frequencies", "spin clocks take omega, not frequencies");
        } else if (s.kind == "custom") {
          if (s.frequencies.empty()) r.fail(p + ".frequencies", "custom clocks need a frequency list");
          for (std::size_t i = 1; i < s.frequencies.size(); ++i)
            if (!(s.frequencies[i] > s.frequencies[i - 1]))
              r.fail(p + ".frequencies." + std::to_string(i), "frequencies must be strictly ascending");
        } else {
          r.fail(p + ".kind", "expected spin or custom");
        }
        const std::size_t d = s.kind == "spin" ? 2 : s.frequencies.size();
        if (!s.phases.empty() && s.phases.size() != d)
          r.fail(p + ".phases", "expected " + std::to_string(d) + " phases");
      }
      c.clocks.push_back(s);
    }
  }

  r.get(root, "", "coupling_units", c.coupling_units);
  if (c.coupling_units != "dimensionless" && c.coupling_units != "inverse-energy")
    r.fail("coupling_units", "expected dimensionless or inverse-energy");
  if (c.coupling_units == "dimensionless")
    for (std::size_t k = 0; k < c.clocks.size(); ++k)
      if (c.clocks[k].kind != "spin")
        r.fail("coupling_units", "dimensionless couplings need spin clocks; clock " + c.clocks[k].label + " is custom");
  if (root.contains("couplings")) {
    const auto& cj = root["couplings"];
    if (r.object(cj, "couplings"))
      for (const auto& [a, row] : cj.items()) {
        const std::string pa = "couplings." + a;
        if (!r.object(row, pa)) continue;
        for (const auto& [b, v] : row.items()) {
          const std::string pab = pa + "." + b;
          double g = 0.0;
          r.read(v, pab, g);
          const bool ka = std::any_of(c.clocks.begin(), c.clocks.end(), [&](auto& s) { return s.label == a; });
          const bool kb = std::any_of(c.clocks.begin(), c.clocks.end(), [&](auto& s) { return s.label == b; });
          if (!ka) r.fail(pa, "unknown clock label '" + a + "'");
          if (!kb) r.fail(pab, "unknown clock label '" + b + "'");
          if (a == b && g != 0.0) r.fail(pab, "self-coupling must be zero");
          if (a == b) continue;
          if (c.couplings.count(b) && c.couplings[b].count(a) && c.couplings[b][a] != g)
            r.fail(pab, "coupling must be symmetric: " + b + "." + a + " differs");
          c.couplings[a][b] = g;
        }
      }
  }
  if (root.contains("interaction")) {
    std::string i;
    r.read(root["interaction"], "interaction", i);
    if (i != "none" && i != "gravitational-like") r.fail("interaction", "expected none or gravitational-like");
    c.interaction = i;
  }

  if (root.contains("system")) {
    const auto& sj = root["system"];
    if (r.object(sj, "system")) {
      r.allow_keys(sj, "system", {"preset", "dim", "scale", "levels", "seed", "matrix"});
      r.get(sj, "system", "preset", c.system.preset);
      r.get(sj, "system", "dim", c.system.dim);
      r.get(sj, "system", "scale", c.system.scale);
      r.get(sj, "system", "levels", c.system.levels);
      r.get(sj, "system", "seed", c.system.seed);
      r.get(sj, "system", "matrix", c.system.matrix);
      const auto& p = c.system.preset;
      if (p != "zero" && p != "sigma_x" && p != "matched" && p != "matrix")
        r.fail("system.preset", "expected zero, sigma_x, matched or matrix");
      if (p == "zero" && c.system.dim == 0) r.fail("system.dim", "must be positive");
      if (p == "matched" && c.system.levels.empty()) r.fail("system.levels", "need at least one clock level");
      if (p == "matrix" && c.system.matrix.empty()) r.fail("system.matrix", "need a nonempty matrix");
    }
  }

  if (root.contains("constraint")) {
    const auto& cj = root["constraint"];
    if (r.object(cj, "constraint")) {
      r.allow_keys(cj, "constraint", {"rule", "coefficients"});
      r.get(cj, "constraint", "rule", c.constraint.rule);
      r.get(cj, "constraint", "coefficients", c.constraint.coefficients);
      if (c.constraint.rule != "energy-paired" && c.constraint.rule != "kernel")
        r.fail("constraint.rule", "expected energy-paired or kernel");
    }
  }
  if (root.contains("grid")) r.read(root["grid"], "grid", c.grid);

  if (root.contains("tasks")) {
    const auto& tj = root["tasks"];
    if (!tj.is_array()) r.fail("tasks", "expected an array");
    for (std::size_t k = 0; tj.is_array() && k < tj.size(); ++k) {
      const std::string p = "tasks." + std::to_string(k);
      TaskSpec t;
      const auto& e = tj[k];
      if (e.is_string()) {
        t.name = e.get<std::string>();
      } else if (r.object(e, p)) {
        r.allow_keys(e, p, {"name", "required", "scope", "observables", "resolution", "clock", "mode", "order",
                            "g_values", "pair", "nodes", "grid", "seed", "count"});
        r.get(e, p, "name", t.name);
        r.get(e, p, "required", t.required);
        r.get(e, p, "scope", t.scope);
        r.get(e, p, "observables", t.observables);
        r.get(e, p, "resolution", t.resolution);
        r.get(e, p, "clock", t.clock);
        r.get(e, p, "mode", t.mode);
        r.get(e, p, "order", t.order);
        r.get(e, p, "g_values", t.g_values);
        r.get(e, p, "pair", t.pair);
        r.get(e, p, "nodes", t.nodes);
        if (e.contains("grid")) {
          GridSpec g;
          r.read(e["grid"], p + ".grid", g);
          t.grid = g;
        }
        r.get(e, p, "seed", t.seed);
        r.get(e, p, "count", t.count);
      }
      if (!task_names().count(t.name)) r.fail(p + ".name", "unknown task '" + t.name + "'");
      if (t.resolution != "discrete-orthonormal" && t.resolution != "overcomplete-discrete" &&
          t.resolution != "quadrature")
        r.fail(p + ".resolution", "expected discrete-orthonormal, overcomplete-discrete or quadrature");
      if (t.mode != "exact" && t.mode != "series") r.fail(p + ".mode", "expected exact or series");
      if (t.order && *t.order > kMaxSeriesOrder) r.fail(p + ".order", "at most 200");
      if (t.nodes < 1 || t.nodes > 256) r.fail(p + ".nodes", "expected 1..256");
      if (t.count < 1) r.fail(p + ".count", "must be positive");
      if (t.name == "tidit-sweep" && t.pair.empty() && c.clocks.size() >= 2)
        t.pair = {c.clocks[0].label, c.clocks[1].label};
      c.tasks.push_back(t);
    }
  }

  if (root.contains("outputs")) {
    const auto& oj = root["outputs"];
    if (r.object(oj, "outputs")) {
      r.allow_keys(oj, "outputs", {"directory", "formats"});
      r.get(oj, "outputs", "directory", c.outputs.directory);
      r.get(oj, "outputs", "formats", c.outputs.formats);
      for (std::size_t k = 0; k < c.outputs.formats.size(); ++k)
        if (c.outputs.formats[k] != "csv" && c.outputs.formats[k] != "json")
          r.fail("outputs.formats." + std::to_string(k), "expected csv or json");
    }
  }

  std::vector<Diagnostic> warn;
  if (r.errors.empty()) detail::validate_semantics(c, r, warn);
  if (!r.errors.empty()) throw ConfigError(ConfigError::Kind::Validation, r.errors);
  if (warnings) *warnings = std::move(warn);
  return c;
}

/// Parses and validates JSON text; throws ConfigError listing every problem.
inline ExperimentConfig parse_config(std::string_view text, std::vector<Diagnostic>* warnings = nullptr) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(ConfigError::Kind::Syntax, {{"", e.what()}});
  }
  return config_from_json(root, warnings);
}

}  // namespace pawclock::experiment
