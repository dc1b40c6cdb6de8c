#pragma once

// Built-in reference configs. Each is stored as JSON text so that
// `presets --emit` prints exactly what `run` would parse.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pawclock/experiment/config.hpp"

namespace pawclock::experiment {

struct Preset {
  std::string name;
  std::string summary;
  std::string text;
};

inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> all{
      {"two-level-clock", "one spin clock, system H_S = -sigma_x, paired history",
       R"({
  "name": "two-level-clock",
  "clocks": [{"label": "C", "kind": "spin", "omega": 1.0}],
  "system": {"preset": "sigma_x", "scale": -1.0},
  "constraint": {"rule": "energy-paired"},
  "grid": {"start": 0.0, "nodes": 64, "periods": 1.0},
  "tasks": [
    {"name": "conditional-trace", "scope": "global", "observables": ["sigma_z@S", "sigma_x@S"]},
    {"name": "amplitude-profile", "scope": "global"},
    {"name": "resolution", "resolution": "discrete-orthonormal"},
    {"name": "verify"}
  ],
  "outputs": {"directory": "two-level-clock", "formats": ["csv", "json"]}
}
)"},
      {"two-spin-noninteracting", "spin clocks A (omega) and B (omega/2), no coupling",
       R"({
  "name": "two-spin-noninteracting",
  "clocks": [
    {"label": "A", "kind": "spin", "omega": 1.0},
    {"label": "B", "kind": "spin", "omega": 0.5}
  ],
  "coupling_units": "dimensionless",
  "couplings": {"A": {"B": 0.0}},
  "interaction": "none",
  "system": {"preset": "matched", "levels": [0, 1, 2, 3], "seed": 1},
  "constraint": {"rule": "energy-paired"},
  "grid": {"start": 0.0, "nodes": 64, "periods": 1.0},
  "tasks": [
    {"name": "amplitude-profile", "scope": "global"},
    {"name": "conditional-trace", "scope": "A", "observables": ["sigma_x@B"]},
    {"name": "transition-amplitude", "nodes": 16},
    {"name": "resolution", "resolution": "discrete-orthonormal"},
    {"name": "verify"}
  ],
  "outputs": {"directory": "two-spin-noninteracting", "formats": ["csv", "json"]}
}
)"},
      {"two-spin-tidit", "two spin clocks with gravitational-like coupling g, sweepable",
       R"({
  "name": "two-spin-tidit",
  "clocks": [
    {"label": "A", "kind": "spin", "omega": 1.0},
    {"label": "B", "kind": "spin", "omega": 0.5}
  ],
  "coupling_units": "dimensionless",
  "couplings": {"A": {"B": 0.3}},
  "system": {"preset": "matched", "levels": [3, 0], "seed": 5},
  "constraint": {"rule": "energy-paired"},
  "grid": {"start": 0.0, "nodes": 128, "periods": 1.0},
  "tasks": [
    {"name": "tidit", "clock": "A", "mode": "exact"},
    {"name": "tidit-sweep", "clock": "A", "mode": "exact", "pair": ["A", "B"],
     "g_values": [0.0, 0.3, 0.9, 1.0, 1.5]},
    {"name": "amplitude-profile", "scope": "A"},
    {"name": "verify"}
  ],
  "outputs": {"directory": "two-spin-tidit", "formats": ["csv", "json"]}
}
)"},
      {"three-spin-network", "three spin clocks, A coupled to B and C",
       R"({
  "name": "three-spin-network",
  "clocks": [
    {"label": "A", "kind": "spin", "omega": 1.0},
    {"label": "B", "kind": "spin", "omega": 0.75},
    {"label": "C", "kind": "spin", "omega": 0.5}
  ],
  "coupling_units": "dimensionless",
  "couplings": {"A": {"B": 0.2, "C": 0.1}},
  "system": {"preset": "matched", "levels": [7, 0], "seed": 3},
  "constraint": {"rule": "energy-paired"},
  "grid": {"start": 0.0, "nodes": 128, "periods": 1.0},
  "tasks": [
    {"name": "tidit", "clock": "A", "mode": "series"},
    {"name": "amplitude-profile", "scope": "global"},
    {"name": "verify"}
  ],
  "outputs": {"directory": "three-spin-network", "formats": ["csv", "json"]}
}
)"},
  };
  return all;
}

inline const Preset* find_preset(std::string_view name) {
  for (const auto& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

inline ExperimentConfig preset_config(std::string_view name) {
  const Preset* p = find_preset(name);
  if (!p) throw ConfigError(ConfigError::Kind::Validation, {{"", "unknown preset '" + std::string(name) + "'"}});
  return parse_config(p->text);
}

}  // namespace pawclock::experiment
