// Command-line front end: run / verify / presets / sweep.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pawclock/experiment/presets.hpp"
#include "pawclock/experiment/runner.hpp"

namespace fs = std::filesystem;
using namespace pawclock;
using namespace pawclock::experiment;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Common {
  std::string config;
  std::string out;
  double tol_scale = 1.0;
  std::int64_t seed = -1;
};

/// A path to a JSON file, or the name of a built-in preset.
std::string load_text(const std::string& source) {
  if (fs::is_regular_file(source)) {
    std::ifstream f(source, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }
  if (const Preset* p = find_preset(source)) return p->text;
  throw ConfigError(ConfigError::Kind::Syntax, {{"", "no such file or preset: " + source}});
}

fs::path output_dir(const Common& c, const ExperimentConfig& cfg) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv("PAWCLOCK_OUT"); env && *env) return env;
  return cfg.outputs.directory;
}

void print_warnings(const std::vector<Diagnostic>& w) {
  for (const auto& d : w) std::cerr << "warning: " << (d.path.empty() ? "<root>" : d.path) << ": " << d.message << "\n";
}

int execute(const ExperimentConfig& cfg, const std::vector<Diagnostic>& warnings, const Common& c, const fs::path& out) {
  RunOptions o;
  o.out_dir = out;
  o.tol_scale = c.tol_scale;
  if (c.seed >= 0) o.seed = static_cast<std::uint64_t>(c.seed);
  const auto report = run(cfg, o, warnings);
  for (const auto& t : report.tasks) {
    std::size_t passed = 0;
    for (const auto& k : t.checks) passed += k.passed;
    std::printf("[%02zu] %-22s %-7s %zu/%zu checks%s\n", t.index, t.name.c_str(), t.status.c_str(), passed,
                t.checks.size(), t.required ? "" : " (optional)");
    for (const auto& k : t.checks)
      if (!k.passed)
        std::printf("     FAIL %s: %s > %s\n", k.invariant.c_str(), format_number(k.value).c_str(),
                    format_number(k.tolerance).c_str());
    if (!t.error.empty()) std::printf("     %s\n", t.error.c_str());
  }
  std::printf("config %s (%s): exit %d, output %s\n", report.config_name.c_str(), report.config_hash.c_str(),
              report.exit_code(), out.string().c_str());
  return report.exit_code();
}

// "a.b.0.c" -> "/a/b/0/c"
nlohmann::json::json_pointer pointer_of(const std::string& path) {
  std::string p;
  std::stringstream ss(path);
  for (std::string seg; std::getline(ss, seg, '.');) {
    if (seg.empty()) throw ConfigError(ConfigError::Kind::Validation, {{path, "empty path segment"}});
    p += "/" + seg;
  }
  return nlohmann::json::json_pointer(p);
}

std::vector<Json> parse_values(const std::string& list) {
  std::vector<Json> out;
  std::stringstream ss(list);
  for (std::string v; std::getline(ss, v, ',');) {
    const auto b = v.find_first_not_of(' '), e = v.find_last_not_of(' ');
    v = b == std::string::npos ? "" : v.substr(b, e - b + 1);
    if (v.empty()) continue;
    try {
      out.push_back(Json::parse(v));
    } catch (const nlohmann::json::parse_error&) {
      out.emplace_back(v);
    }
  }
  return out;
}

std::string dir_name(const std::string& param, const Json& v) {
  std::string s = param + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
  for (char& ch : s)
    if (ch == '/' || ch == '\\' || ch == ' ' || ch == '"') ch = '_';
  return s;
}

int worse(int a, int b) {
  auto rank = [](int x) { return x == kExitConfig ? 3 : x == kExitRuntime ? 2 : x; };
  return rank(a) >= rank(b) ? a : b;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pawclock: Page-Wootters clock experiments"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common c;
  auto add_common = [&](CLI::App* s) {
    s->add_option("config", c.config, "config file, or a preset name")->required();
    s->add_option("--out", c.out, "output directory (overrides PAWCLOCK_OUT and the config)");
    s->add_option("--tol-scale", c.tol_scale, "multiply every tolerance")->check(CLI::PositiveNumber);
    s->add_option("--seed", c.seed, "seed for the random universes of verify")->check(CLI::NonNegativeNumber);
  };
  auto* run_cmd = app.add_subcommand("run", "execute every task of a config");
  add_common(run_cmd);
  auto* verify_cmd = app.add_subcommand("verify", "run the invariant suite for a config");
  add_common(verify_cmd);
  auto* sweep_cmd = app.add_subcommand("sweep", "rerun a config for each value of one key");
  add_common(sweep_cmd);
  std::string param, values;
  sweep_cmd->add_option("--param", param, "dotted key path, e.g. couplings.A.B")->required();
  sweep_cmd->add_option("--values", values, "comma-separated values")->required();
  auto* presets_cmd = app.add_subcommand("presets", "list built-in configs");
  std::string emit;
  presets_cmd->add_option("--emit", emit, "print the named preset's config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (presets_cmd->parsed()) {
      if (emit.empty()) {
        for (const auto& p : presets()) std::printf("%-26s %s\n", p.name.c_str(), p.summary.c_str());
        return 0;
      }
      const Preset* p = find_preset(emit);
      if (!p) {
        std::cerr << "unknown preset '" << emit << "'\n";
        return kExitConfig;
      }
      std::cout << p->text;
      return 0;
    }

    const std::string text = load_text(c.config);
    if (sweep_cmd->parsed()) {
      Json root;
      try {
        root = Json::parse(text);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(ConfigError::Kind::Syntax, {{"", e.what()}});
      }
      const auto ptr = pointer_of(param);
      const auto vals = parse_values(values);
      if (vals.empty()) throw ConfigError(ConfigError::Kind::Validation, {{"--values", "no values given"}});
      // validate every point before running any
      std::vector<std::pair<ExperimentConfig, std::vector<Diagnostic>>> points;
      for (const auto& v : vals) {
        Json j = root;
        j[ptr] = v;
        std::vector<Diagnostic> w;
        points.emplace_back(config_from_json(j, &w), std::move(w));
      }
      int code = 0;
      const fs::path base = output_dir(c, points.front().first);
      for (std::size_t k = 0; k < vals.size(); ++k) {
        std::printf("== %s = %s\n", param.c_str(), vals[k].dump().c_str());
        print_warnings(points[k].second);
        code = worse(code, execute(points[k].first, points[k].second, c, base / dir_name(param, vals[k])));
      }
      return code;
    }

    std::vector<Diagnostic> warnings;
    auto cfg = parse_config(text, &warnings);
    print_warnings(warnings);
    if (verify_cmd->parsed()) {
      // keep the config's own verify settings if it has any
      TaskSpec v;
      v.name = "verify";
      for (const auto& t : cfg.tasks)
        if (t.name == "verify") v = t;
      v.required = true;
      cfg.tasks = {v};
    }
    return execute(cfg, warnings, c, output_dir(c, cfg));
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
