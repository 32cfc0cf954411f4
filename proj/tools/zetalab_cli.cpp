// zetalab command-line front end.
//
//   zetalab <command> [--config FILE] [--seed N] [--threads N] [--out DIR] [--<param> VALUE]...
//   zetalab run --config FILE
//
// Exit status: 0 success, 1 usage or configuration error, 2 a bound assertion failed.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "zetalab/report.hpp"
#include "zetalab/run.hpp"

using json = nlohmann::ordered_json;
using namespace zetalab;

namespace {

std::string dashed(std::string s) {
  for (auto& c : s)
    if (c == '_') c = '-';
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw run::ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Flag text -> JSON of the same kind as the default.
json convert(const std::string& key, const json& def, const std::string& text) {
  try {
    if (def.is_string()) return text;
    if (def.is_boolean()) return text == "1" || text == "true";
    if (def.is_array()) {
      json a = json::array();
      std::stringstream ss(text);
      std::string tok;
      while (std::getline(ss, tok, ','))
        if (!tok.empty()) a.push_back(std::stod(tok));
      return a;
    }
    std::size_t used = 0;
    if (def.is_number_integer()) {
      const long long v = std::stoll(text, &used);
      if (used == text.size()) return v;
    } else {
      const double v = std::stod(text, &used);
      if (used == text.size()) return v;
    }
  } catch (const std::exception&) {
  }
  throw run::ConfigError("--" + dashed(key) + ": cannot parse '" + text + "'");
}

struct Sub {
  run::Command command;
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;  // param key -> flag text
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zetalab: effective universality experiments for the Riemann zeta function"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::vector<Sub> subs;
  subs.reserve(7);

  auto add_common = [&](CLI::App* sc) {
    sc->add_option("--config", config_path, "JSON run configuration");
    sc->add_option("--seed", seed, "RNG seed (default 1)");
    sc->add_option("--threads", threads, "worker threads (default 1)")->check(CLI::PositiveNumber);
    sc->add_option("--out", out_dir, "output directory (default $ZETALAB_OUT or .)");
  };

  for (auto c : {run::Command::kApproximate, run::Command::kDoubling, run::Command::kZeroScan,
                 run::Command::kCube, run::Command::kHardySelftest, run::Command::kVolume}) {
    subs.push_back({c, nullptr, {}});
  }
  for (auto& s : subs) {
    s.app = app.add_subcommand(run::command_name(s.command));
    add_common(s.app);
    const json defs = run::default_params(s.command);
    for (const auto& [key, def] : defs.items()) {
      std::string help = "default " + def.dump();
      s.app->add_option("--" + dashed(key), s.values[key], help);
    }
  }
  auto* run_sc = app.add_subcommand("run", "run the command named in --config");
  add_common(run_sc);
  run_sc->get_option("--config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    json cfg = json::object();
    if (!config_path.empty()) {
      try {
        cfg = json::parse(read_file(config_path));
      } catch (const json::exception& e) {
        throw run::ConfigError("config " + config_path + ": " + e.what());
      }
      if (!cfg.is_object()) throw run::ConfigError("config " + config_path + ": top level must be an object");
    }
    cfg["version"] = cfg.value("version", run::kConfigVersion);

    const Sub* chosen = nullptr;
    for (const auto& s : subs)
      if (s.app->parsed()) chosen = &s;
    if (chosen) {
      const std::string name = run::command_name(chosen->command);
      if (cfg.contains("command") && cfg["command"] != name)
        throw run::ConfigError("config command '" + cfg["command"].get<std::string>() + "' does not match '" + name + "'");
      cfg["command"] = name;
      const json defs = run::default_params(chosen->command);
      for (const auto& [key, text] : chosen->values) {
        if (text.empty()) continue;
        cfg["params"][key] = convert(key, defs[key], text);
      }
    } else if (!cfg.contains("command")) {
      throw run::ConfigError("config " + config_path + ": missing 'command'");
    }
    if (seed) cfg["seed"] = *seed;
    if (threads) cfg["threads"] = *threads;
    if (!out_dir.empty()) cfg["output_path"] = out_dir;

    const auto config = run::parse_config(cfg);
    const auto outcome = run::run(config);
    std::cout << outcome.summary.dump(2) << "\n";
    for (const auto& a : outcome.assertions) {
      if (!a.passed) std::cerr << "bound assertion failed: " << a.name << " (" << a.detail << ")\n";
    }
    return outcome.exit_code;
  } catch (const run::ConfigError& e) {
    std::cerr << "zetalab: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "zetalab: " << e.what() << "\n";
    return 1;
  }
}
