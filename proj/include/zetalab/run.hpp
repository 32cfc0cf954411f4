#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "zetalab/common.hpp"

namespace zetalab::run {

inline constexpr int kConfigVersion = 1;

enum class Command { kApproximate, kDoubling, kZeroScan, kCube, kHardySelftest, kVolume };

const char* command_name(Command c);

// Schema or usage problem; maps to exit code 1.
struct ConfigError : DomainError {
  using DomainError::DomainError;
};

struct RunConfig {
  Command command = Command::kVolume;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string output_path;  // empty: $ZETALAB_OUT, then "."
};

// {"version": 1, "command": "...", "params": {...}, "seed": n, "threads": n,
//  "output_path": "..."}. Unknown keys, unknown params and wrong types are
// rejected with a ConfigError naming the offending key. Missing params take
// their defaults, which are written back so the config is complete.
RunConfig parse_config(const nlohmann::ordered_json& j);
RunConfig parse_config_text(const std::string& text);

// Defaults for every parameter of a command.
nlohmann::ordered_json default_params(Command c);

// Canonical form: version, command, params (complete), seed, threads.
// output_path is left out so the same experiment hashes the same anywhere.
nlohmann::ordered_json canonical(const RunConfig& c);
std::string config_hash(const RunConfig& c);

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunOutcome {
  int exit_code = 0;                   // 0 ok, 2 some bound assertion failed
  std::vector<std::string> files;      // written, relative to the output dir
  std::vector<Assertion> assertions;
  nlohmann::ordered_json summary;      // also printed by the CLI
};

// Runs the command and writes its artifacts plus run.json (config, hash,
// seed, assertions) into the output directory.
RunOutcome run(const RunConfig& config);

struct SelftestReport {
  std::vector<Assertion> checks;
  std::size_t stated_delta_violations = 0;  // against pi R^2 e^{-x/2}, reported only
  std::size_t stated_delta_points = 0;
  bool all_passed = false;
};

// Hardy-space invariants on `count` random elements of degree <= `degree`:
// closed-form norm and inner product against quadrature, monomial
// orthogonality, Delta closed form against quadrature and the Delta envelope.
SelftestReport hardy_selftest(std::size_t count, std::size_t degree, std::uint64_t seed,
                              unsigned threads = 1);

}  // namespace zetalab::run
