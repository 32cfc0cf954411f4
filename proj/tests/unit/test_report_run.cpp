#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "zetalab/cube_dynamics.hpp"
#include "zetalab/report.hpp"
#include "zetalab/run.hpp"

using namespace zetalab;
using json = nlohmann::ordered_json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("zetalab_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(report::num(0.1) == "0.10000000000000001");
  CHECK(report::num(2.0) == "2");
  CHECK(std::stod(report::num(-1.2345678901234567e-300)) == -1.2345678901234567e-300);
  CHECK(report::num(std::nan("")) == "nan");
  CHECK(report::num(-HUGE_VAL) == "-inf");
  CHECK(std::stod(report::num(0.31606027941427883)) == 0.31606027941427883);
}

TEST_CASE("csv") {
  report::Table t{{"a", "b"}, {}};
  CHECK(report::to_csv(t) == "a,b\r\n");
  t.rows.push_back({"1", "x,y"});
  t.rows.push_back({"say \"hi\"", "line\nbreak"});
  CHECK(report::to_csv(t) == "a,b\r\n1,\"x,y\"\r\n\"say \"\"hi\"\"\",\"line\nbreak\"\r\n");

  CHECK(report::to_csv(report::scan_table({})) ==
        "t,r,m,margin,count_zeta,count_product,stage_count,seed\r\n");
  universality::DoublingSchedule sched;
  CHECK(report::to_csv(report::doubling_table(sched)) == "stage,y_k,m_k,stage_error,bound\r\n");
  universality::Stage st;
  st.k = 1;
  st.y_k = 2000.0;
  st.m_k = 1999;
  st.stage_error = 0.5;
  st.bound = 0.25;
  sched.stages.push_back(st);
  CHECK(report::to_csv(report::doubling_table(sched)) ==
        "stage,y_k,m_k,stage_error,bound\r\n1,2000,1999,0.5,0.25\r\n");
}

TEST_CASE("fnv1a") {
  // Published FNV-1a 64 test vectors
  CHECK(report::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(report::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(report::fnv1a("foobar") == 0x85944171f73967e8ULL);
  CHECK(report::hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("io errors carry the path") {
  try {
    report::write_text("/proc/zetalab_nope/out.csv", "x");
    FAIL("expected IoError");
  } catch (const report::IoError& e) {
    CHECK(std::string(e.what()).find("/proc/zetalab_nope") != std::string::npos);
  }
}

TEST_CASE("config schema") {
  const auto c = run::parse_config_text(R"({"version":1,"command":"volume","params":{"N":3.0}})");
  CHECK(c.command == run::Command::kVolume);
  CHECK(c.params["N"] == 3);
  CHECK(c.params["u"] == 0.5);
  CHECK(c.seed == 1);
  CHECK(c.threads == 1);

  CHECK_THROWS_AS(run::parse_config_text("{"), run::ConfigError);
  CHECK_THROWS_AS(run::parse_config_text(R"({"command":"volume"})"), run::ConfigError);
  CHECK_THROWS_AS(run::parse_config_text(R"({"version":2,"command":"volume"})"), run::ConfigError);
  CHECK_THROWS_AS(run::parse_config_text(R"({"version":1,"command":"plot"})"), run::ConfigError);
  CHECK_THROWS_AS(run::parse_config_text(R"({"version":1,"command":"volume","extra":1})"), run::ConfigError);
  CHECK_THROWS_AS(run::parse_config_text(R"({"version":1,"command":"volume","params":{"M":1}})"),
                  run::ConfigError);
  CHECK_THROWS_AS(run::parse_config_text(R"({"version":1,"command":"volume","params":{"N":2.5}})"),
                  run::ConfigError);
  CHECK_THROWS_AS(run::parse_config_text(R"({"version":1,"command":"volume","params":{"u":"x"}})"),
                  run::ConfigError);
  CHECK_THROWS_AS(run::parse_config_text(R"({"version":1,"command":"volume","threads":0})"), run::ConfigError);
  CHECK_THROWS_AS(run::parse_config_text(R"({"version":1,"command":"volume","seed":-1})"), run::ConfigError);

  // Every command's defaults pass the schema.
  for (const char* cmd : {"approximate", "doubling", "zero-scan", "cube", "hardy-selftest", "volume"}) {
    json j = {{"version", 1}, {"command", cmd}};
    CHECK_NOTHROW(run::parse_config(j));
  }
}

TEST_CASE("config hash") {
  auto a = run::parse_config_text(R"({"version":1,"command":"volume","output_path":"/x"})");
  auto b = run::parse_config_text(R"({"version":1,"command":"volume","params":{"u":0.5},"output_path":"/y"})");
  CHECK(run::config_hash(a) == run::config_hash(b));
  b.seed = 2;
  CHECK(run::config_hash(a) != run::config_hash(b));
}

TEST_CASE("volume run is byte-reproducible") {
  const auto dir = scratch("volume");
  auto c = run::parse_config_text(R"({"version":1,"command":"volume","params":{"N":2,"u":0.5}})");
  c.output_path = dir.string();
  const auto out = run::run(c);
  CHECK(out.exit_code == 0);
  CHECK(out.summary["volume"].get<double>() == doctest::Approx(0.3160602794142788).epsilon(1e-15));
  REQUIRE(out.files == std::vector<std::string>{"volume.json", "run.json"});
  const auto first = slurp(dir / "volume.json");
  const auto manifest = slurp(dir / "run.json");
  CHECK(first.find(run::config_hash(c)) != std::string::npos);
  run::run(c);
  CHECK(slurp(dir / "volume.json") == first);
  CHECK(slurp(dir / "run.json") == manifest);
  std::filesystem::remove_all(dir);
}

TEST_CASE("selftest passes and reports the stated Delta bound separately") {
  const auto rep = run::hardy_selftest(20, 10, 5);
  CHECK(rep.all_passed);
  CHECK(rep.stated_delta_points == 20 * 201);
  // The stated bound fails near x = 0 for small radii (see hardy tests).
  CHECK(rep.stated_delta_violations > 0);
  const auto again = run::hardy_selftest(20, 10, 5, 3);
  CHECK(again.stated_delta_violations == rep.stated_delta_violations);
}

TEST_CASE("exit code 2 iff a bound assertion fails") {
  const auto dir = scratch("cube");
  std::filesystem::create_directories(dir);
  // A sphere centred on the curve itself breaks the 6 c mu comparison.
  const auto centre = cube::curve_point(0.3, 10);
  json fam = {{"dim", 10}, {"spheres", json::array({{{"center", centre.coords()}, {"radius", 0.05}}})}};
  {
    std::ofstream f(dir / "on_curve.json");
    f << fam.dump();
  }
  json cfg = {{"version", 1},
              {"command", "cube"},
              {"params", {{"spheres_file", (dir / "on_curve.json").string()}, {"samples", 20000}}},
              {"output_path", dir.string()}};
  CHECK(run::run(run::parse_config(cfg)).exit_code == 2);

  cfg["params"] = {{"samples", 20000}, {"random_count", 2}, {"random_radius", 0.05}};
  CHECK(run::run(run::parse_config(cfg)).exit_code == 0);

  // Numeric precondition failures are usage errors, not bound failures.
  json bad = {{"version", 1}, {"command", "approximate"}, {"params", {{"r", 0.3}}}, {"output_path", dir.string()}};
  CHECK_THROWS_AS(run::run(run::parse_config(bad)), run::ConfigError);
  std::filesystem::remove_all(dir);
}
