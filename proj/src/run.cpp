#include "zetalab/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "zetalab/cube_dynamics.hpp"
#include "zetalab/hardy_space.hpp"
#include "zetalab/parallel.hpp"
#include "zetalab/quadrature.hpp"
#include "zetalab/report.hpp"
#include "zetalab/rng.hpp"
#include "zetalab/universality_search.hpp"
#include "zetalab/zero_census.hpp"

namespace zetalab::run {

using json = nlohmann::ordered_json;

namespace {

struct CommandInfo {
  Command c;
  const char* name;
};

constexpr CommandInfo kCommands[] = {
    {Command::kApproximate, "approximate"}, {Command::kDoubling, "doubling"},
    {Command::kZeroScan, "zero-scan"},      {Command::kCube, "cube"},
    {Command::kHardySelftest, "hardy-selftest"}, {Command::kVolume, "volume"},
};

Command command_from(const std::string& s) {
  for (const auto& ci : kCommands)
    if (s == ci.name) return ci.c;
  throw ConfigError("unknown command '" + s + "'");
}

bool same_kind(const json& def, const json& v) {
  if (def.is_number_integer()) return v.is_number_integer() || (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>());
  if (def.is_number()) return v.is_number();
  if (def.is_string()) return v.is_string();
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_array()) return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); });
  return false;
}

template <class T>
T get(const json& p, const char* key) {
  return p.at(key).get<T>();
}

std::filesystem::path out_dir(const RunConfig& c) {
  if (!c.output_path.empty()) return c.output_path;
  if (const char* env = std::getenv("ZETALAB_OUT"); env && *env) return env;
  return ".";
}

Assertion check(std::string name, bool ok, std::string detail = {}) {
  return {std::move(name), ok, std::move(detail)};
}

// const:a | const:a,b | exp:a | linear:a,b   (disc coordinates)
universality::Target parse_target(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("target: expected kind:args, got '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  std::vector<double> a;
  std::stringstream ss(spec.substr(colon + 1));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      a.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("target: bad number '" + tok + "'");
    }
  }
  if (kind == "const" && (a.size() == 1 || a.size() == 2)) {
    const cplx v(a[0], a.size() == 2 ? a[1] : 0.0);
    return [v](cplx) { return v; };
  }
  if (kind == "exp" && a.size() == 1) {
    const double k = a[0];
    return [k](cplx s) { return std::exp(k * s); };
  }
  if (kind == "linear" && a.size() == 2) {
    const double c0 = a[0], c1 = a[1];
    return [c0, c1](cplx s) { return c0 + c1 * s; };
  }
  throw ConfigError("target: unknown form '" + spec + "' (const:a[,b], exp:a, linear:a,b)");
}

json wrap(const RunConfig& c, json result) {
  json j;
  j["config_hash"] = config_hash(c);
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["result"] = std::move(result);
  return j;
}

void emit_json(const std::filesystem::path& dir, const std::string& name, const json& j,
               RunOutcome& out) {
  report::write_text(dir / name, j.dump(2) + "\n");
  out.files.push_back(name);
}

void emit_csv(const std::filesystem::path& dir, const std::string& name, const report::Table& t,
              RunOutcome& out) {
  report::write_text(dir / name, report::to_csv(t));
  out.files.push_back(name);
}

universality::DoublingOptions scheme_from(const json& p, const RunConfig& c) {
  universality::DoublingOptions d;
  d.y0 = get<double>(p, "y0");
  d.K = get<int>(p, "K");
  d.r = get<double>(p, "r");
  d.delta = get<double>(p, "delta");
  d.restarts = get<int>(p, "restarts");
  d.safety = get<double>(p, "safety");
  d.pool_limit = get<std::uint64_t>(p, "pool_limit");
  d.max_terms = get<std::size_t>(p, "max_terms");
  d.seed = c.seed;
  d.threads = c.threads;
  return d;
}

void run_approximate(const RunConfig& c, const std::filesystem::path& dir, RunOutcome& out) {
  const auto& p = c.params;
  const auto g = parse_target(get<std::string>(p, "target"));
  universality::DiscOptions o;
  o.pool_limit = get<std::uint64_t>(p, "pool_limit");
  o.degree = get<std::size_t>(p, "degree");
  o.dft_samples = std::max<std::size_t>(256, 4 * o.degree);
  o.t = get<double>(p, "t");
  o.greedy.max_terms = get<std::size_t>(p, "max_terms");
  o.threads = c.threads;
  const double eps = get<double>(p, "eps");
  const auto res = universality::approximate_on_disc(g, get<double>(p, "r"), get<double>(p, "y"), eps, o);
  emit_json(dir, "approximate.json", wrap(c, json::parse(universality::to_json(res))), out);
  out.assertions.push_back(check("sup_error_within_eps", res.success,
                                 "sup_error=" + report::num(res.sup_error) + " eps=" + report::num(eps)));
  out.summary = {{"sup_error", res.sup_error}, {"eps", eps}, {"terms", res.primes.size()},
                 {"status", universality::status_name(res.status)}};
}

void run_doubling(const RunConfig& c, const std::filesystem::path& dir, RunOutcome& out) {
  auto d = scheme_from(c.params, c);
  d.eps = get<double>(c.params, "eps");
  d.t = get<double>(c.params, "t");
  const auto sched = universality::doubling_scheme(d);
  emit_csv(dir, "doubling.csv", report::doubling_table(sched), out);
  emit_json(dir, "doubling.json", wrap(c, json::parse(universality::to_json(sched))), out);
  bool decreasing = true;
  for (std::size_t k = 1; k < sched.stages.size(); ++k)
    decreasing = decreasing && sched.stages[k].bound < sched.stages[k - 1].bound;
  out.assertions.push_back(check("bound_strictly_decreasing", decreasing));
  json errs = json::array();
  for (const auto& st : sched.stages) {
    out.assertions.push_back(check("stage_" + std::to_string(st.k) + "_within_bound", st.within,
                                   "stage_error=" + report::num(st.stage_error) +
                                       " limit=" + report::num(sched.safety * st.bound)));
    errs.push_back(st.stage_error);
  }
  out.summary = {{"eps", sched.eps}, {"eps_min", sched.eps_min}, {"stage_errors", errs},
                 {"all_within", sched.all_within}};
}

void run_zero_scan(const RunConfig& c, const std::filesystem::path& dir, RunOutcome& out) {
  const auto& p = c.params;
  std::vector<double> ts = get<std::vector<double>>(p, "t");
  if (ts.empty()) {
    const auto n = get<std::size_t>(p, "count");
    const double lo = get<double>(p, "t_min"), hi = get<double>(p, "t_max");
    for (std::size_t i = 0; i < n; ++i)
      ts.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  census::ScanOptions o;
  o.scheme = scheme_from(p, c);
  o.scheme.eps = 0.0;
  o.samples = get<std::size_t>(p, "samples");
  o.threads = c.threads;
  const auto rows = census::strip_scan(ts, get<double>(p, "r"), o);
  emit_csv(dir, "zero_scan.csv", report::scan_table(rows), out);

  std::size_t transfer_bad = 0, nonzero_product = 0, failed = 0, positive = 0, criterion = 0;
  json notes = json::array();
  for (const auto& r : rows) {
    if (!r.note.empty()) {
      ++failed;
      notes.push_back({{"t", r.t}, {"note", r.note}});
    }
    if (r.margin > 0.0) ++positive;
    if (r.criterion) ++criterion;
    if (!r.transfer_ok) ++transfer_bad;
    if (r.count_product > 0) ++nonzero_product;
  }
  out.assertions.push_back(check("rouche_transfer", transfer_bad == 0,
                                 std::to_string(transfer_bad) + " rows with margin > 0 and unequal counts"));
  out.assertions.push_back(check("product_zero_free", nonzero_product == 0,
                                 std::to_string(nonzero_product) + " rows with product winding > 0"));
  out.summary = {{"rows", rows.size()},          {"positive_margin", positive},
                 {"criterion_rows", criterion},  {"failed_rows", failed},
                 {"transfer_violations", transfer_bad}, {"notes", notes}};
}

void run_cube(const RunConfig& c, const std::filesystem::path& dir, RunOutcome& out) {
  const auto& p = c.params;
  cube::HittingOptions o;
  o.N = get<std::size_t>(p, "N");
  o.samples = get<std::uint64_t>(p, "samples");
  o.seed = c.seed;
  o.threads = c.threads;
  cube::SphereFamily fam;
  const auto file = get<std::string>(p, "spheres_file");
  if (!file.empty()) {
    fam = cube::load_spheres_file(file);
  } else {
    fam.dim = o.N;
    const CounterRng rng = CounterRng(c.seed).substream(7);
    const auto count = get<std::size_t>(p, "random_count");
    const double radius = get<double>(p, "random_radius");
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<double> x(o.N);
      for (std::size_t n = 0; n < o.N; ++n) x[n] = rng.uniform(i, n);
      fam.spheres.push_back({cube::CubePoint(std::move(x)), radius});
    }
  }
  if (fam.dim != o.N) throw ConfigError("cube: sphere dimension " + std::to_string(fam.dim) + " != N");
  const auto est = cube::hitting_measure_mc(fam, o);
  json r = {{"N", o.N},
            {"spheres", fam.spheres.size()},
            {"samples", est.samples},
            {"hits", est.hits},
            {"estimate", est.estimate},
            {"stderr", est.stderr_},
            {"sphere_measure", est.sphere_measure},
            {"sphere_measure_stderr", est.sphere_measure_stderr},
            {"c", est.c},
            {"bound", est.bound},
            {"within_bound", est.within_bound}};
  emit_json(dir, "cube.json", wrap(c, r), out);
  out.assertions.push_back(check("hitting_within_6c_mu", est.within_bound,
                                 "estimate=" + report::num(est.estimate) + " bound=" + report::num(est.bound)));
  out.summary = r;
}

void run_selftest(const RunConfig& c, const std::filesystem::path& dir, RunOutcome& out) {
  const auto rep = hardy_selftest(get<std::size_t>(c.params, "count"), get<std::size_t>(c.params, "degree"),
                                  c.seed, c.threads);
  json checks = json::array();
  for (const auto& a : rep.checks) {
    checks.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
    out.assertions.push_back(a);
  }
  json r = {{"checks", checks},
            {"stated_delta_bound_points", rep.stated_delta_points},
            {"stated_delta_bound_violations", rep.stated_delta_violations},
            {"all_passed", rep.all_passed}};
  emit_json(dir, "hardy_selftest.json", wrap(c, r), out);
  out.summary = {{"all_passed", rep.all_passed},
                 {"stated_delta_bound_violations", rep.stated_delta_violations}};
}

void run_volume(const RunConfig& c, const std::filesystem::path& dir, RunOutcome& out) {
  const auto N = get<std::size_t>(c.params, "N");
  const double u = get<double>(c.params, "u");
  const double v = cube::weighted_box_volume(u, N);
  json r = {{"N", N}, {"u", u}, {"volume", v}};
  emit_json(dir, "volume.json", wrap(c, r), out);
  out.summary = r;
}

}  // namespace

const char* command_name(Command c) {
  for (const auto& ci : kCommands)
    if (ci.c == c) return ci.name;
  return "?";
}

json default_params(Command c) {
  const json scheme = {{"y0", 1000.0}, {"K", 4},     {"r", 0.1},       {"delta", 0.05},
                       {"restarts", 8}, {"safety", 2.0}, {"pool_limit", 100000}, {"max_terms", 4000}};
  switch (c) {
    case Command::kApproximate:
      return {{"target", "const:2"}, {"r", 0.05},     {"eps", 0.1},       {"y", 0.0},
              {"t", 0.0},            {"pool_limit", 100000}, {"degree", 64}, {"max_terms", 4000}};
    case Command::kDoubling: {
      json j = scheme;
      j["eps"] = 0.0;
      j["t"] = 0.0;
      return j;
    }
    case Command::kZeroScan: {
      json j = scheme;
      j["y0"] = 100.0;
      j["K"] = 1;
      j["pool_limit"] = 5000;
      j["max_terms"] = 300;
      j["restarts"] = 2;
      j["t"] = json::array();
      j["t_min"] = 0.0;
      j["t_max"] = 49.0;
      j["count"] = 50;
      j["samples"] = 128;
      return j;
    }
    case Command::kCube:
      return {{"N", 10}, {"samples", 100000}, {"spheres_file", ""}, {"random_count", 4}, {"random_radius", 0.3}};
    case Command::kHardySelftest:
      return {{"count", 100}, {"degree", 10}};
    case Command::kVolume:
      return {{"N", 2}, {"u", 0.5}};
  }
  return json::object();
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k != "version" && k != "command" && k != "params" && k != "seed" && k != "threads" &&
        k != "output_path")
      throw ConfigError("config: unknown key '" + k + "'");
  }
  if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != kConfigVersion)
    throw ConfigError("config: 'version' must be " + std::to_string(kConfigVersion));
  if (!j.contains("command") || !j["command"].is_string()) throw ConfigError("config: 'command' must be a string");
  RunConfig c;
  c.command = command_from(j["command"].get<std::string>());
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("config: 'seed' must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("threads")) {
    if (!j["threads"].is_number_unsigned() || j["threads"].get<unsigned>() < 1)
      throw ConfigError("config: 'threads' must be a positive integer");
    c.threads = j["threads"].get<unsigned>();
  }
  if (j.contains("output_path")) {
    if (!j["output_path"].is_string()) throw ConfigError("config: 'output_path' must be a string");
    c.output_path = j["output_path"].get<std::string>();
  }
  c.params = default_params(c.command);
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError("config: 'params' must be an object");
    for (const auto& [k, v] : j["params"].items()) {
      if (!c.params.contains(k))
        throw ConfigError(std::string("config: unknown parameter '") + k + "' for " + command_name(c.command));
      if (!same_kind(c.params[k], v))
        throw ConfigError("config: parameter '" + k + "' has the wrong type");
      c.params[k] = c.params[k].is_number_integer() && v.is_number_float()
                        ? json(static_cast<std::int64_t>(v.get<double>()))
                        : v;
    }
  }
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

json canonical(const RunConfig& c) {
  return {{"version", kConfigVersion},
          {"command", command_name(c.command)},
          {"params", c.params},
          {"seed", c.seed},
          {"threads", c.threads}};
}

std::string config_hash(const RunConfig& c) { return report::hex64(report::fnv1a(canonical(c).dump())); }

RunOutcome run(const RunConfig& config) {
  // Re-validate so hand-built configs go through the same schema.
  const RunConfig c = parse_config([&] {
    json j = canonical(config);
    j["output_path"] = config.output_path;
    return j;
  }());
  const auto dir = out_dir(c);
  RunOutcome out;
  try {
    switch (c.command) {
      case Command::kApproximate: run_approximate(c, dir, out); break;
      case Command::kDoubling: run_doubling(c, dir, out); break;
      case Command::kZeroScan: run_zero_scan(c, dir, out); break;
      case Command::kCube: run_cube(c, dir, out); break;
      case Command::kHardySelftest: run_selftest(c, dir, out); break;
      case Command::kVolume: run_volume(c, dir, out); break;
    }
  } catch (const report::IoError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    // Preconditions on numeric parameters are usage errors too.
    throw ConfigError(e.what());
  }
  out.exit_code = std::all_of(out.assertions.begin(), out.assertions.end(),
                              [](const Assertion& a) { return a.passed; })
                      ? 0
                      : 2;
  json asserts = json::array();
  for (const auto& a : out.assertions)
    asserts.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  json manifest = {{"config", canonical(c)},
                   {"config_hash", config_hash(c)},
                   {"seed", c.seed},
                   {"threads", c.threads},
                   {"files", out.files},
                   {"assertions", asserts},
                   {"exit_code", out.exit_code}};
  report::write_text(dir / "run.json", manifest.dump(2) + "\n");
  out.files.push_back("run.json");
  return out;
}

SelftestReport hardy_selftest(std::size_t count, std::size_t degree, std::uint64_t seed, unsigned threads) {
  using hardy::HardyElement;
  const CounterRng rng = CounterRng(seed).substream(11);
  struct One {
    double norm_rel = 0.0, inner_rel = 0.0, delta_rel = 0.0, envelope_excess = -1.0;
    std::size_t stated_viol = 0, stated_pts = 0;
  };
  auto element = [&](std::size_t i, std::uint64_t lane0, double R) {
    const std::size_t d = static_cast<std::size_t>(rng.uniform(i, lane0) * static_cast<double>(degree + 1));
    std::vector<cplx> scaled(std::min(d, degree) + 1);
    for (std::size_t n = 0; n < scaled.size(); ++n)
      scaled[n] = cplx(2.0 * rng.uniform(i, lane0 + 1 + 2 * n) - 1.0, 2.0 * rng.uniform(i, lane0 + 2 + 2 * n) - 1.0);
    auto f = HardyElement::from_scaled(R, scaled);
    const double nf = std::sqrt(hardy::norm_sq(f));
    return nf > 0.0 ? (1.0 / nf) * f : f;
  };
  std::vector<One> res(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const double R = 0.1 + 0.5 * rng.uniform(i, 0);
    const auto f = element(i, 100, R);
    const auto g = element(i, 200, R);
    const auto rule = quad::disc_rule(0.0, R, 16, 64);
    double nq = 0.0, iq = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const cplx fv = f(rule.nodes[k]), gv = g(rule.nodes[k]);
      nq += rule.weights[k] * std::norm(fv);
      iq += rule.weights[k] * (fv * std::conj(gv)).real();
    }
    One& o = res[i];
    const double nf = hardy::norm_sq(f);
    o.norm_rel = std::fabs(nf - nq) / nf;
    o.inner_rel = std::fabs(hardy::inner(f, g) - iq) / std::sqrt(nf * hardy::norm_sq(g));
    for (double x : {1.0, 5.0}) {
      const cplx a = hardy::delta_x(f, x), b = hardy::delta_x_quadrature(f, x);
      o.delta_rel = std::max(o.delta_rel, std::abs(a - b) / std::abs(b));
    }
    std::vector<double> xs;
    for (int k = 0; k <= 200; ++k) xs.push_back(0.1 * k);
    const auto dv = hardy::delta_x_many(f, xs);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double a = std::abs(dv[k]);
      const double env = std::sqrt(kPi) * R * std::exp(-xs[k] * (0.75 - R));
      o.envelope_excess = std::max(o.envelope_excess, a - env * (1.0 + 1e-12));
      ++o.stated_pts;
      if (a > kPi * R * R * std::exp(-xs[k] / 2.0)) ++o.stated_viol;
    }
  });

  SelftestReport rep;
  double norm_rel = 0.0, inner_rel = 0.0, delta_rel = 0.0, env = -1.0;
  for (const auto& o : res) {
    norm_rel = std::max(norm_rel, o.norm_rel);
    inner_rel = std::max(inner_rel, o.inner_rel);
    delta_rel = std::max(delta_rel, o.delta_rel);
    env = std::max(env, o.envelope_excess);
    rep.stated_delta_violations += o.stated_viol;
    rep.stated_delta_points += o.stated_pts;
  }
  // Monomials s^m, s^n on a fixed radius: closed form and quadrature.
  double ortho = 0.0;
  const double R = 0.3;
  const auto rule = quad::disc_rule(0.0, R, 16, 64);
  for (std::size_t m = 0; m <= degree; ++m) {
    for (std::size_t n = 0; n <= degree; ++n) {
      std::vector<cplx> a(m + 1, 0.0), b(n + 1, 0.0);
      a[m] = 1.0;
      b[n] = 1.0;
      const HardyElement fm(R, a), fn(R, b);
      double q = 0.0;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k)
        q += rule.weights[k] * (fm(rule.nodes[k]) * std::conj(fn(rule.nodes[k]))).real();
      const double exact = m == n ? kPi * std::pow(R, 2.0 * n + 2.0) / (n + 1.0) : 0.0;
      ortho = std::max({ortho, std::fabs(hardy::inner(fm, fn) - exact), std::fabs(q - exact)});
    }
  }
  rep.checks.push_back(check("norm_sq_vs_quadrature", norm_rel <= 1e-6, "max rel " + report::num(norm_rel)));
  rep.checks.push_back(check("inner_vs_quadrature", inner_rel <= 1e-6, "max rel " + report::num(inner_rel)));
  rep.checks.push_back(check("monomial_orthogonality", ortho <= 1e-10, "max abs " + report::num(ortho)));
  rep.checks.push_back(check("delta_vs_quadrature", delta_rel <= 1e-6, "max rel " + report::num(delta_rel)));
  rep.checks.push_back(check("delta_envelope", env <= 0.0, "max excess " + report::num(env)));
  rep.all_passed = std::all_of(rep.checks.begin(), rep.checks.end(), [](const Assertion& a) { return a.passed; });
  return rep;
}

}  // namespace zetalab::run
