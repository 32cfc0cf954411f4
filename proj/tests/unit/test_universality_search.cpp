#include <doctest.h>

#include <cmath>
#include <random>

#include "zetalab/common.hpp"
#include "zetalab/euler_product.hpp"
#include "zetalab/prime_engine.hpp"
#include "zetalab/quadrature.hpp"
#include "zetalab/universality_search.hpp"

using namespace zetalab;
using namespace zetalab::universality;

namespace {

const std::vector<std::uint64_t> kPlanted = {13, 29, 61, 127, 251};
const std::vector<double> kPlantedPhase = {0.1, 0.7, 0.33, 0.9, 0.5};

hardy::HardyElement planted_linear(double R) {
  hardy::HardyElement f(R, std::vector<cplx>(hardy::kDefaultDegree + 1, 0.0));
  for (std::size_t i = 0; i < kPlanted.size(); ++i)
    f += hardy::eta_element(kPlanted[i], kPlantedPhase[i], R);
  return f;
}

void check_strictly_decreasing(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) REQUIRE(trace[i] < trace[i - 1]);
}

double phase_distance(double a, double b) {
  const double d = std::fabs(a - b);
  return std::min(d, 1.0 - d);
}

// Dense scan for the basin, then bisection on the sign of a central
// difference of the cost.
double numeric_best_phase(const hardy::HardyElement& f, std::uint64_t p) {
  auto cost = [&](double th) { return hardy::norm_sq(f - hardy::eta_element(p, th, f.radius)); };
  double best = 0.0, best_v = cost(0.0);
  for (int i = 1; i < 2000; ++i) {
    const double th = i / 2000.0;
    const double v = cost(th);
    if (v < best_v) best_v = v, best = th;
  }
  auto slope = [&](double th) { return cost(th + 1e-6) - cost(th - 1e-6); };
  double a = best - 1.0 / 2000, b = best + 1.0 / 2000;
  for (int it = 0; it < 60; ++it) {
    const double m = 0.5 * (a + b);
    if (slope(m) > 0.0) b = m; else a = m;
  }
  const double th = 0.5 * (a + b);
  return th - std::floor(th);
}

}  // namespace

TEST_CASE("five planted terms are recovered from their own support") {
  for (double R : {0.1, 0.2, 0.5}) {
    CAPTURE(R);
    const auto res = greedy_rearrange(planted_linear(R), kPlanted, 0, 50, 1e-12);
    CHECK(res.residual_norm_trace.back() < 1e-6);
    CHECK(res.selected.size() == kPlanted.size());
    for (std::size_t i = 0; i < kPlanted.size(); ++i)
      CHECK(phase_distance(res.phases.get(kPlanted[i]), kPlantedPhase[i]) < 1e-6);
    check_strictly_decreasing(res.residual_norm_trace);
  }
}

TEST_CASE("dense pool run stays monotone and reports its status") {
  const auto table = primes::sieve(2000);
  const auto res = greedy_rearrange(planted_linear(0.2), table.primes(), 0, 200, 1e-9);
  check_strictly_decreasing(res.residual_norm_trace);
  CHECK(res.residual_norm_trace.back() < res.residual_norm_trace.front());
  CHECK(std::string(status_name(res.status)).size() > 0);
}

TEST_CASE("zero target selects nothing") {
  hardy::HardyElement zero(0.2, std::vector<cplx>(hardy::kDefaultDegree + 1, 0.0));
  const auto table = primes::sieve(1000);
  const auto res = greedy_rearrange(zero, table.primes(), 0, 100, 1e-12);
  CHECK(res.selected.empty());
  CHECK(res.residual_norm_trace.back() == 0.0);
  CHECK(res.status == Status::kConverged);
}

TEST_CASE("generic unit element gives a strictly decreasing trace") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd(0.0, 1.0);
  const double R = 0.15;
  std::vector<cplx> c(hardy::kDefaultDegree + 1);
  double rn = 1.0;
  for (auto& a : c) {
    a = cplx(nd(gen), nd(gen)) / rn;
    rn *= R;
  }
  hardy::HardyElement f(R, c);
  f *= 1.0 / std::sqrt(hardy::norm_sq(f));
  const auto table = primes::sieve(20000);
  GreedyOptions opt;
  opt.refine_rounds = 2;
  const auto res = greedy_rearrange(f, table.primes(), 0, 300, 1e-6, opt);
  REQUIRE(res.residual_norm_trace.size() > 2);
  CHECK(res.residual_norm_trace.front() == doctest::Approx(1.0).epsilon(1e-12));
  check_strictly_decreasing(res.residual_norm_trace);
}

TEST_CASE("closed-form phase matches 1-D numeric minimisation") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<cplx> c(hardy::kDefaultDegree + 1);
    double rn = 1.0;
    for (auto& a : c) {
      a = 0.05 * cplx(nd(gen), nd(gen)) / rn;
      rn *= 0.2;
    }
    const hardy::HardyElement f(0.2, c);
    for (std::uint64_t p : {2ull, 97ull, 7919ull}) {
      CAPTURE(p);
      CHECK(phase_distance(hardy::optimal_phase(p, f), numeric_best_phase(f, p)) < 1e-8);
    }
  }
}

TEST_CASE("planted Euler product is reproduced on the disc") {
  euler::PhaseAssignment pre(0.0);
  std::vector<std::uint64_t> M = {2, 3, 5, 7};
  std::vector<double> th = {0.2, 0.3, 0.5, 0.7};
  for (std::size_t i = 0; i < M.size(); ++i) pre.set(M[i], th[i]);
  for (std::size_t i = 0; i < kPlanted.size(); ++i) {
    M.push_back(kPlanted[i]);
    th.push_back(kPlantedPhase[i]);
  }
  Target g = [&](cplx s) {
    const std::vector<cplx> z = {s + 0.75};
    return euler::product_grid(M, th, z)[0];
  };
  DiscOptions opt;
  opt.prescribed = pre;
  opt.pool = kPlanted;
  const auto res = approximate_on_disc(g, 0.1, 10.0, 1e-8, opt);
  CHECK(res.sup_error <= 1e-8);
  CHECK(res.success);
  // prescribed phases untouched
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull}) CHECK(res.phases.get(p) == pre.get(p));
}

TEST_CASE("prescribed phases survive a real search") {
  euler::PhaseAssignment pre(0.0);
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) pre.set(p, 0.01 * static_cast<double>(p));
  Target g = [](cplx s) { return 1.5 + 0.2 * s; };
  DiscOptions opt;
  opt.prescribed = pre;
  opt.pool_limit = 5000;
  opt.greedy.max_terms = 200;
  const auto res = approximate_on_disc(g, 0.05, 13.0, 0.5, opt);
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) CHECK(res.phases.get(p) == pre.get(p));
  for (auto p : res.selected) CHECK(p > 13);
  check_strictly_decreasing(res.residual_norm_trace);
}

TEST_CASE("exponentiated log sum equals the product") {
  Target g = [](cplx s) { return 2.0 + 0.3 * s; };
  DiscOptions opt;
  opt.pool_limit = 5000;
  opt.greedy.max_terms = 100;
  const auto res = approximate_on_disc(g, 0.1, 5.0, 0.5, opt);
  std::vector<double> th;
  for (auto p : res.primes) th.push_back(res.phases.get(p));
  const auto circle = quad::circle_points(0.0, 0.1, 64);
  std::vector<cplx> z;
  for (auto s : circle) z.push_back(s + 0.75);
  const auto prod = euler::product_grid(res.primes, th, z);
  for (std::size_t k = 0; k < circle.size(); ++k) {
    cplx logsum = 0.0;
    for (std::size_t i = 0; i < res.primes.size(); ++i)
      logsum -= euler::log_factor(res.primes[i], th[i], circle[k]);
    CHECK(std::abs(std::exp(logsum) - prod[k]) <= 1e-10 * std::abs(prod[k]));
  }
}

TEST_CASE("targets with a zero are rejected") {
  Target inside = [](cplx s) { return s - 0.01; };
  Target boundary_wind = [](cplx s) { return s * s + cplx(0.0, 0.001); };
  CHECK_THROWS_AS(approximate_on_disc(inside, 0.1, 5.0, 0.1), DomainError);
  CHECK_THROWS_AS(approximate_on_disc(boundary_wind, 0.1, 5.0, 0.1), DomainError);
  Target ok = [](cplx) { return cplx(2.0); };
  CHECK_THROWS_AS(approximate_on_disc(ok, 0.3, 5.0, 0.1), DomainError);
  CHECK_THROWS_AS(approximate_on_disc(ok, 0.1, 5.0, 0.0), DomainError);
}

TEST_CASE("stage bounds decrease geometrically") {
  const double eps = 0.3;
  for (double r : {0.05, 0.1, 0.15}) {
    const double delta = 0.05;
    double prev = stage_bound(0, r, delta, eps);
    CHECK(prev == doctest::Approx(2 * eps));
    for (int k = 1; k < 12; ++k) {
      const double b = stage_bound(k, r, delta, eps);
      CHECK(b < prev);
      CHECK(b / prev == doctest::Approx(std::pow(2.0, r + delta - 0.25)));
      prev = b;
    }
  }
  CHECK(c_delta(0.05) == doctest::Approx(std::sqrt(2.0) / (0.05 * std::sqrt(2 * kPi))));
}

TEST_CASE("doubling preconditions") {
  DoublingOptions o;
  o.r = 0.2;
  o.delta = 0.05;
  CHECK_THROWS_AS(doubling_scheme(o), DomainError);
  o = {};
  o.eps = 1e-6;  // far below eps_min for y0 = 1000
  CHECK_THROWS_AS(doubling_scheme(o), DomainError);
}

TEST_CASE("degenerate schedule has one stage") {
  DoublingOptions o;
  o.y0 = 200;
  o.K = 0;
  o.restarts = 2;
  o.pool_limit = 20000;
  o.max_terms = 400;
  const auto sc = doubling_scheme(o);
  REQUIRE(sc.stages.size() == 1);
  const auto& st = sc.stages[0];
  CHECK(st.y_k == 200.0);
  CHECK(std::isfinite(st.stage_error));
  CHECK(sc.eps == doctest::Approx(sc.eps_min));
  CHECK(st.bound == doctest::Approx(2 * sc.eps));
  CHECK(st.primes.size() == st.thetas.size());
  for (std::size_t i = 1; i < st.primes.size(); ++i) CHECK(st.primes[i] > st.primes[i - 1]);
}

TEST_CASE("two stages double y and extend the phase vector") {
  DoublingOptions o;
  o.y0 = 200;
  o.K = 1;
  o.restarts = 2;
  o.pool_limit = 20000;
  o.max_terms = 400;
  const auto sc = doubling_scheme(o);
  REQUIRE(sc.stages.size() == 2);
  CHECK(sc.stages[1].y_k == 2 * sc.stages[0].y_k);
  CHECK(sc.stages[1].m_k >= sc.stages[0].m_k);
  CHECK(sc.stages[1].bound < sc.stages[0].bound);
  const auto a = doubling_scheme(o);
  CHECK(a.stages[1].stage_error == sc.stages[1].stage_error);
  o.threads = 3;
  const auto b = doubling_scheme(o);
  CHECK(b.stages[1].stage_error == sc.stages[1].stage_error);
}

TEST_CASE("series diagnostic conventions") {
  DoublingSchedule sc;
  sc.r = 0.1;
  Stage s;
  s.primes = {2, 3};
  s.thetas = {0.25, 0.5};
  sc.stages = {s, s};
  const auto d = series_convergence_diagnostic(sc, 0.0);
  REQUIRE(d.terms.size() == 2);
  // F_0 = 0: first term is the disc integral of |F_1|.
  const auto rule = quad::disc_rule(0.0, 0.1, 12, 32);
  const auto vals = stage_values(s, 0.0, rule.nodes);
  double direct = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) direct += rule.weights[i] * std::abs(vals[i]);
  CHECK(d.terms[0] == doctest::Approx(direct).epsilon(1e-14));
  CHECK(d.terms[1] == 0.0);
  CHECK(d.partial_sums[1] == d.partial_sums[0]);
}

TEST_CASE("geometric phase convergence gives a convergent series") {
  DoublingSchedule sc;
  sc.r = 0.1;
  for (int k = 0; k < 12; ++k) {
    Stage s;
    s.primes = {2, 3, 5};
    s.thetas = {0.3 + 0.2 * std::pow(0.5, k), 0.1, 0.6};
    sc.stages.push_back(s);
  }
  const auto d = series_convergence_diagnostic(sc, 0.0);
  for (std::size_t k = 6; k < d.terms.size(); ++k) {
    CAPTURE(k);
    CHECK(d.terms[k] / d.terms[k - 1] == doctest::Approx(0.5).epsilon(0.02));
  }
  const double tail = d.terms.back();
  CHECK(d.partial_sums.back() - d.partial_sums[d.partial_sums.size() - 2] == doctest::Approx(tail));
  CHECK(tail < 1e-3 * d.partial_sums.back());
}
