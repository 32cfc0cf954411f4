#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "zetalab/common.hpp"
#include "zetalab/cube_dynamics.hpp"

using namespace zetalab;
using namespace zetalab::cube;

namespace {

CubePoint random_point(std::mt19937_64& gen, std::size_t N) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(N);
  for (auto& x : c) x = u(gen);
  return CubePoint(c);
}

FinitePermutation random_perm(std::mt19937_64& gen, std::size_t m) {
  std::vector<std::size_t> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = i + 1;
  std::shuffle(v.begin(), v.end(), gen);
  return FinitePermutation(v);
}

double mc_volume(double u, std::size_t N, std::size_t samples, std::uint64_t seed, double* se) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::size_t hit = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    double acc = 0.0;
    for (std::size_t n = 0; n < N; ++n) acc += std::exp(-static_cast<double>(n)) * U(gen);
    if (acc <= u) ++hit;
  }
  const double p = static_cast<double>(hit) / static_cast<double>(samples);
  *se = std::sqrt(p * (1 - p) / static_cast<double>(samples));
  return p;
}

}  // namespace

TEST_CASE("tikhonov distance basics") {
  CHECK(tikhonov_dist(CubePoint::zeros(5), CubePoint::zeros(5)).value == 0.0);
  CHECK(tikhonov_dist(CubePoint({1, 0, 0}), CubePoint::zeros(3)).value == 1.0);
  const auto d = tikhonov_dist(CubePoint(std::vector<double>(40, 1.0)), CubePoint::zeros(40));
  const double e = std::numbers::e;
  CHECK(d.value + d.tail_bound == doctest::Approx(e / (e - 1)).epsilon(1e-15));
  CHECK(d.tail_bound < std::exp(1.0 - 40.0));
  CHECK_THROWS_AS(tikhonov_dist(CubePoint::zeros(2), CubePoint::zeros(3)), DomainError);
  CHECK_THROWS_AS(CubePoint({0.5, 1.5}), DomainError);
}

TEST_CASE("tikhonov distance is a metric") {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 200; ++i) {
    const auto x = random_point(gen, 12), y = random_point(gen, 12), z = random_point(gen, 12);
    const double xy = tikhonov_dist(x, y).value;
    CHECK(xy == tikhonov_dist(y, x).value);
    CHECK(tikhonov_dist(x, x).value == 0.0);
    CHECK(xy > 0.0);
    CHECK(tikhonov_dist(x, z).value <= xy + tikhonov_dist(y, z).value + 1e-15);
  }
}

TEST_CASE("curve points") {
  const auto origin = curve_point(0.0, 10);
  for (double c : origin.coords()) CHECK(c == 0.0);
  const auto p = curve_point(kTwoPi / std::log(2.0), 3);
  CHECK(std::min(p[0], 1.0 - p[0]) < 1e-12);
  CHECK(p[1] == doctest::Approx(std::log(3.0) / std::log(2.0) - 1.0).epsilon(1e-12));
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(gen), b = u(gen);
    CHECK(tikhonov_dist(curve_point(a, 50), curve_point(b, 50)).value > 0.0);
  }
  CHECK_THROWS_AS(curve_point(1.0, std::size_t{0}), DomainError);
}

TEST_CASE("permutations act on the right") {
  const CubePoint x({0.1, 0.2, 0.3});
  CHECK(apply_permutation(FinitePermutation(), x).coords() == x.coords());
  const auto s = apply_permutation(FinitePermutation::swap(1, 2), x);
  CHECK(s.coords() == std::vector<double>{0.2, 0.1, 0.3});
  CHECK_THROWS_AS(apply_permutation(FinitePermutation::swap(1, 4), x), DomainError);
  CHECK_THROWS_AS(FinitePermutation({1, 1, 2}), DomainError);
  CHECK_THROWS_AS(FinitePermutation({1, 3}), DomainError);

  std::mt19937_64 gen(9);
  for (int i = 0; i < 50; ++i) {
    const auto sigma = random_perm(gen, 6), tau = random_perm(gen, 6);
    const auto y = random_point(gen, 8);
    const auto lhs = apply_permutation(sigma, apply_permutation(tau, y));
    CHECK(lhs.coords() == apply_permutation(compose(tau, sigma), y).coords());
    for (std::size_t n = 1; n <= 10; ++n) CHECK(compose(sigma, tau)(n) == sigma(tau(n)));
  }
}

TEST_CASE("weighted box volume closed forms") {
  for (double u : {0.0, 0.25, 0.5, 0.999, 1.0}) CHECK(weighted_box_volume(u, 1) == doctest::Approx(std::min(u, 1.0)));
  CHECK(weighted_box_volume(0.5, 2) == doctest::Approx(0.5 - std::exp(-1.0) / 2).epsilon(1e-15));
  CHECK(weighted_box_volume(-1.0, 4) == 0.0);
  double total = 0.0;
  for (int n = 0; n < 21; ++n) total += std::exp(-n);
  CHECK(weighted_box_volume(total + 1e-9, 21) == 1.0);
  CHECK_THROWS_AS(weighted_box_volume(0.5, 0), CapacityError);
  CHECK_THROWS_AS(weighted_box_volume(0.5, 22), CapacityError);
}

TEST_CASE("weighted box volume agrees with Monte Carlo") {
  struct Case {
    double u;
    std::size_t N;
  };
  for (const Case c : {Case{0.8, 3}, Case{1.0, 6}, Case{1.2, 12}, Case{0.9, 21}}) {
    CAPTURE(c.N);
    double se = 0.0;
    const double mc = mc_volume(c.u, c.N, 1'000'000, 100 + c.N, &se);
    CHECK(std::fabs(weighted_box_volume(c.u, c.N) - mc) <= 3 * se);
  }
}

TEST_CASE("volume monotone in u and nested in N") {
  for (std::size_t N = 1; N <= 12; ++N) {
    double prev = 0.0;
    for (int i = 0; i <= 40; ++i) {
      const double u = 1.6 * i / 40.0;
      const double v = weighted_box_volume(u, N);
      CHECK(v >= prev - 1e-15);
      prev = v;
      CHECK(weighted_box_volume(u, N + 1) <= v + 1e-15);
    }
  }
}

TEST_CASE("continuity bound") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> U(0.0, 1.6), E(0.0, 0.2);
  for (int i = 0; i < 200; ++i) {
    const std::size_t N = 1 + i % 12;
    const auto c = volume_continuity_check(U(gen), E(gen), N);
    CHECK(c.margin >= 0.0);
    if (N == 1) CHECK(c.difference <= c.bound / 2 + 1e-15);
  }
  const auto z = volume_continuity_check(0.7, 0.0, 5);
  CHECK(z.difference == 0.0);
  CHECK(z.bound == 0.0);
}

TEST_CASE("c constant") {
  CHECK(c_constant(1).partial == 3.0);
  CHECK(c_constant(2).partial == 4.5);
  const double closed = c_closed_form();
  CHECK(closed == doctest::Approx(9.566753662646887).epsilon(1e-14));
  for (std::size_t n : {1u, 10u, 100u, 10000u}) {
    const auto c = c_constant(n);
    CHECK(c.lower <= closed);
    CHECK(closed <= c.upper);
  }
  const auto big = c_constant(1'000'000);
  CHECK((big.upper - big.lower) / closed < 1e-5);
}

TEST_CASE("hitting measure edge cases") {
  HittingOptions o;
  o.N = 8;
  o.samples = 2000;
  SphereFamily empty;
  empty.dim = 8;
  CHECK(hitting_measure_mc(empty, o).estimate == 0.0);

  SphereFamily all;
  all.dim = 8;
  all.spheres.push_back({CubePoint::zeros(8), 1.6});
  const auto e = hitting_measure_mc(all, o);
  CHECK(e.estimate == 1.0);
  CHECK(e.sphere_measure == 1.0);
}

TEST_CASE("hitting measure against the 6 c mu bound") {
  std::mt19937_64 gen(33);
  for (double radius : {0.05, 0.3, 0.6, 0.9}) {
    CAPTURE(radius);
    SphereFamily fam;
    fam.dim = 10;
    fam.spheres.push_back({random_point(gen, 10), radius});
    HittingOptions o;
    o.N = 10;
    o.samples = 100000;
    o.seed = 4;
    const auto e = hitting_measure_mc(fam, o);
    CHECK(e.within_bound);
    CHECK(e.sphere_measure <= 1.0);
    o.threads = 4;
    const auto e4 = hitting_measure_mc(fam, o);
    CHECK(e4.hits == e.hits);
    CHECK(e4.sphere_measure == e.sphere_measure);
  }
}

TEST_CASE("joint permutation: families missing the curve and the whole cube are unchanged") {
  std::mt19937_64 gen(35);
  HittingOptions o;
  o.N = 10;
  o.samples = 20000;
  const auto base = [&](const SphereFamily& f) { return hitting_measure_mc(f, o).estimate; };
  SphereFamily small;
  small.dim = 10;
  for (int i = 0; i < 4; ++i) small.spheres.push_back({random_point(gen, 10), 0.05});
  SphereFamily whole;
  whole.dim = 10;
  whole.spheres.push_back({random_point(gen, 10), 1.6});
  const double b_small = base(small), b_whole = base(whole);
  o.permutation = FinitePermutation({3, 1, 2, 5, 4});
  CHECK(hitting_measure_mc(small, o).estimate == b_small);
  CHECK(hitting_measure_mc(whole, o).estimate == b_whole);
}

TEST_CASE("discrepancy") {
  DiscrepancyOptions o;
  o.N = 2;
  o.lambda = {0.0, 0.0};
  const auto degenerate = discrepancy(o);
  CHECK(degenerate.per_coordinate[0] == doctest::Approx(1.0));

  o.lambda.clear();
  o.N = 4;
  const auto small = discrepancy(o);
  CHECK(small.per_coordinate[0] < 0.05);
  REQUIRE(small.pairs.size() == 6);
  o.t_count = 65536;
  const auto large = discrepancy(o);
  for (std::size_t n = 0; n < 4; ++n) CHECK(large.per_coordinate[n] < small.per_coordinate[n]);
  CHECK(large.pairs[0].value < small.pairs[0].value);
  o.t_count = 10;
  CHECK_THROWS_AS(discrepancy(o), DomainError);
}

TEST_CASE("interval schedule and counting bound") {
  std::vector<double> lambda;
  for (int n = 0; n < 60; ++n) lambda.push_back(0.7 * std::pow(1.9, n));
  const double delta = 0.08;
  const auto idx = interval_schedule(lambda, delta, 3);
  REQUIRE(idx.size() == 3);
  CHECK(lambda[idx[0] - 1] > 1.0);
  for (std::size_t m = 1; m < idx.size(); ++m) {
    CHECK(1.0 / lambda[idx[m] - 1] < 0.25 * delta / lambda[idx[m - 1] - 1]);
    // minimal choice
    CHECK_FALSE(1.0 / lambda[idx[m] - 2] < 0.25 * delta / lambda[idx[m - 1] - 1]);
  }
  const auto b = interval_bound(lambda, idx, delta);
  CHECK(b.product <= b.target);

  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> U(0.05, 0.95);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> alpha = {U(gen), U(gen), U(gen)};
    CHECK(cube_hitting_measure(lambda, idx, alpha, delta) <= b.product + 1e-15);
  }
  CHECK_THROWS_AS(interval_schedule(lambda, 0.2, 3), DomainError);
  CHECK_THROWS_AS(interval_schedule(lambda, delta, 40), CapacityError);
}

TEST_CASE("exact cube measure agrees with sampling") {
  const std::vector<double> lambda = {1.3, 70.0};
  const std::vector<std::size_t> idx = {1, 2};
  const std::vector<double> alpha = {0.4, 0.6};
  const double exact = cube_hitting_measure(lambda, idx, alpha, 0.08);
  std::size_t hit = 0;
  const std::size_t n = 2'000'000;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
    if (std::fabs(frac(t * 1.3) - 0.4) <= 0.04 && std::fabs(frac(t * 70.0) - 0.6) <= 0.04) ++hit;
  }
  CHECK(exact == doctest::Approx(static_cast<double>(hit) / n).epsilon(1e-3));
}

TEST_CASE("sphere family JSON") {
  const auto fam = load_spheres(R"({"dim": 3, "spheres": [{"center": [0.1, 0.2, 0.3], "radius": 0.5}]})");
  CHECK(fam.dim == 3);
  REQUIRE(fam.spheres.size() == 1);
  CHECK(fam.spheres[0].radius == 0.5);
  CHECK(fam.spheres[0].contains(CubePoint({0.1, 0.2, 0.3})));
  CHECK_THROWS_AS(load_spheres(R"({"dim": 2, "spheres": [{"center": [0.1], "radius": 0.5}]})"), DomainError);
  CHECK_THROWS_AS(load_spheres(R"({"dim": 1, "spheres": [{"center": [0.1], "radius": 0}]})"), DomainError);
  CHECK_THROWS_AS(load_spheres("not json"), DomainError);
}
