#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "zetalab/common.hpp"
#include "zetalab/prime_engine.hpp"

using namespace zetalab;
using namespace zetalab::primes;

namespace {

bool trial_division(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("sieve small cases") {
  auto t = sieve(10);
  REQUIRE(t.size() == 4);
  CHECK(t[0] == 2);
  CHECK(t[3] == 7);
  CHECK(sieve(2).size() == 1);
  CHECK_THROWS_AS(sieve(1), DomainError);
  CHECK_THROWS_AS(sieve(kSieveCapacity + 1), CapacityError);
}

TEST_CASE("sieve to 10^4 matches trial division") {
  auto t = sieve(10000);
  std::size_t oracle = 0;
  for (std::uint64_t n = 2; n <= 10000; ++n) oracle += trial_division(n);
  CHECK(t.size() == oracle);
  CHECK(t.size() == 1229);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(trial_division(t[i]));
    if (i > 0) CHECK(t[i] > t[i - 1]);
  }
}

TEST_CASE("segment boundaries do not drop primes") {
  // Spans several 2^18 segments.
  auto t = sieve(1'000'000);
  CHECK(t.size() == 78498);
  auto r = sieve_range(262100, 262200);
  for (std::uint64_t n = 262100; n <= 262200; ++n)
    CHECK(trial_division(n) == std::binary_search(r.begin(), r.end(), n));
}

TEST_CASE("table queries") {
  auto t = sieve(100);
  CHECK(t.count_upto(10) == 4);
  CHECK(t.count_upto(100) == 25);
  auto r = t.range(7, 13);
  REQUIRE(r.size() == 2);
  CHECK(r[0] == 11);
  CHECK(r[1] == 13);
  CHECK(t.contains(97));
  CHECK_FALSE(t.contains(91));
}

TEST_CASE("nth prime and frequencies") {
  CHECK(nth_prime(1) == 2);
  CHECK(nth_prime(4) == 7);
  CHECK(nth_prime(1000) == 7919);
  CHECK(nth_prime(100000) == 1299709);
  CHECK(frequency(1).value == doctest::Approx(0.1103178000763258).epsilon(1e-14));
  CHECK(frequency(4).value == doctest::Approx(0.3097012190348400).epsilon(1e-14));
  auto lam = frequencies(2000);
  for (std::size_t i = 1; i < lam.size(); ++i) CHECK(lam[i] > lam[i - 1]);
  CHECK(lam.back() > 1.0);
  CHECK_THROWS_AS(nth_prime(0), DomainError);
}

TEST_CASE("primes in log intervals") {
  auto a = primes_in_log_interval(std::log(10.0), std::log(2.0));
  CHECK(a.count == 4);
  auto b = primes_in_log_interval(3.0, 0.5);
  std::uint64_t oracle = 0;
  for (std::uint64_t n = 21; n <= 33; ++n) oracle += trial_division(n);
  CHECK(b.count == oracle);
  CHECK(b.count == 3);
  CHECK(b.ratio > 0.0);
  CHECK(b.ratio == doctest::Approx(3.0 / (0.5 * std::exp(3.0) / 3.0)));
  CHECK_THROWS_AS(primes_in_log_interval(30.0, 1.0), CapacityError);
  CHECK_THROWS_AS(primes_in_log_interval(1.0, 0.0), DomainError);
}

TEST_CASE("no integer relations among prime logarithms") {
  auto a = verify_log_independence(3, 5);
  CHECK(a.relations.empty());
  auto b = verify_log_independence(5, 3);
  CHECK(b.relations.empty());
  auto c = verify_log_independence(2, 3);
  CHECK(c.relations.empty());
  CHECK(c.nearest_miss == doctest::Approx(std::fabs(3 * std::log(2.0) - 2 * std::log(3.0))));
  CHECK(std::abs(c.nearest_vector[0]) == 3);
  CHECK(std::abs(c.nearest_vector[1]) == 2);
  CHECK_THROWS_AS(verify_log_independence(9, 2), CapacityError);
  CHECK_THROWS_AS(verify_log_independence(3, 21), CapacityError);
}

TEST_CASE("independence search at the feasibility edge") {
  auto r = verify_log_independence(8, 20);
  CHECK(r.relations.empty());
  CHECK(r.nearest_miss > 0.0);
}
