#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "zetalab/zeta_reference.hpp"

using namespace zetalab;
using zetalab::zeta::sup_on_disc;
using zetalab::zeta::zeta_em;

TEST_CASE("zeta(2) inside the partial-sum bracket") {
  const long N = 1'000'000;
  const double s = oracle::dirichlet_partial(2.0, N).real();
  const double lo = s + 1.0 / (N + 1.0);
  const double hi = s + 1.0 / N;
  auto z = zeta_em(2.0, 1e-12);
  CHECK(z.value.real() > lo - 1e-12);
  CHECK(z.value.real() < hi + 1e-12);
  CHECK(std::fabs(z.value.imag()) < 1e-15);
  CHECK(z.value.real() == doctest::Approx(1.6449340668482264).epsilon(1e-13));
  CHECK(z.error_estimate <= 1e-12);
}

TEST_CASE("zeta(4) closed form") {
  const double pi4 = std::pow(std::numbers::pi, 4);
  CHECK(zeta_em(4.0).value.real() == doctest::Approx(pi4 / 90.0).epsilon(1e-13));
}

TEST_CASE("zeta(3/4) against the Laurent expansion") {
  auto z = zeta_em(0.75, 1e-10);
  CHECK(z.value.real() == doctest::Approx(oracle::zeta_laurent(0.75)).epsilon(1e-9));
  CHECK(z.value.real() == doctest::Approx(-3.44128538694522).epsilon(1e-12));
}

TEST_CASE("agrees with the alternating-series oracle off the axis") {
  const cplx pts[] = {{0.75, 3.0}, {0.5, 14.134725141734694}, {0.9, 25.0}, {0.3, 7.5},
                      {1.5, -10.0}, {0.6, 40.0}};
  for (auto s : pts) {
    const cplx a = zeta_em(s, 1e-11).value;
    const cplx b = oracle::zeta_borwein(s);
    CHECK(std::abs(a - b) < 1e-9 * std::max(1.0, std::abs(b)));
  }
}

TEST_CASE("first nontrivial zero") {
  CHECK(std::abs(zeta::zeta({0.5, 14.134725141734694})) < 1e-9);
}

TEST_CASE("conjugate symmetry") {
  for (double sig : {0.2, 0.5, 0.8, 1.3})
    for (double t : {0.7, 5.0, 21.0, 120.0}) {
      const cplx a = zeta::zeta({sig, t});
      const cplx b = zeta::zeta({sig, -t});
      CHECK(std::abs(a - std::conj(b)) < 1e-10);
    }
}

TEST_CASE("partial sums obey the integral tail bound for sigma > 1") {
  for (double sig : {1.5, 2.0, 3.0})
    for (long N : {10L, 100L, 1000L}) {
      const cplx s(sig, 2.0);
      const double gap = std::abs(zeta::zeta(s) - oracle::dirichlet_partial(s, N));
      CHECK(gap <= std::pow(static_cast<double>(N), 1.0 - sig) / (sig - 1.0));
    }
}

TEST_CASE("error taxonomy") {
  CHECK_THROWS_AS(zeta_em(1.0), PoleError);
  CHECK_THROWS_AS(zeta_em({0.0, 2.0}), DomainError);
  CHECK_THROWS_AS(zeta_em({0.5, 2000.0}), DomainError);
  CHECK_THROWS_AS(zeta_em(2.0, 1e-20), PrecisionError);
}

TEST_CASE("sup on disc") {
  const double a = sup_on_disc(0.75, 0.2, 256);
  const double b = sup_on_disc(0.75, 0.2, 512);
  CHECK(std::fabs(a - b) < 1e-6);
  // Maximum modulus: interior samples never exceed the boundary sup.
  for (double rho : {0.0, 0.05, 0.1, 0.15})
    for (int k = 0; k < 16; ++k) {
      const cplx s = 0.75 + std::polar(rho, 2 * std::numbers::pi * k / 16);
      CHECK(std::abs(zeta::zeta(s)) <= b);
    }
  CHECK(sup_on_disc(0.75, 0.0) == doctest::Approx(std::abs(zeta::zeta(0.75))));
  CHECK_THROWS_AS(sup_on_disc(1.0, 0.1), DomainError);
  CHECK_THROWS_AS(sup_on_disc(0.1, 0.2), DomainError);
}
