#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "zetalab/common.hpp"

namespace zetalab::euler {

// Finite map prime -> phase in [0, 1). Primes without an explicit entry take
// `default_phase`, so "all phases 1/2" is PhaseAssignment(0.5).
class PhaseAssignment {
 public:
  explicit PhaseAssignment(double default_phase = 0.0) : default_(frac(default_phase)) {}

  // Throws DomainError if p is not prime.
  void set(std::uint64_t p, double theta);
  double get(std::uint64_t p) const;
  bool has(std::uint64_t p) const { return entries_.count(p) != 0; }
  double default_phase() const { return default_; }
  const std::map<std::uint64_t, double>& entries() const { return entries_; }

 private:
  double default_;
  std::map<std::uint64_t, double> entries_;
};

bool is_prime(std::uint64_t n);

struct ProductValue {
  cplx s;
  cplx value;
  std::uint64_t prime_limit = 0;
  std::size_t prime_count = 0;
  // Bound on |value - full infinite product|; only meaningful when has_tail.
  double tail_bound = 0.0;
  bool has_tail = false;
};

// (1 - e^{2 pi i theta} p^{-s})^{-1}; Re s > 0.
cplx factor_eval(std::uint64_t p, double theta, cplx s);

// Product over primes <= prime_limit. Over more than 1e4 primes the factors
// are accumulated as a sum of logarithms in fixed blocks, so the result does
// not depend on `threads`.
ProductValue product_eval(const PhaseAssignment& phases, std::uint64_t prime_limit, cplx s,
                          unsigned threads = 1);

// log(1 - e^{2 pi i theta} p^{-(s + 3/4)}), principal branch; Re s > -3/4.
cplx log_factor(std::uint64_t p, double theta, cplx s_disc);

// prod_{p <= prime_limit, p not in M} (1 - e^{2 pi i theta_p} p^{-(s+3/4)})^{-1} - 1.
// M must consist of primes <= prime_limit.
cplx residual_h(const PhaseAssignment& phases, std::span<const std::uint64_t> M,
                std::uint64_t prime_limit, cplx s_disc);

// One factor set on many points: out[j] = prod_p (1 - w_p p^{-s_j}) with
// w_p = e^{2 pi i theta_p}. This is the reciprocal of the Euler product.
// Vectorised through simd::factor_product.
std::vector<cplx> inverse_product_grid(std::span<const std::uint64_t> primes,
                                       std::span<const double> thetas,
                                       std::span<const cplx> s, unsigned threads = 1);

// Euler product over the given primes on many points.
std::vector<cplx> product_grid(std::span<const std::uint64_t> primes,
                               std::span<const double> thetas, std::span<const cplx> s,
                               unsigned threads = 1);

struct TailExperiment {
  double r = 0.0;
  double delta = 0.0;
  double y = 0.0;
  std::uint64_t m = 0;           // primes y < p <= m enter h
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;         // mean of the disc integral of |h|^2
  double stderr_ = 0.0;
  double expectation = 0.0;      // exact phase average for the same prime range
  double bound = 0.0;
  bool within_bound = false;     // estimate <= bound + 3 stderr
};

// 4 pi (r+delta)^2 / (1 - 4r - 4delta) * y^{-1/2 + 2r + 2delta}
double tail_bound(double r, double delta, double y);

// Monte Carlo over uniform phases of the disc integral over |s| <= r + delta of
// |h(s)|^2, h = prod_{y < p <= m}(1 - e^{2 pi i theta_p} p^{-(s+3/4)})^{-1} - 1.
// m defaults to 64 y. Each sample draws from its own counter stream.
TailExperiment mean_square_tail_experiment(double r, double delta, double y,
                                           std::size_t samples, std::uint64_t seed,
                                           unsigned threads = 1, double m_factor = 64.0);

}  // namespace zetalab::euler
