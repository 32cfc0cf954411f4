#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace zetalab::primes {

// Largest limit any routine here will sieve up to.
inline constexpr std::uint64_t kSieveCapacity = 4'000'000'000ULL;

class PrimeTable {
 public:
  PrimeTable() = default;
  PrimeTable(std::uint64_t limit, std::vector<std::uint64_t> primes)
      : limit_(limit), primes_(std::move(primes)) {}

  std::uint64_t limit() const { return limit_; }
  std::span<const std::uint64_t> primes() const { return primes_; }
  std::size_t size() const { return primes_.size(); }
  std::uint64_t operator[](std::size_t i) const { return primes_[i]; }

  // Number of primes <= x (x may exceed limit only up to limit).
  std::size_t count_upto(std::uint64_t x) const;
  // Primes p with lo < p <= hi.
  std::span<const std::uint64_t> range(std::uint64_t lo, std::uint64_t hi) const;
  bool contains(std::uint64_t p) const;

 private:
  std::uint64_t limit_ = 0;
  std::vector<std::uint64_t> primes_;
};

// Segmented sieve of Eratosthenes. Throws DomainError for limit < 2,
// CapacityError above kSieveCapacity.
PrimeTable sieve(std::uint64_t limit);

// Primes in [lo, hi] without materialising everything below lo.
std::vector<std::uint64_t> sieve_range(std::uint64_t lo, std::uint64_t hi);

// Process-wide cache: returns a table covering at least `limit`.
std::shared_ptr<const PrimeTable> shared_table(std::uint64_t limit);

// n-th prime, 1-based.
std::uint64_t nth_prime(std::uint64_t n);

struct Frequency {
  std::uint64_t index = 0;
  double value = 0.0;  // log(p_n) / 2pi
};

Frequency frequency(std::uint64_t n);
// lambda_1 .. lambda_count
std::vector<double> frequencies(std::size_t count);

struct LogIntervalCount {
  std::uint64_t count = 0;
  double lo = 0.0;     // e^alpha
  double hi = 0.0;     // e^{alpha+beta}
  double ratio = 0.0;  // count / (beta e^alpha / alpha)
};

// #{p : e^alpha <= p <= e^{alpha+beta}}. Requires alpha > 0, beta > 0.
LogIntervalCount primes_in_log_interval(double alpha, double beta);

struct IndependenceReport {
  std::size_t n_primes = 0;
  int bound = 0;
  double tolerance = 0.0;
  // Integer vectors k != 0 with |sum k_i log p_i| < tolerance (always empty).
  std::vector<std::vector<int>> relations;
  // Smallest nonzero |sum k_i log p_i| found and its coefficient vector.
  double nearest_miss = 0.0;
  std::vector<int> nearest_vector;
};

// Exhaustive search over |k_i| <= bound, meet-in-the-middle.
// n_primes <= 8 and bound <= 20, otherwise CapacityError.
IndependenceReport verify_log_independence(std::size_t n_primes, int bound,
                                           double tolerance = 1e-12);

}  // namespace zetalab::primes
