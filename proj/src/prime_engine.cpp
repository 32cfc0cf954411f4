#include "zetalab/prime_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#include "zetalab/common.hpp"

namespace zetalab::primes {
namespace {

constexpr std::uint64_t kSegment = 1u << 18;

std::vector<std::uint64_t> small_primes(std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  if (limit < 2) return out;
  std::vector<char> composite(limit + 1, 0);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
  }
  return out;
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Appends primes in [lo, hi] (lo >= 2) to out using base primes up to sqrt(hi).
void segmented(std::uint64_t lo, std::uint64_t hi, const std::vector<std::uint64_t>& base,
               std::vector<std::uint64_t>& out) {
  std::vector<char> mark(kSegment);
  for (std::uint64_t seg = lo; seg <= hi; seg += kSegment) {
    const std::uint64_t end = std::min(hi, seg + kSegment - 1);
    std::fill(mark.begin(), mark.begin() + static_cast<std::ptrdiff_t>(end - seg + 1), 0);
    for (std::uint64_t p : base) {
      if (p * p > end) break;
      std::uint64_t start = std::max(p * p, (seg + p - 1) / p * p);
      for (std::uint64_t j = start; j <= end; j += p) mark[j - seg] = 1;
    }
    for (std::uint64_t n = seg; n <= end; ++n)
      if (!mark[n - seg]) out.push_back(n);
    if (end == hi) break;
  }
}

}  // namespace

std::size_t PrimeTable::count_upto(std::uint64_t x) const {
  return static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), x) -
                                  primes_.begin());
}

std::span<const std::uint64_t> PrimeTable::range(std::uint64_t lo, std::uint64_t hi) const {
  auto b = std::upper_bound(primes_.begin(), primes_.end(), lo);
  auto e = std::upper_bound(primes_.begin(), primes_.end(), hi);
  if (e < b) e = b;
  return {b, e};
}

bool PrimeTable::contains(std::uint64_t p) const {
  return std::binary_search(primes_.begin(), primes_.end(), p);
}

PrimeTable sieve(std::uint64_t limit) {
  if (limit < 2) throw DomainError("sieve: limit must be >= 2");
  if (limit > kSieveCapacity) throw CapacityError("sieve: limit exceeds capacity");
  const auto base = small_primes(isqrt(limit) + 1);
  std::vector<std::uint64_t> out;
  // Rough pi(x) overestimate to avoid regrowth.
  const double lx = std::log(static_cast<double>(limit));
  out.reserve(static_cast<std::size_t>(1.26 * static_cast<double>(limit) / lx) + 16);
  segmented(2, limit, base, out);
  return PrimeTable(limit, std::move(out));
}

std::vector<std::uint64_t> sieve_range(std::uint64_t lo, std::uint64_t hi) {
  if (hi > kSieveCapacity) throw CapacityError("sieve_range: upper end exceeds capacity");
  std::vector<std::uint64_t> out;
  lo = std::max<std::uint64_t>(lo, 2);
  if (hi < lo) return out;
  segmented(lo, hi, small_primes(isqrt(hi) + 1), out);
  return out;
}

std::shared_ptr<const PrimeTable> shared_table(std::uint64_t limit) {
  static std::mutex mu;
  static std::shared_ptr<const PrimeTable> cached;
  limit = std::max<std::uint64_t>(limit, 2);
  std::lock_guard<std::mutex> lock(mu);
  if (!cached || cached->limit() < limit) {
    const std::uint64_t grown = cached ? std::max(limit, 2 * cached->limit()) : limit;
    cached = std::make_shared<const PrimeTable>(
        sieve(std::max<std::uint64_t>(std::min(grown, kSieveCapacity), limit)));
  }
  return cached;
}

std::uint64_t nth_prime(std::uint64_t n) {
  if (n < 1) throw DomainError("nth_prime: index must be >= 1");
  double bound = 15.0;
  if (n >= 6) {
    const double x = static_cast<double>(n);
    bound = x * (std::log(x) + std::log(std::log(x))) + 3.0;
  }
  auto table = shared_table(static_cast<std::uint64_t>(bound));
  return (*table)[n - 1];
}

Frequency frequency(std::uint64_t n) {
  const auto p = nth_prime(n);
  return {n, std::log(static_cast<double>(p)) / kTwoPi};
}

std::vector<double> frequencies(std::size_t count) {
  std::vector<double> out(count);
  if (count == 0) return out;
  nth_prime(count);  // warm the cache once
  auto table = shared_table(2);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::log(static_cast<double>((*table)[i])) / kTwoPi;
  return out;
}

LogIntervalCount primes_in_log_interval(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw DomainError("primes_in_log_interval: need alpha > 0 and beta > 0");
  const double lo = std::exp(alpha);
  const double hi = std::exp(alpha + beta);
  if (!std::isfinite(hi) || hi > static_cast<double>(kSieveCapacity))
    throw CapacityError("primes_in_log_interval: e^(alpha+beta) exceeds sieve capacity");
  const auto a = static_cast<std::uint64_t>(std::ceil(lo));
  const auto b = static_cast<std::uint64_t>(std::floor(hi));
  LogIntervalCount r;
  r.lo = lo;
  r.hi = hi;
  r.count = b >= a ? sieve_range(a, b).size() : 0;
  r.ratio = static_cast<double>(r.count) / (beta * lo / alpha);
  return r;
}

IndependenceReport verify_log_independence(std::size_t n_primes, int bound,
                                           double tolerance) {
  if (n_primes < 1 || bound < 1)
    throw DomainError("verify_log_independence: need n_primes >= 1 and bound >= 1");
  if (n_primes > 8 || bound > 20)
    throw CapacityError("verify_log_independence: search space limited to n <= 8, B <= 20");

  std::vector<double> logs(n_primes);
  for (std::size_t i = 0; i < n_primes; ++i)
    logs[i] = std::log(static_cast<double>(nth_prime(i + 1)));

  const std::size_t h = n_primes / 2;
  const auto width = static_cast<std::uint32_t>(2 * bound + 1);
  auto decode = [&](std::uint32_t code, std::size_t len, std::vector<int>& k) {
    for (std::size_t i = 0; i < len; ++i) {
      k[i] = static_cast<int>(code % width) - bound;
      code /= width;
    }
  };
  auto sum_of = [&](std::uint32_t code, std::size_t offset, std::size_t len) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      s += static_cast<double>(static_cast<int>(code % width) - bound) * logs[offset + i];
      code /= width;
    }
    return s;
  };
  auto count_of = [&](std::size_t len) {
    std::uint32_t c = 1;
    for (std::size_t i = 0; i < len; ++i) c *= width;
    return c;
  };
  // Code of the all-zero vector of a given length.
  auto zero_code = [&](std::size_t len) {
    std::uint32_t c = 0;
    std::uint32_t mul = 1;
    for (std::size_t i = 0; i < len; ++i) {
      c += static_cast<std::uint32_t>(bound) * mul;
      mul *= width;
    }
    return c;
  };

  struct Entry {
    double sum;
    std::uint32_t code;
  };
  const std::uint32_t left_count = count_of(h);
  std::vector<Entry> left(left_count);
  for (std::uint32_t c = 0; c < left_count; ++c) left[c] = {sum_of(c, 0, h), c};
  std::sort(left.begin(), left.end(), [](const Entry& a, const Entry& b) {
    return a.sum < b.sum || (a.sum == b.sum && a.code < b.code);
  });

  const std::size_t rlen = n_primes - h;
  const std::uint32_t right_count = count_of(rlen);
  const std::uint32_t lzero = zero_code(h);
  const std::uint32_t rzero = zero_code(rlen);

  IndependenceReport rep;
  rep.n_primes = n_primes;
  rep.bound = bound;
  rep.tolerance = tolerance;
  rep.nearest_miss = std::numeric_limits<double>::infinity();
  std::uint32_t best_l = 0;
  std::uint32_t best_r = 0;

  std::vector<int> k(n_primes);
  for (std::uint32_t rc = 0; rc < right_count; ++rc) {
    const double sr = sum_of(rc, h, rlen);
    auto it = std::lower_bound(left.begin(), left.end(), -sr - tolerance,
                               [](const Entry& e, double v) { return e.sum < v; });
    for (auto j = it; j != left.end() && j->sum <= -sr + tolerance; ++j) {
      if (j->code == lzero && rc == rzero) continue;
      decode(j->code, h, k);
      std::vector<int> kr(rlen);
      decode(rc, rlen, kr);
      std::copy(kr.begin(), kr.end(), k.begin() + static_cast<std::ptrdiff_t>(h));
      rep.relations.push_back(k);
    }
    // Nearest neighbours of -sr in the sorted left sums.
    auto centre = std::lower_bound(left.begin(), left.end(), -sr,
                                   [](const Entry& e, double v) { return e.sum < v; });
    const auto ci = centre - left.begin();
    for (std::ptrdiff_t d = -2; d <= 1; ++d) {
      const std::ptrdiff_t idx = ci + d;
      if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(left.size())) continue;
      const Entry& e = left[static_cast<std::size_t>(idx)];
      if (e.code == lzero && rc == rzero) continue;
      const double v = std::fabs(e.sum + sr);
      if (v >= tolerance && v < rep.nearest_miss) {
        rep.nearest_miss = v;
        best_l = e.code;
        best_r = rc;
      }
    }
  }
  rep.nearest_vector.assign(n_primes, 0);
  std::vector<int> kl(h);
  std::vector<int> kr(rlen);
  decode(best_l, h, kl);
  decode(best_r, rlen, kr);
  std::copy(kl.begin(), kl.end(), rep.nearest_vector.begin());
  std::copy(kr.begin(), kr.end(), rep.nearest_vector.begin() + static_cast<std::ptrdiff_t>(h));
  return rep;
}

}  // namespace zetalab::primes
