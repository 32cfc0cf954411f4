#include "zetalab/euler_product.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "zetalab/kernels.hpp"
#include "zetalab/parallel.hpp"
#include "zetalab/prime_engine.hpp"
#include "zetalab/quadrature.hpp"
#include "zetalab/rng.hpp"

namespace zetalab::euler {
namespace {

constexpr std::size_t kLogSpaceThreshold = 10000;
constexpr std::size_t kBlock = 1024;

cplx weighted_power(std::uint64_t p, double theta, cplx s) {
  return unit_phase(theta) * std::exp(-s * std::log(static_cast<double>(p)));
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

void PhaseAssignment::set(std::uint64_t p, double theta) {
  if (!is_prime(p)) throw DomainError("PhaseAssignment: key " + std::to_string(p) + " is not prime");
  entries_[p] = frac(theta);
}

double PhaseAssignment::get(std::uint64_t p) const {
  auto it = entries_.find(p);
  return it == entries_.end() ? default_ : it->second;
}

cplx factor_eval(std::uint64_t p, double theta, cplx s) {
  if (!(s.real() > 0.0)) throw DomainError("factor_eval: requires Re s > 0");
  return 1.0 / (1.0 - weighted_power(p, theta, s));
}

ProductValue product_eval(const PhaseAssignment& phases, std::uint64_t prime_limit, cplx s,
                          unsigned threads) {
  if (!(s.real() > 0.0)) throw DomainError("product_eval: requires Re s > 0");
  ProductValue out;
  out.s = s;
  out.prime_limit = prime_limit;
  out.value = 1.0;
  if (prime_limit >= 2) {
    const auto table = primes::shared_table(prime_limit);
    const auto ps = table->range(0, prime_limit);
    out.prime_count = ps.size();
    if (ps.size() <= kLogSpaceThreshold) {
      for (auto p : ps) out.value *= 1.0 / (1.0 - weighted_power(p, phases.get(p), s));
    } else {
      const std::size_t blocks = (ps.size() + kBlock - 1) / kBlock;
      std::vector<cplx> partial(blocks);
      parallel_for(blocks, threads, [&](std::size_t b) {
        cplx acc = 0.0;
        const std::size_t end = std::min(ps.size(), (b + 1) * kBlock);
        for (std::size_t i = b * kBlock; i < end; ++i)
          acc -= std::log(1.0 - weighted_power(ps[i], phases.get(ps[i]), s));
        partial[b] = acc;
      });
      cplx total = 0.0;
      for (const auto& v : partial) total += v;
      out.value = std::exp(total);
    }
  }
  const double sigma = s.real();
  if (sigma > 1.0) {
    out.has_tail = true;
    const double P = static_cast<double>(std::max<std::uint64_t>(prime_limit, 1));
    out.tail_bound = std::pow(P, 1.0 - sigma) / (sigma - 1.0);
  }
  return out;
}

cplx log_factor(std::uint64_t p, double theta, cplx s_disc) {
  if (!(s_disc.real() > -0.75)) throw DomainError("log_factor: requires Re s > -3/4");
  return std::log(1.0 - weighted_power(p, theta, s_disc + 0.75));
}

cplx residual_h(const PhaseAssignment& phases, std::span<const std::uint64_t> M,
                std::uint64_t prime_limit, cplx s_disc) {
  const cplx z = s_disc + 0.75;
  if (!(z.real() > 0.5)) throw DomainError("residual_h: requires Re(s + 3/4) > 1/2");
  std::set<std::uint64_t> excluded;
  for (auto p : M) {
    if (p > prime_limit || !is_prime(p))
      throw DomainError("residual_h: M contains " + std::to_string(p) +
                        ", not a prime <= prime_limit");
    excluded.insert(p);
  }
  cplx value = 1.0;
  if (prime_limit >= 2) {
    for (auto p : primes::shared_table(prime_limit)->range(0, prime_limit))
      if (!excluded.count(p)) value *= 1.0 / (1.0 - weighted_power(p, phases.get(p), z));
  }
  return value - 1.0;
}

std::vector<cplx> inverse_product_grid(std::span<const std::uint64_t> primes,
                                       std::span<const double> thetas,
                                       std::span<const cplx> s, unsigned threads) {
  if (primes.size() != thetas.size())
    throw DomainError("inverse_product_grid: primes and phases differ in length");
  const std::size_t n = s.size();
  const std::size_t blocks = (primes.size() + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> block_re(blocks), block_im(blocks);
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(primes.size(), lo + kBlock);
    const std::size_t rows = hi - lo;
    std::vector<double> wr(rows), wi(rows), zr(rows * n), zi(rows * n);
    for (std::size_t k = 0; k < rows; ++k) {
      const cplx w = unit_phase(thetas[lo + k]);
      wr[k] = w.real();
      wi[k] = w.imag();
      const double L = std::log(static_cast<double>(primes[lo + k]));
      for (std::size_t j = 0; j < n; ++j) {
        const cplx z = std::exp(-s[j] * L);
        zr[k * n + j] = z.real();
        zi[k * n + j] = z.imag();
      }
    }
    block_re[b].assign(n, 1.0);
    block_im[b].assign(n, 0.0);
    simd::factor_product(wr, wi, zr.data(), zi.data(), n, block_re[b], block_im[b]);
  });
  std::vector<cplx> out(n, 1.0);
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t j = 0; j < n; ++j) out[j] *= cplx(block_re[b][j], block_im[b][j]);
  return out;
}

std::vector<cplx> product_grid(std::span<const std::uint64_t> primes,
                               std::span<const double> thetas, std::span<const cplx> s,
                               unsigned threads) {
  auto out = inverse_product_grid(primes, thetas, s, threads);
  for (auto& v : out) v = 1.0 / v;
  return out;
}

double tail_bound(double r, double delta, double y) {
  const double rd = r + delta;
  return 4.0 * kPi * rd * rd / (1.0 - 4.0 * rd) * std::pow(y, -0.5 + 2.0 * rd);
}

TailExperiment mean_square_tail_experiment(double r, double delta, double y,
                                           std::size_t samples, std::uint64_t seed,
                                           unsigned threads, double m_factor) {
  if (!(r > 0.0) || !(delta > 0.0) || !(r + delta < 0.25))
    throw DomainError("mean_square_tail_experiment: need r, delta > 0 and r + delta < 1/4");
  if (!(y >= 2.0)) throw DomainError("mean_square_tail_experiment: need y >= 2");
  if (samples < 2) throw DomainError("mean_square_tail_experiment: need at least 2 samples");
  if (!(m_factor >= 1.0)) throw DomainError("mean_square_tail_experiment: m_factor < 1");

  TailExperiment ex;
  ex.r = r;
  ex.delta = delta;
  ex.y = y;
  ex.samples = samples;
  ex.seed = seed;
  ex.m = static_cast<std::uint64_t>(std::floor(m_factor * y));
  ex.bound = tail_bound(r, delta, y);

  const auto lo = static_cast<std::uint64_t>(std::floor(y));
  const auto table = primes::shared_table(std::max<std::uint64_t>(ex.m, 2));
  const auto ps = table->range(lo, ex.m);
  const std::size_t rows = ps.size();

  const auto rule = quad::disc_rule(0.0, r + delta, 8, 24);
  const std::size_t n = rule.nodes.size();

  // p^{-(s + 3/4)} on the quadrature nodes, shared by every sample.
  std::vector<double> zr(rows * n), zi(rows * n);
  std::vector<double> expect_log(n, 0.0);
  for (std::size_t k = 0; k < rows; ++k) {
    const double L = std::log(static_cast<double>(ps[k]));
    for (std::size_t j = 0; j < n; ++j) {
      const cplx z = std::exp(-(rule.nodes[j] + 0.75) * L);
      zr[k * n + j] = z.real();
      zi[k * n + j] = z.imag();
      expect_log[j] -= std::log1p(-std::norm(z));
    }
  }
  for (std::size_t j = 0; j < n; ++j) ex.expectation += rule.weights[j] * std::expm1(expect_log[j]);

  const CounterRng root(seed, 0x7a11);
  std::vector<double> values(samples);
  parallel_chunks(samples, threads, [&](std::size_t b, std::size_t e) {
    std::vector<double> wr(rows), wi(rows), ar(n), ai(n);
    for (std::size_t i = b; i < e; ++i) {
      const CounterRng rng = root.substream(i);
      for (std::size_t k = 0; k < rows; ++k) {
        const cplx w = unit_phase(rng.uniform(k));
        wr[k] = w.real();
        wi[k] = w.imag();
      }
      std::fill(ar.begin(), ar.end(), 1.0);
      std::fill(ai.begin(), ai.end(), 0.0);
      for (std::size_t k0 = 0; k0 < rows; k0 += kBlock) {
        const std::size_t k1 = std::min(rows, k0 + kBlock);
        simd::factor_product(std::span<const double>(wr).subspan(k0, k1 - k0),
                             std::span<const double>(wi).subspan(k0, k1 - k0),
                             zr.data() + k0 * n, zi.data() + k0 * n, n, ar, ai);
      }
      double integral = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        integral += rule.weights[j] * std::norm(1.0 / cplx(ar[j], ai[j]) - 1.0);
      values[i] = integral;
    }
  });

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(samples);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(samples - 1);
  ex.estimate = mean;
  ex.stderr_ = std::sqrt(var / static_cast<double>(samples));
  ex.within_bound = ex.estimate <= ex.bound + 3.0 * ex.stderr_;
  return ex;
}

}  // namespace zetalab::euler
