#include "zetalab/zeta_reference.hpp"

#include <algorithm>
#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <cmath>
#include <limits>

#include "zetalab/parallel.hpp"
#include "zetalab/quadrature.hpp"

namespace zetalab::zeta {
namespace {

constexpr int kStartOrder = 2;
constexpr int kMaxOrder = 40;
constexpr std::size_t kMaxCutoff = 1u << 22;

struct Expansion {
  cplx head;                  // partial sum plus integral and endpoint terms
  std::vector<cplx> terms;    // Bernoulli corrections T_1 .. T_kMaxOrder
};

Expansion expand(cplx s, std::size_t n_cut) {
  Expansion e;
  cplx sum = 0.0;
  // Sum small terms first.
  for (std::size_t n = n_cut - 1; n >= 1; --n)
    sum += std::exp(-s * std::log(static_cast<double>(n)));
  const double dn = static_cast<double>(n_cut);
  const double ln = std::log(dn);
  const cplx n_pow = std::exp(-s * ln);  // N^{-s}
  e.head = sum + dn * n_pow / (s - 1.0) + 0.5 * n_pow;

  // T_k = B_2k/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
  cplx rising = s;                   // s(s+1)...(s+2k-2)
  cplx power = n_pow / dn;           // N^{-s-2k+1}
  e.terms.reserve(kMaxOrder);
  for (int k = 1; k <= kMaxOrder; ++k) {
    const double b = boost::math::bernoulli_b2n<double>(k) /
                     boost::math::factorial<double>(static_cast<unsigned>(2 * k));
    e.terms.push_back(b * rising * power);
    rising *= (s + static_cast<double>(2 * k - 1)) * (s + static_cast<double>(2 * k));
    power /= dn * dn;
  }
  return e;
}

}  // namespace

ZetaValue zeta_em(cplx s, double accuracy) {
  if (s == cplx(1.0, 0.0)) throw PoleError("zeta_em: pole at s = 1");
  if (!(s.real() > 0.0)) throw DomainError("zeta_em: requires Re s > 0");
  if (std::fabs(s.imag()) > kMaxAbsT) throw DomainError("zeta_em: |Im s| exceeds 1e3");
  if (!(accuracy > 0.0)) throw DomainError("zeta_em: accuracy must be positive");

  std::size_t n_cut = std::max<std::size_t>(
      50, static_cast<std::size_t>(std::ceil(1.3 * std::fabs(s.imag()))) + 20);
  ZetaValue best;
  best.s = s;
  best.error_estimate = std::numeric_limits<double>::infinity();
  while (n_cut <= kMaxCutoff) {
    const Expansion e = expand(s, n_cut);
    cplx value = e.head;
    for (int k = 0; k < kStartOrder; ++k) value += e.terms[static_cast<std::size_t>(k)];
    int order = kStartOrder;
    // The series is asymptotic: stop once terms stop shrinking.
    while (order < kMaxOrder) {
      const double next = std::abs(e.terms[static_cast<std::size_t>(order)]);
      if (next <= accuracy) break;
      if (order + 1 < kMaxOrder &&
          std::abs(e.terms[static_cast<std::size_t>(order) + 1]) >= next)
        break;
      value += e.terms[static_cast<std::size_t>(order)];
      ++order;
    }
    const double est = order < kMaxOrder
                           ? std::abs(e.terms[static_cast<std::size_t>(order)])
                           : std::numeric_limits<double>::infinity();
    if (est < best.error_estimate) {
      best.value = value;
      best.error_estimate = est;
      best.cutoff = n_cut;
      best.order = order;
    }
    // Summation roundoff puts a floor under what any order can certify.
    const double floor = 8.0 * std::numeric_limits<double>::epsilon() *
                         (std::abs(value) + std::log(static_cast<double>(n_cut)));
    if (best.error_estimate <= accuracy) {
      if (accuracy < floor) break;
      return best;
    }
    n_cut *= 2;
  }
  throw PrecisionError("zeta_em: accuracy " + std::to_string(accuracy) +
                       " not reachable (best estimate " +
                       std::to_string(best.error_estimate) + ")");
}

cplx zeta(cplx s) { return zeta_em(s).value; }

double sup_on_disc(cplx center, double radius, std::size_t samples, unsigned threads) {
  if (!(radius >= 0.0)) throw DomainError("sup_on_disc: negative radius");
  if (center.real() - radius <= 0.0)
    throw DomainError("sup_on_disc: disc leaves the half-plane Re s > 0");
  if (std::abs(center - 1.0) <= radius)
    throw DomainError("sup_on_disc: disc contains the pole s = 1");
  if (radius == 0.0) return std::abs(zeta(center));
  if (samples == 0) throw DomainError("sup_on_disc: need samples >= 1");
  const auto pts = quad::circle_points(center, radius, samples);
  std::vector<double> mod(samples);
  parallel_for(samples, threads, [&](std::size_t i) { mod[i] = std::abs(zeta(pts[i])); });
  return *std::max_element(mod.begin(), mod.end());
}

}  // namespace zetalab::zeta
