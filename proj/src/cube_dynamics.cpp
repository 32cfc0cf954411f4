#include "zetalab/cube_dynamics.hpp"

#include <algorithm>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "zetalab/common.hpp"
#include "zetalab/kernels.hpp"
#include "zetalab/parallel.hpp"
#include "zetalab/prime_engine.hpp"
#include "zetalab/rng.hpp"

namespace zetalab::cube {
namespace {

// About 60 decimal digits of headroom over the worst N = 21 cancellation.
using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<200>>;

double weighted_sum(std::span<const double> w, const CubePoint& x, const CubePoint& y) {
  return simd::weighted_abs_diff(w, x.coords(), y.coords());
}

}  // namespace

CubePoint::CubePoint(std::vector<double> coords) : coords_(std::move(coords)) {
  for (double c : coords_)
    if (!(c >= 0.0 && c <= 1.0)) throw DomainError("CubePoint: coordinate outside [0,1]");
}

std::vector<double> tikhonov_weights(std::size_t N) {
  std::vector<double> w(N);
  for (std::size_t n = 0; n < N; ++n) w[n] = std::exp(-static_cast<double>(n));
  return w;
}

Distance tikhonov_dist(const CubePoint& x, const CubePoint& y) {
  if (x.dim() != y.dim()) throw DomainError("tikhonov_dist: dimension mismatch");
  const auto w = tikhonov_weights(x.dim());
  Distance d;
  d.value = weighted_sum(w, x, y);
  d.tail_bound = std::exp(1.0 - static_cast<double>(x.dim())) / (std::numbers::e - 1.0);
  return d;
}

CubePoint curve_point(double t, std::span<const double> lambda) {
  std::vector<double> c(lambda.size());
  for (std::size_t n = 0; n < c.size(); ++n) c[n] = frac(t * lambda[n]);
  return CubePoint(std::move(c));
}

CubePoint curve_point(double t, std::size_t N) {
  if (N < 1) throw DomainError("curve_point: N must be >= 1");
  const auto lambda = primes::frequencies(N);
  return curve_point(t, lambda);
}

FinitePermutation::FinitePermutation(std::vector<std::size_t> images) : map_(std::move(images)) {
  std::vector<char> seen(map_.size() + 1, 0);
  for (auto v : map_) {
    if (v < 1 || v > map_.size() || seen[v])
      throw DomainError("FinitePermutation: not a bijection of {1..m}");
    seen[v] = 1;
  }
}

FinitePermutation FinitePermutation::swap(std::size_t a, std::size_t b) {
  if (a < 1 || b < 1) throw DomainError("FinitePermutation::swap: indices are 1-based");
  std::vector<std::size_t> m(std::max(a, b));
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = i + 1;
  std::swap(m[a - 1], m[b - 1]);
  return FinitePermutation(std::move(m));
}

FinitePermutation compose(const FinitePermutation& sigma, const FinitePermutation& tau) {
  const std::size_t m = std::max(sigma.support(), tau.support());
  std::vector<std::size_t> out(m);
  for (std::size_t n = 1; n <= m; ++n) out[n - 1] = sigma(tau(n));
  return FinitePermutation(std::move(out));
}

CubePoint apply_permutation(const FinitePermutation& sigma, const CubePoint& x) {
  if (sigma.support() > x.dim())
    throw DomainError("apply_permutation: permutation support exceeds the dimension");
  std::vector<double> c(x.coords());
  for (std::size_t n = 1; n <= sigma.support(); ++n) c[n - 1] = x[sigma(n) - 1];
  return CubePoint(std::move(c));
}

bool TikhonovSphere::contains(const CubePoint& x) const {
  return tikhonov_dist(center, x).value < radius;
}

SphereFamily load_spheres(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("load_spheres: ") + e.what());
  }
  SphereFamily fam;
  if (!j.contains("dim") || !j.contains("spheres")) throw DomainError("load_spheres: need dim and spheres");
  fam.dim = j.at("dim").get<std::size_t>();
  for (const auto& s : j.at("spheres")) {
    TikhonovSphere sp;
    auto c = s.at("center").get<std::vector<double>>();
    if (c.size() != fam.dim) throw DomainError("load_spheres: centre dimension differs from dim");
    sp.center = CubePoint(std::move(c));
    sp.radius = s.at("radius").get<double>();
    if (!(sp.radius > 0.0)) throw DomainError("load_spheres: radius must be positive");
    fam.spheres.push_back(std::move(sp));
  }
  return fam;
}

SphereFamily load_spheres_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("load_spheres_file: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_spheres(ss.str());
}

double weighted_box_volume(double u, std::size_t N) {
  if (N < 1 || N > kMaxExactDim) throw CapacityError("weighted_box_volume: need 1 <= N <= 21");
  if (!(u > 0.0)) return 0.0;
  std::vector<Big> a(N);
  Big total = 0;
  for (std::size_t n = 0; n < N; ++n) {
    a[n] = exp(Big(-static_cast<double>(n)));
    total += a[n];
  }
  const Big U(u);
  if (U >= total) return 1.0;

  // Only subsets with sum a_S < u contribute; a depth-first walk with the
  // partial sum prunes everything else.
  Big acc = 0;
  struct Frame {
    std::size_t next;
    Big sum;
    int sign;
  };
  std::vector<Frame> stack;
  stack.push_back({0, Big(0), 1});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const Big rest = U - f.sum;
    Big term = pow(rest, static_cast<int>(N));
    acc += f.sign > 0 ? term : Big(-term);
    for (std::size_t n = f.next; n < N; ++n) {
      const Big s = f.sum + a[n];
      if (s < U) stack.push_back({n + 1, s, -f.sign});
    }
  }
  Big denom = 1;
  for (std::size_t n = 1; n <= N; ++n) denom *= Big(static_cast<double>(n)) * a[n - 1];
  const double v = static_cast<double>(acc / denom);
  return std::clamp(v, 0.0, 1.0);
}

ContinuityCheck volume_continuity_check(double r, double eps, std::size_t N) {
  if (eps < 0.0) throw DomainError("volume_continuity_check: eps must be nonnegative");
  ContinuityCheck c;
  c.difference = weighted_box_volume(r, N) - weighted_box_volume(r - eps, N);
  c.bound = eps * std::ldexp(1.0, static_cast<int>(N));
  c.margin = c.bound - c.difference;
  return c;
}

double c_closed_form() {
  const double x = kPi * std::sqrt(2.0);
  return std::sinh(x) / x;
}

CConstant c_constant(std::size_t terms) {
  if (terms < 1) throw DomainError("c_constant: terms must be >= 1");
  CConstant c;
  c.terms = terms;
  double p = 1.0;
  for (std::size_t m = 1; m <= terms; ++m) {
    const double md = static_cast<double>(m);
    p *= 1.0 + 2.0 / (md * md);
  }
  c.partial = p;
  // sum_{m>n} 1/m^2 = psi_1(n + 1)
  c.tail_factor = std::exp(2.0 * boost::math::trigamma(static_cast<double>(terms) + 1.0));
  c.lower = p;
  c.upper = p * c.tail_factor;
  return c;
}

HittingEstimate hitting_measure_mc(const SphereFamily& family, const HittingOptions& opt) {
  if (opt.N < 1 || opt.N > 200) throw DomainError("hitting_measure_mc: need 1 <= N <= 200");
  if (opt.samples < 1000) throw DomainError("hitting_measure_mc: need at least 1000 samples");
  for (const auto& s : family.spheres)
    if (s.center.dim() != opt.N) throw DomainError("hitting_measure_mc: sphere dimension differs from N");
  if (opt.permutation.support() > opt.N)
    throw DomainError("hitting_measure_mc: permutation support exceeds N");

  std::vector<TikhonovSphere> spheres = family.spheres;
  for (auto& s : spheres) s.center = apply_permutation(opt.permutation, s.center);
  const auto lambda = primes::frequencies(opt.N);
  const auto w = tikhonov_weights(opt.N);
  const CounterRng rng(opt.seed);
  const CounterRng curve_stream = rng.substream(0);
  const CounterRng box_stream = rng.substream(1);

  auto inside_any = [&](const CubePoint& x) {
    for (const auto& s : spheres)
      if (weighted_sum(w, s.center, x) < s.radius) return true;
    return false;
  };

  const std::size_t chunks = std::max<std::size_t>(1, opt.threads) * 4;
  std::vector<std::uint64_t> hits(chunks, 0);
  std::vector<std::vector<std::uint64_t>> sphere_hits(chunks, std::vector<std::uint64_t>(spheres.size(), 0));
  parallel_for(chunks, opt.threads, [&](std::size_t c) {
    const std::uint64_t begin = opt.samples * c / chunks;
    const std::uint64_t end = opt.samples * (c + 1) / chunks;
    std::vector<double> x(opt.N);
    for (std::uint64_t j = begin; j < end; ++j) {
      const double t = curve_stream.uniform(j);
      const auto p = apply_permutation(opt.permutation, curve_point(t, lambda));
      if (inside_any(p)) ++hits[c];
      for (std::size_t n = 0; n < opt.N; ++n) x[n] = box_stream.uniform(j, n);
      const CubePoint q(x);
      for (std::size_t k = 0; k < spheres.size(); ++k)
        if (weighted_sum(w, spheres[k].center, q) < spheres[k].radius) ++sphere_hits[c][k];
    }
  });

  HittingEstimate est;
  est.samples = opt.samples;
  est.seed = opt.seed;
  for (auto h : hits) est.hits += h;
  const double n = static_cast<double>(opt.samples);
  est.estimate = static_cast<double>(est.hits) / n;
  est.stderr_ = std::sqrt(est.estimate * (1.0 - est.estimate) / n);
  double var = 0.0;
  for (std::size_t k = 0; k < spheres.size(); ++k) {
    std::uint64_t h = 0;
    for (std::size_t c = 0; c < chunks; ++c) h += sphere_hits[c][k];
    const double m = static_cast<double>(h) / n;
    est.sphere_measure += m;
    var += m * (1.0 - m) / n;
  }
  est.sphere_measure_stderr = std::sqrt(var);
  est.c = c_closed_form();
  est.bound = 6.0 * est.c * est.sphere_measure;
  est.within_bound =
      est.estimate <= est.bound + 3.0 * (est.stderr_ + 6.0 * est.c * est.sphere_measure_stderr);
  return est;
}

DiscrepancyReport discrepancy(const DiscrepancyOptions& opt) {
  if (opt.t_count < 100) throw DomainError("discrepancy: need t_count >= 100");
  if (opt.grid < 2) throw DomainError("discrepancy: grid must be >= 2");
  std::vector<double> lambda = opt.lambda;
  if (lambda.empty()) lambda = primes::frequencies(opt.N);
  if (lambda.size() < opt.N) throw DomainError("discrepancy: lambda shorter than N");
  lambda.resize(opt.N);

  const CounterRng rng(opt.seed);
  std::vector<double> t(opt.t_count);
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = opt.t_max * rng.uniform(j);

  std::vector<std::vector<double>> coord(opt.N, std::vector<double>(t.size()));
  for (std::size_t n = 0; n < opt.N; ++n)
    for (std::size_t j = 0; j < t.size(); ++j) coord[n][j] = frac(t[j] * lambda[n]);

  DiscrepancyReport rep;
  for (std::size_t n = 0; n < opt.N; ++n) {
    std::vector<double> s = coord[n];
    std::sort(s.begin(), s.end());
    rep.per_coordinate.push_back(simd::star_discrepancy_sorted(s));
  }

  const std::size_t G = opt.grid;
  const double inv = 1.0 / static_cast<double>(t.size());
  const std::size_t dims = std::min(opt.pair_dims, opt.N);
  for (std::size_t i = 0; i < dims; ++i) {
    for (std::size_t k = i + 1; k < dims; ++k) {
      // cum[a][b] = #{x_i < a/G, x_k < b/G}
      std::vector<std::uint32_t> cell((G + 1) * (G + 1), 0);
      for (std::size_t j = 0; j < t.size(); ++j) {
        const auto a = std::min<std::size_t>(G - 1, static_cast<std::size_t>(coord[i][j] * static_cast<double>(G)));
        const auto b = std::min<std::size_t>(G - 1, static_cast<std::size_t>(coord[k][j] * static_cast<double>(G)));
        ++cell[(a + 1) * (G + 1) + (b + 1)];
      }
      double worst = 0.0;
      for (std::size_t a = 1; a <= G; ++a) {
        for (std::size_t b = 1; b <= G; ++b) {
          auto& c = cell[a * (G + 1) + b];
          c += cell[(a - 1) * (G + 1) + b] + cell[a * (G + 1) + b - 1] - cell[(a - 1) * (G + 1) + b - 1];
          const double area = static_cast<double>(a * b) / static_cast<double>(G * G);
          worst = std::max(worst, std::fabs(static_cast<double>(c) * inv - area));
        }
      }
      rep.pairs.push_back({i + 1, k + 1, worst});
    }
  }
  return rep;
}

std::vector<std::size_t> interval_schedule(std::span<const double> lambda, double delta,
                                           std::size_t k) {
  if (!(delta > 0.0 && delta < 0.1)) throw DomainError("interval_schedule: need 0 < delta < 0.1");
  if (k < 1) throw DomainError("interval_schedule: k must be >= 1");
  std::vector<std::size_t> out;
  double need = 1.0;
  for (std::size_t n = 0; n < lambda.size() && out.size() < k; ++n) {
    if (lambda[n] > need) {
      out.push_back(n + 1);
      need = 4.0 * lambda[n] / delta;
    }
  }
  if (out.size() < k) throw CapacityError("interval_schedule: sequence exhausted before k indices");
  return out;
}

IntervalBound interval_bound(std::span<const double> lambda, std::span<const std::size_t> indices,
                             double delta) {
  if (indices.empty()) throw DomainError("interval_bound: no indices");
  IntervalBound b;
  double prev = lambda[indices[0] - 1];
  double p = 2.0 + prev;
  for (std::size_t m = 1; m < indices.size(); ++m) {
    const double l = lambda[indices[m] - 1];
    p *= 2.0 + delta * l / prev;
    prev = l;
  }
  b.product = p * delta / prev;
  b.target = std::pow(delta, static_cast<double>(indices.size())) * c_closed_form();
  return b;
}

double cube_hitting_measure(std::span<const double> lambda, std::span<const std::size_t> indices,
                            std::span<const double> alpha, double delta) {
  if (alpha.size() != indices.size()) throw DomainError("cube_hitting_measure: alpha size mismatch");
  std::vector<std::pair<double, double>> cur = {{0.0, 1.0}};
  for (std::size_t m = 0; m < indices.size(); ++m) {
    const double l = lambda[indices[m] - 1];
    const double lo = std::max(0.0, alpha[m] - delta / 2);
    const double hi = std::min(1.0, alpha[m] + delta / 2);
    std::vector<std::pair<double, double>> next;
    if (hi < lo) return 0.0;
    for (const auto& [a, b] : cur) {
      const auto first = static_cast<long long>(std::floor(a * l)) - 1;
      const auto last = static_cast<long long>(std::ceil(b * l)) + 1;
      for (long long q = first; q <= last; ++q) {
        const double s = std::max(a, (static_cast<double>(q) + lo) / l);
        const double e = std::min(b, (static_cast<double>(q) + hi) / l);
        if (e > s) next.emplace_back(s, e);
      }
    }
    cur = std::move(next);
    if (cur.empty()) return 0.0;
  }
  double total = 0.0;
  for (const auto& [a, b] : cur) total += b - a;
  return total;
}

}  // namespace zetalab::cube
