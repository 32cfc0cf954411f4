#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace zetalab::cube {

// Point of [0,1]^N, the first N coordinates of the infinite cube.
class CubePoint {
 public:
  CubePoint() = default;
  explicit CubePoint(std::vector<double> coords);  // DomainError outside [0,1]
  static CubePoint zeros(std::size_t dim) { return CubePoint(std::vector<double>(dim, 0.0)); }

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<double>& coords() const { return coords_; }

 private:
  std::vector<double> coords_;
};

struct Distance {
  double value = 0.0;       // sum_{n<=N} e^{1-n} |x_n - y_n|
  double tail_bound = 0.0;  // sum_{n>N} e^{1-n} = e^{1-N}/(e-1), bounds the omitted part
};

// e^{1-n}, n = 1..N
std::vector<double> tikhonov_weights(std::size_t N);

Distance tikhonov_dist(const CubePoint& x, const CubePoint& y);

// ({t lambda_1}, ..., {t lambda_N}) with lambda_n = log(p_n) / 2pi.
CubePoint curve_point(double t, std::size_t N);
// Same with an explicit frequency vector.
CubePoint curve_point(double t, std::span<const double> lambda);

// Bijection of {1..m}, identity beyond m. Acts on points by (sigma x)_n = x_{sigma(n)},
// which is a right action: sigma(tau x) = (tau o sigma) x.
class FinitePermutation {
 public:
  FinitePermutation() = default;
  // images[i] = sigma(i + 1), 1-based values. DomainError unless a bijection of {1..m}.
  explicit FinitePermutation(std::vector<std::size_t> images);
  static FinitePermutation swap(std::size_t a, std::size_t b);

  std::size_t support() const { return map_.size(); }
  std::size_t operator()(std::size_t n) const { return n <= map_.size() ? map_[n - 1] : n; }
  const std::vector<std::size_t>& images() const { return map_; }

 private:
  std::vector<std::size_t> map_;
};

// (sigma o tau)(n) = sigma(tau(n))
FinitePermutation compose(const FinitePermutation& sigma, const FinitePermutation& tau);

// DomainError if the support exceeds x.dim().
CubePoint apply_permutation(const FinitePermutation& sigma, const CubePoint& x);

struct TikhonovSphere {
  CubePoint center;
  double radius = 0.0;

  bool contains(const CubePoint& x) const;
};

struct SphereFamily {
  std::size_t dim = 0;
  std::vector<TikhonovSphere> spheres;
};

// {"dim": N, "spheres": [{"center": [...], "radius": r}, ...]}
SphereFamily load_spheres(const std::string& json_text);
SphereFamily load_spheres_file(const std::string& path);

inline constexpr std::size_t kMaxExactDim = 21;

// vol{x in [0,1]^N : sum e^{1-n} x_n <= u}, by inclusion-exclusion in
// extended precision. CapacityError unless 1 <= N <= 21.
double weighted_box_volume(double u, std::size_t N);

struct ContinuityCheck {
  double difference = 0.0;  // mu_N(r) - mu_N(r - eps)
  double bound = 0.0;       // eps 2^N
  double margin = 0.0;      // bound - difference
};

ContinuityCheck volume_continuity_check(double r, double eps, std::size_t N);

struct HittingOptions {
  std::size_t N = 10;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  // Applied jointly to the curve coordinates and every sphere centre.
  FinitePermutation permutation;
};

struct HittingEstimate {
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t hits = 0;
  double estimate = 0.0;       // m{t in [0,1] : curve_point(t, N) in union}
  double stderr_ = 0.0;
  double sphere_measure = 0.0;  // MC estimate of sum of mu_N(sphere)
  double sphere_measure_stderr = 0.0;
  double c = 0.0;
  double bound = 0.0;           // 6 c sum mu
  bool within_bound = false;    // estimate <= bound + 3 (stderr + 6c stderr_mu)
};

HittingEstimate hitting_measure_mc(const SphereFamily& family, const HittingOptions& opt);

struct CConstant {
  std::size_t terms = 0;
  double partial = 0.0;      // prod_{m<=terms} (1 + 2/m^2)
  double tail_factor = 0.0;  // exp(2 sum_{m>terms} 1/m^2) >= prod_{m>terms}(1 + 2/m^2)
  double lower = 0.0;        // partial
  double upper = 0.0;        // partial * tail_factor
};

CConstant c_constant(std::size_t terms);

// sinh(pi sqrt 2) / (pi sqrt 2)
double c_closed_form();

struct DiscrepancyOptions {
  std::size_t t_count = 4096;
  std::size_t N = 4;
  double t_max = 1000.0;    // t uniform on [0, t_max]
  std::uint64_t seed = 1;
  std::size_t pair_dims = 4;  // 2-D discrepancy for pairs among the first pair_dims coords
  std::size_t grid = 64;
  // Overrides lambda_n; empty means log(p_n) / 2pi.
  std::vector<double> lambda;
};

struct PairDiscrepancy {
  std::size_t i = 0, j = 0;  // 1-based coordinates
  double value = 0.0;
};

struct DiscrepancyReport {
  std::vector<double> per_coordinate;  // exact 1-D star discrepancy
  std::vector<PairDiscrepancy> pairs;  // grid estimate, a lower bound for D*
};

DiscrepancyReport discrepancy(const DiscrepancyOptions& opt);

// Indices n_1 < ... < n_k (1-based) with lambda_{n_1} > 1 and
// lambda_{n_m} > 4 lambda_{n_{m-1}} / delta. Requires 0 < delta < 0.1;
// CapacityError if the sequence runs out before k indices.
std::vector<std::size_t> interval_schedule(std::span<const double> lambda, double delta,
                                           std::size_t k);

struct IntervalBound {
  double product = 0.0;  // (2+l_1)(2+delta l_2/l_1)...(2+delta l_k/l_{k-1}) delta / l_k
  double target = 0.0;   // delta^k c
};

IntervalBound interval_bound(std::span<const double> lambda,
                             std::span<const std::size_t> indices, double delta);

// Lebesgue measure of {t in [0,1] : |{t lambda_{n_m}} - alpha_m| <= delta/2 for all m},
// computed exactly by intersecting the interval lists.
double cube_hitting_measure(std::span<const double> lambda, std::span<const std::size_t> indices,
                            std::span<const double> alpha, double delta);

}  // namespace zetalab::cube
