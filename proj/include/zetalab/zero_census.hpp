#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "zetalab/common.hpp"
#include "zetalab/universality_search.hpp"

namespace zetalab::census {

using Evaluator = std::function<cplx(cplx)>;

inline constexpr std::size_t kMinSamples = 64;
inline constexpr double kContourFloor = 1e-12;

// Closed, positively oriented contour.
struct Contour {
  enum class Shape { kCircle, kRectangle };
  Shape shape = Shape::kCircle;
  cplx center = 0.0;
  double radius = 1.0;
  cplx lo = 0.0, hi = 0.0;  // rectangle corners: lower-left, upper-right
  std::size_t samples = 256;

  static Contour circle(cplx center, double radius, std::size_t samples = 256);
  static Contour rectangle(cplx lo, cplx hi, std::size_t samples = 256);

  // u in [0, 1] -> point, counterclockwise, point(0) == point(1).
  cplx point(double u) const;
  std::vector<double> parameters() const;  // u_k = k / samples
};

// DomainError unless the contour stays in Re s > 0 and off s = 1.
void check_zeta_contour(const Contour& c);

struct CensusReport {
  int winding = 0;
  double total_turns = 0.0;  // total argument change / 2 pi
  double min_modulus = 0.0;
  // |g| - |f - g| against a comparison function; NaN when there was none.
  double rouche_margin = std::numeric_limits<double>::quiet_NaN();
  bool refined = false;      // some step needed bisection
  std::size_t evaluations = 0;
  std::vector<double> trace;  // accumulated turns after each base sample
};

// Zeros minus poles inside c. ContourError if min |f| < 1e-12 on the visited
// points, PrecisionError if the turn count is more than 0.01 from an integer
// or bisection cannot bring every step below pi/2.
CensusReport winding_count(const Evaluator& f, const Contour& c);

// min over the samples of |g| - |f - g|. Positive means f and g have the same
// number of zeros inside.
double rouche_margin(const Evaluator& f, const Evaluator& g, const Contour& c);

struct ScanRow {
  double t = 0.0;
  double r = 0.0;
  double m = 0.0;            // min |zeta| on the circle
  double sup_error = 0.0;    // max |zeta - F_K| on the circle
  double margin = 0.0;       // rouche_margin(F_K, zeta)
  int count_zeta = -1;
  int count_product = -1;
  CensusReport zeta_census;     // rouche_margin filled in both
  CensusReport product_census;
  std::size_t stage_count = 0;
  std::uint64_t seed = 0;
  bool criterion = false;    // sup_error <= 0.25 m
  bool transfer_ok = true;   // margin > 0 implies equal counts
  std::string note;          // failure description, empty on success
};

struct ScanOptions {
  universality::DoublingOptions scheme;  // r and t are overridden per row
  std::size_t samples = 256;
  unsigned threads = 1;                  // rows in parallel
};

// One row per t on the circle |s - 3/4 - it| = r. Requires 0 < r < 1/4.
std::vector<ScanRow> strip_scan(const std::vector<double>& t_values, double r,
                                const ScanOptions& opt = {});

}  // namespace zetalab::census
