#pragma once

#include <cstddef>
#include <vector>

#include "zetalab/common.hpp"

namespace zetalab::zeta {

struct ZetaValue {
  cplx s;
  cplx value;
  double error_estimate = 0.0;  // |order k - order k+1|
  std::size_t cutoff = 0;       // N actually used
  int order = 0;                // Bernoulli terms B_2..B_{2*order}
};

inline constexpr double kMaxAbsT = 1e3;

// Euler-Maclaurin summation. Starts at N = max(50, ceil(1.3|t|) + 20) with
// corrections through B_4 and escalates order and N until the estimate is
// below `accuracy`. Pre: Re s > 0, |Im s| <= 1e3.
// Throws PoleError at s = 1, DomainError outside the region and
// PrecisionError when the accuracy cannot be met.
ZetaValue zeta_em(cplx s, double accuracy = 1e-12);

// Shorthand for zeta_em(s).value.
cplx zeta(cplx s);

// max |zeta| over `samples` boundary points of |s - center| = radius.
// The disc must lie in Re s > 0 and must not contain s = 1.
double sup_on_disc(cplx center, double radius, std::size_t samples = 256,
                   unsigned threads = 1);

}  // namespace zetalab::zeta
