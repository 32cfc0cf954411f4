#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace zetalab {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Error taxonomy shared by every module. All derive from std::runtime_error so
// callers that only care about "something went wrong" can catch one type.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested size exceeds what the routine can handle (search space, sieve, ...).
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested accuracy could not be certified at the configured depth.
struct PrecisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation at s = 1.
struct PoleError : DomainError {
  using DomainError::DomainError;
};

// A contour passed (numerically) through a zero of the function.
struct ContourError : DomainError {
  using DomainError::DomainError;
};

// e^{2 pi i theta}
inline cplx unit_phase(double theta) {
  const double a = kTwoPi * theta;
  return {std::cos(a), std::sin(a)};
}

// Fractional part in [0, 1).
inline double frac(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

}  // namespace zetalab
