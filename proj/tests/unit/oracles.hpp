#pragma once

// Reference evaluators that share no code with the library.

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Borwein's alternating-series acceleration for zeta (valid for Re s > 0).
inline cplx zeta_borwein(cplx s, int n = 80) {
  std::vector<double> d(n + 1);
  double term = 1.0 / n;  // i = 0 term of n * sum (n+i-1)! 4^i / ((n-i)! (2i)!)
  double sum = term;
  d[0] = n * sum;
  for (int i = 1; i <= n; ++i) {
    term *= 4.0 * (n + i - 1) * (n - i + 1) / ((2.0 * i - 1) * (2.0 * i));
    sum += term;
    d[i] = n * sum;
  }
  cplx acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    acc += sign * (d[k] - d[n]) * std::exp(-s * std::log(k + 1.0));
  }
  return -acc / (d[n] * (1.0 - std::exp((1.0 - s) * std::log(2.0))));
}

// Laurent expansion about s = 1 with Stieltjes constants gamma_0..gamma_10.
inline double zeta_laurent(double s) {
  static const double g[] = {0.5772156649015329,     -0.07281584548367672,
                             -0.009690363192872318,  0.002053834420303346,
                             0.002325370065467300,   0.0007933238173010627,
                             -0.0002387693454301996, -0.0005272895670577510,
                             -0.0003521233538030395, -0.00003435953341980,
                             0.0002053328149090648};
  const double h = s - 1.0;
  double acc = 1.0 / h;
  double pw = 1.0;
  double fact = 1.0;
  for (int n = 0; n <= 10; ++n) {
    if (n > 0) {
      pw *= h;
      fact *= n;
    }
    acc += ((n % 2 == 0) ? 1.0 : -1.0) * g[n] / fact * pw;
  }
  return acc;
}

// Partial sum of n^{-s}.
inline cplx dirichlet_partial(cplx s, long N) {
  cplx acc = 0.0;
  for (long n = N; n >= 1; --n) acc += std::exp(-s * std::log(static_cast<double>(n)));
  return acc;
}

}  // namespace oracle
