// Compiled with -mavx2 -mfma; only reached after CPUID reports both.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "zetalab/kernels.hpp"

namespace zetalab::simd::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

void factor_product(const double* w_re, const double* w_im, std::size_t rows,
                    const double* z_re, const double* z_im, std::size_t stride,
                    double* acc_re, double* acc_im, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d ar = _mm256_loadu_pd(acc_re + j);
    __m256d ai = _mm256_loadu_pd(acc_im + j);
    for (std::size_t p = 0; p < rows; ++p) {
      const __m256d wr = _mm256_set1_pd(w_re[p]);
      const __m256d wi = _mm256_set1_pd(w_im[p]);
      const __m256d zr = _mm256_loadu_pd(z_re + p * stride + j);
      const __m256d zi = _mm256_loadu_pd(z_im + p * stride + j);
      // f = 1 - w z
      const __m256d fr = _mm256_sub_pd(one, _mm256_fmsub_pd(wr, zr, _mm256_mul_pd(wi, zi)));
      const __m256d fi = _mm256_xor_pd(_mm256_fmadd_pd(wr, zi, _mm256_mul_pd(wi, zr)),
                                       _mm256_set1_pd(-0.0));
      const __m256d nr = _mm256_fmsub_pd(ar, fr, _mm256_mul_pd(ai, fi));
      const __m256d ni = _mm256_fmadd_pd(ar, fi, _mm256_mul_pd(ai, fr));
      ar = nr;
      ai = ni;
    }
    _mm256_storeu_pd(acc_re + j, ar);
    _mm256_storeu_pd(acc_im + j, ai);
  }
  if (j < n) {
    for (std::size_t p = 0; p < rows; ++p) {
      const double wr = w_re[p];
      const double wi = w_im[p];
      for (std::size_t k = j; k < n; ++k) {
        const double zr = z_re[p * stride + k];
        const double zi = z_im[p * stride + k];
        const double fr = 1.0 - (wr * zr - wi * zi);
        const double fi = -(wr * zi + wi * zr);
        const double r = acc_re[k];
        const double i = acc_im[k];
        acc_re[k] = r * fr - i * fi;
        acc_im[k] = r * fi + i * fr;
      }
    }
  }
}

void horner_real(const double* c_re, const double* c_im, std::size_t terms,
                 const double* x, double* out_re, double* out_im, std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d xv = _mm256_loadu_pd(x + j);
    __m256d ar = _mm256_setzero_pd();
    __m256d ai = _mm256_setzero_pd();
    for (std::size_t k = terms; k-- > 0;) {
      ar = _mm256_fmadd_pd(ar, xv, _mm256_set1_pd(c_re[k]));
      ai = _mm256_fmadd_pd(ai, xv, _mm256_set1_pd(c_im[k]));
    }
    _mm256_storeu_pd(out_re + j, ar);
    _mm256_storeu_pd(out_im + j, ai);
  }
  for (; j < n; ++j) {
    double ar = 0.0;
    double ai = 0.0;
    for (std::size_t k = terms; k-- > 0;) {
      ar = ar * x[j] + c_re[k];
      ai = ai * x[j] + c_im[k];
    }
    out_re[j] = ar;
    out_im[j] = ai;
  }
}

void horner_complex(const double* c_re, const double* c_im, std::size_t terms,
                    const double* z_re, const double* z_im, double* out_re,
                    double* out_im, std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d zr = _mm256_loadu_pd(z_re + j);
    const __m256d zi = _mm256_loadu_pd(z_im + j);
    __m256d ar = _mm256_setzero_pd();
    __m256d ai = _mm256_setzero_pd();
    for (std::size_t k = terms; k-- > 0;) {
      const __m256d tr =
          _mm256_add_pd(_mm256_fmsub_pd(ar, zr, _mm256_mul_pd(ai, zi)), _mm256_set1_pd(c_re[k]));
      const __m256d ti =
          _mm256_add_pd(_mm256_fmadd_pd(ar, zi, _mm256_mul_pd(ai, zr)), _mm256_set1_pd(c_im[k]));
      ar = tr;
      ai = ti;
    }
    _mm256_storeu_pd(out_re + j, ar);
    _mm256_storeu_pd(out_im + j, ai);
  }
  for (; j < n; ++j) {
    const double zr = z_re[j];
    const double zi = z_im[j];
    double ar = 0.0;
    double ai = 0.0;
    for (std::size_t k = terms; k-- > 0;) {
      const double tr = ar * zr - ai * zi + c_re[k];
      const double ti = ar * zi + ai * zr + c_im[k];
      ar = tr;
      ai = ti;
    }
    out_re[j] = ar;
    out_im[j] = ai;
  }
}

double weighted_abs_diff(const double* w, const double* x, const double* y,
                         std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_andnot_pd(sign, d), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * std::fabs(x[i] - y[i]);
  return s;
}

double star_discrepancy_sorted(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  const double inv = 1.0 / static_cast<double>(n);
  const __m256d vinv = _mm256_set1_pd(inv);
  __m256d idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  const __m256d four = _mm256_set1_pd(4.0);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d lo = _mm256_mul_pd(idx, vinv);
    const __m256d hi = _mm256_mul_pd(_mm256_add_pd(idx, one), vinv);
    best = _mm256_max_pd(best, _mm256_max_pd(_mm256_sub_pd(hi, xv), _mm256_sub_pd(xv, lo)));
    idx = _mm256_add_pd(idx, four);
  }
  double d = hmax(best);
  for (; i < n; ++i) {
    const double lo = static_cast<double>(i) * inv;
    const double hi = static_cast<double>(i + 1) * inv;
    d = std::max(d, std::max(hi - x[i], x[i] - lo));
  }
  return d;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{factor_product, horner_real, horner_complex,
                                 weighted_abs_diff, star_discrepancy_sorted};
  return table;
}

}  // namespace zetalab::simd::detail
