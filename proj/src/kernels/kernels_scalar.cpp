#include <algorithm>
#include <cmath>

#include "zetalab/kernels.hpp"

namespace zetalab::simd::detail {
namespace {

void factor_product(const double* w_re, const double* w_im, std::size_t rows,
                    const double* z_re, const double* z_im, std::size_t stride,
                    double* acc_re, double* acc_im, std::size_t n) {
  for (std::size_t p = 0; p < rows; ++p) {
    const double wr = w_re[p];
    const double wi = w_im[p];
    const double* zr = z_re + p * stride;
    const double* zi = z_im + p * stride;
    for (std::size_t j = 0; j < n; ++j) {
      const double fr = 1.0 - (wr * zr[j] - wi * zi[j]);
      const double fi = -(wr * zi[j] + wi * zr[j]);
      const double ar = acc_re[j];
      const double ai = acc_im[j];
      acc_re[j] = ar * fr - ai * fi;
      acc_im[j] = ar * fi + ai * fr;
    }
  }
}

void horner_real(const double* c_re, const double* c_im, std::size_t terms,
                 const double* x, double* out_re, double* out_im, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
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
  for (std::size_t j = 0; j < n; ++j) {
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
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * std::fabs(x[i] - y[i]);
  return s;
}

double star_discrepancy_sorted(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  const double inv = 1.0 / static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = static_cast<double>(i) * inv;
    const double hi = static_cast<double>(i + 1) * inv;
    d = std::max(d, std::max(hi - x[i], x[i] - lo));
  }
  return d;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{factor_product, horner_real, horner_complex,
                                 weighted_abs_diff, star_discrepancy_sorted};
  return table;
}

}  // namespace zetalab::simd::detail
