#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// on x86-64, an AVX2/FMA version; the active variant is chosen once at runtime
// from CPUID and can be overridden with ZETALAB_SIMD=scalar|avx2 or
// set_level(). The variants agree to rounding (FMA contraction and lane-wise
// reduction order differ), which tests/unit/test_kernels.cpp checks.

#include <cstddef>
#include <span>

namespace zetalab::simd {

enum class Level { kScalar = 0, kAvx2 = 1 };

Level active_level();
bool supported(Level level);
// Returns false (and leaves the level unchanged) when unsupported.
bool set_level(Level level);
const char* level_name(Level level);

// Complex numbers are passed structure-of-arrays: separate re/im spans.

// acc[j] *= prod_p (1 - w[p] * z[p][j])  for j < acc_re.size().
// z is row-major with one row of `stride` entries per p.
void factor_product(std::span<const double> w_re, std::span<const double> w_im,
                    const double* z_re, const double* z_im, std::size_t stride,
                    std::span<double> acc_re, std::span<double> acc_im);

// out[j] = sum_n c[n] * x[j]^n  (complex coefficients, real abscissae).
void horner_real(std::span<const double> c_re, std::span<const double> c_im,
                 std::span<const double> x, std::span<double> out_re,
                 std::span<double> out_im);

// out[j] = sum_n c[n] * z[j]^n  (complex coefficients, complex points).
void horner_complex(std::span<const double> c_re, std::span<const double> c_im,
                    std::span<const double> z_re, std::span<const double> z_im,
                    std::span<double> out_re, std::span<double> out_im);

// sum_n w[n] * |x[n] - y[n]|
double weighted_abs_diff(std::span<const double> w, std::span<const double> x,
                         std::span<const double> y);

// 1-D star discrepancy of an ascending sample in [0,1]:
// max_i max((i+1)/n - x_i, x_i - i/n).
double star_discrepancy_sorted(std::span<const double> x);

namespace detail {

struct KernelTable {
  void (*factor_product)(const double*, const double*, std::size_t, const double*,
                         const double*, std::size_t, double*, double*, std::size_t);
  void (*horner_real)(const double*, const double*, std::size_t, const double*,
                      double*, double*, std::size_t);
  void (*horner_complex)(const double*, const double*, std::size_t, const double*,
                         const double*, double*, double*, std::size_t);
  double (*weighted_abs_diff)(const double*, const double*, const double*,
                              std::size_t);
  double (*star_discrepancy_sorted)(const double*, std::size_t);
};

const KernelTable& scalar_table();
#if defined(ZETALAB_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace detail
}  // namespace zetalab::simd
