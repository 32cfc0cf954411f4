#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

#include "zetalab/kernels.hpp"

namespace zetalab::simd {
namespace {

bool cpu_has_avx2() {
#if defined(ZETALAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Level initial_level() {
  Level level = cpu_has_avx2() ? Level::kAvx2 : Level::kScalar;
  if (const char* env = std::getenv("ZETALAB_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) level = Level::kScalar;
    // Any other value keeps the CPUID choice.
  }
  return level;
}

std::atomic<int>& level_slot() {
  static std::atomic<int> slot{static_cast<int>(initial_level())};
  return slot;
}

const detail::KernelTable& table() {
#if defined(ZETALAB_HAVE_AVX2)
  if (level_slot().load(std::memory_order_relaxed) == static_cast<int>(Level::kAvx2))
    return detail::avx2_table();
#endif
  return detail::scalar_table();
}

void check_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string("simd: size mismatch in ") + what);
}

}  // namespace

Level active_level() { return static_cast<Level>(level_slot().load()); }

bool supported(Level level) { return level == Level::kScalar || cpu_has_avx2(); }

bool set_level(Level level) {
  if (!supported(level)) return false;
  level_slot().store(static_cast<int>(level));
  return true;
}

const char* level_name(Level level) {
  return level == Level::kAvx2 ? "avx2" : "scalar";
}

void factor_product(std::span<const double> w_re, std::span<const double> w_im,
                    const double* z_re, const double* z_im, std::size_t stride,
                    std::span<double> acc_re, std::span<double> acc_im) {
  check_same(w_re.size(), w_im.size(), "factor_product");
  check_same(acc_re.size(), acc_im.size(), "factor_product");
  if (acc_re.size() > stride) throw std::invalid_argument("simd: stride too small");
  table().factor_product(w_re.data(), w_im.data(), w_re.size(), z_re, z_im, stride,
                         acc_re.data(), acc_im.data(), acc_re.size());
}

void horner_real(std::span<const double> c_re, std::span<const double> c_im,
                 std::span<const double> x, std::span<double> out_re,
                 std::span<double> out_im) {
  check_same(c_re.size(), c_im.size(), "horner_real");
  check_same(x.size(), out_re.size(), "horner_real");
  check_same(x.size(), out_im.size(), "horner_real");
  table().horner_real(c_re.data(), c_im.data(), c_re.size(), x.data(), out_re.data(),
                      out_im.data(), x.size());
}

void horner_complex(std::span<const double> c_re, std::span<const double> c_im,
                    std::span<const double> z_re, std::span<const double> z_im,
                    std::span<double> out_re, std::span<double> out_im) {
  check_same(c_re.size(), c_im.size(), "horner_complex");
  check_same(z_re.size(), z_im.size(), "horner_complex");
  check_same(z_re.size(), out_re.size(), "horner_complex");
  check_same(z_re.size(), out_im.size(), "horner_complex");
  table().horner_complex(c_re.data(), c_im.data(), c_re.size(), z_re.data(), z_im.data(),
                         out_re.data(), out_im.data(), z_re.size());
}

double weighted_abs_diff(std::span<const double> w, std::span<const double> x,
                         std::span<const double> y) {
  check_same(w.size(), x.size(), "weighted_abs_diff");
  check_same(w.size(), y.size(), "weighted_abs_diff");
  return table().weighted_abs_diff(w.data(), x.data(), y.data(), w.size());
}

double star_discrepancy_sorted(std::span<const double> x) {
  return table().star_discrepancy_sorted(x.data(), x.size());
}

}  // namespace zetalab::simd
