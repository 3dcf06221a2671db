#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "icegsa/error.hpp"
#include "icegsa/simd/kernels.hpp"
#include "kernel_table.hpp"

namespace icegsa::simd {
namespace {

Isa detect() {
  if (const char* env = std::getenv("ICEGSA_ISA"); env != nullptr && std::strcmp(env, "scalar") == 0) {
    return Isa::scalar;
  }
  return avx2_supported() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

const KernelTable& table() {
#if defined(ICEGSA_HAVE_AVX2)
  if (current().load(std::memory_order_relaxed) == Isa::avx2) return avx2_kernels();
#endif
  return scalar_kernels();
}

}  // namespace

const char* to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool avx2_supported() {
#if defined(ICEGSA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(); }

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_supported()) throw ParameterError("AVX2 is not available on this CPU");
  current().store(isa);
}

bool is_flat(const double* x, std::size_t n) {
  double sum = 0.0;
  double maxabs = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum = sum + x[k];
    maxabs = std::max(maxabs, std::fabs(x[k]));
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = x[k] - mean;
    ss = ss + d * d;
  }
  return is_flat(ss, maxabs, n, kFlatTolerance);
}

void row_std(const double* data, std::size_t rows, std::size_t cols, std::size_t stride,
             double* out) {
  table().row_std(data, rows, cols, stride, out);
}

void row_pearson(const double* data, std::size_t rows, std::size_t cols, std::size_t stride,
                 const double* ref_centered, double ref_ss, double* out) {
  table().row_pearson(data, rows, cols, stride, ref_centered, ref_ss, out);
}

void column_mean(const double* data, std::size_t rows, std::size_t cols, std::size_t stride,
                 double* out) {
  table().column_mean(data, rows, cols, stride, out);
}

void recurrence_table(const double* alpha, const double* b, std::size_t degree, const double* x,
                      std::size_t n, double* out) {
  table().recurrence_table(alpha, b, degree, x, n, out);
}

void accumulate_product(double coef, const double* const* factors, std::size_t n_factors,
                        std::size_t n, double* out) {
  table().accumulate_product(coef, factors, n_factors, n, out);
}

void product(const double* const* factors, std::size_t n_factors, std::size_t n, double* out) {
  table().product(factors, n_factors, n, out);
}

}  // namespace icegsa::simd
