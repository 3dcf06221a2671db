#pragma once

#include <cstddef>

namespace icegsa::simd {

struct KernelTable {
  void (*row_std)(const double*, std::size_t, std::size_t, std::size_t, double*);
  void (*row_pearson)(const double*, std::size_t, std::size_t, std::size_t, const double*, double,
                      double*);
  void (*column_mean)(const double*, std::size_t, std::size_t, std::size_t, double*);
  void (*recurrence_table)(const double*, const double*, std::size_t, const double*, std::size_t,
                           double*);
  void (*accumulate_product)(double, const double* const*, std::size_t, std::size_t, double*);
  void (*product)(const double* const*, std::size_t, std::size_t, double*);
};

const KernelTable& scalar_kernels();
#if defined(ICEGSA_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

/// Shared between variants so the flatness decision is identical.
inline bool is_flat(double ss, double maxabs, std::size_t cols, double tolerance) {
  const double t = tolerance * maxabs;
  return ss <= static_cast<double>(cols - 1) * (t * t);
}

}  // namespace icegsa::simd
