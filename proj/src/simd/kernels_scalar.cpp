// Reference implementations. The AVX2 variants must reproduce these operation by operation.

#include <algorithm>
#include <cmath>
#include <limits>

#include "icegsa/simd/kernels.hpp"
#include "kernel_table.hpp"

namespace icegsa::simd {
namespace {

void row_std_scalar(const double* data, std::size_t rows, std::size_t cols, std::size_t stride,
                    double* out) {
  const double n = static_cast<double>(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = data + r * stride;
    double sum = 0.0;
    for (std::size_t k = 0; k < cols; ++k) sum = sum + x[k];
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t k = 0; k < cols; ++k) {
      const double d = x[k] - mean;
      ss = ss + d * d;
    }
    out[r] = std::sqrt(ss / (n - 1.0));
  }
}

void row_pearson_scalar(const double* data, std::size_t rows, std::size_t cols, std::size_t stride,
                        const double* ref, double ref_ss, double* out) {
  const double n = static_cast<double>(cols);
  const double ref_norm = std::sqrt(ref_ss);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = data + r * stride;
    double sum = 0.0;
    double maxabs = 0.0;
    for (std::size_t k = 0; k < cols; ++k) {
      sum = sum + x[k];
      maxabs = std::max(maxabs, std::fabs(x[k]));
    }
    const double mean = sum / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t k = 0; k < cols; ++k) {
      const double d = x[k] - mean;
      sxx = sxx + d * d;
      sxy = sxy + d * ref[k];
    }
    if (is_flat(sxx, maxabs, cols, kFlatTolerance)) {
      out[r] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double rho = sxy / (std::sqrt(sxx) * ref_norm);
    out[r] = std::min(1.0, std::max(-1.0, rho));
  }
}

void column_mean_scalar(const double* data, std::size_t rows, std::size_t cols, std::size_t stride,
                        double* out) {
  for (std::size_t c = 0; c < cols; ++c) out[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = data + r * stride;
    for (std::size_t c = 0; c < cols; ++c) out[c] = out[c] + x[c];
  }
  const double n = static_cast<double>(rows);
  for (std::size_t c = 0; c < cols; ++c) out[c] = out[c] / n;
}

void recurrence_table_scalar(const double* alpha, const double* b, std::size_t degree,
                             const double* x, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 1.0;
  if (degree == 0) return;
  for (std::size_t i = 0; i < n; ++i) out[n + i] = (x[i] - alpha[0]) / b[1];
  for (std::size_t k = 1; k < degree; ++k) {
    const double* prev = out + (k - 1) * n;
    const double* cur = out + k * n;
    double* next = out + (k + 1) * n;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = ((x[i] - alpha[k]) * cur[i] - b[k] * prev[i]) / b[k + 1];
    }
  }
}

void accumulate_product_scalar(double coef, const double* const* factors, std::size_t n_factors,
                               std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double p = 1.0;
    for (std::size_t f = 0; f < n_factors; ++f) p = p * factors[f][i];
    out[i] = out[i] + coef * p;
  }
}

void product_scalar(const double* const* factors, std::size_t n_factors, std::size_t n,
                    double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double p = 1.0;
    for (std::size_t f = 0; f < n_factors; ++f) p = p * factors[f][i];
    out[i] = p;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{row_std_scalar,          row_pearson_scalar,
                                 column_mean_scalar,      recurrence_table_scalar,
                                 accumulate_product_scalar, product_scalar};
  return table;
}

}  // namespace icegsa::simd
