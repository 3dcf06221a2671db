// AVX2 variants. One lane per row (or point); every lane performs the same
// operations in the same order as the scalar reference, without FMA, so the
// results are bit-identical to kernels_scalar.cpp.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "icegsa/simd/kernels.hpp"
#include "kernel_table.hpp"

namespace icegsa::simd {
namespace {

struct Cols4 {
  __m256d c0, c1, c2, c3;
};

// Rows r0..r3 hold 4 consecutive columns each; returns the columns with lane = row.
inline Cols4 transpose4(__m256d r0, __m256d r1, __m256d r2, __m256d r3) {
  const __m256d t0 = _mm256_unpacklo_pd(r0, r1);
  const __m256d t1 = _mm256_unpackhi_pd(r0, r1);
  const __m256d t2 = _mm256_unpacklo_pd(r2, r3);
  const __m256d t3 = _mm256_unpackhi_pd(r2, r3);
  return {_mm256_permute2f128_pd(t0, t2, 0x20), _mm256_permute2f128_pd(t1, t3, 0x20),
          _mm256_permute2f128_pd(t0, t2, 0x31), _mm256_permute2f128_pd(t1, t3, 0x31)};
}

inline Cols4 load_block(const double* p0, const double* p1, const double* p2, const double* p3,
                        std::size_t k) {
  return transpose4(_mm256_loadu_pd(p0 + k), _mm256_loadu_pd(p1 + k), _mm256_loadu_pd(p2 + k),
                    _mm256_loadu_pd(p3 + k));
}

inline __m256d gather_col(const double* p0, const double* p1, const double* p2, const double* p3,
                          std::size_t k) {
  return _mm256_set_pd(p3[k], p2[k], p1[k], p0[k]);
}

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

// Lane-wise max with std::max(a, b) semantics: (a < b) ? b : a.
inline __m256d max_like_std(__m256d a, __m256d b) {
  return _mm256_blendv_pd(a, b, _mm256_cmp_pd(a, b, _CMP_LT_OQ));
}

template <typename Fn>
inline void for_each_column(const double* p0, const double* p1, const double* p2, const double* p3,
                            std::size_t cols, Fn&& fn) {
  std::size_t k = 0;
  for (; k + 4 <= cols; k += 4) {
    const Cols4 c = load_block(p0, p1, p2, p3, k);
    fn(c.c0, k);
    fn(c.c1, k + 1);
    fn(c.c2, k + 2);
    fn(c.c3, k + 3);
  }
  for (; k < cols; ++k) fn(gather_col(p0, p1, p2, p3, k), k);
}

void row_std_avx2(const double* data, std::size_t rows, std::size_t cols, std::size_t stride,
                  double* out) {
  const __m256d n = _mm256_set1_pd(static_cast<double>(cols));
  const __m256d nm1 = _mm256_set1_pd(static_cast<double>(cols) - 1.0);
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    const double* p0 = data + r * stride;
    const double* p1 = p0 + stride;
    const double* p2 = p1 + stride;
    const double* p3 = p2 + stride;
    __m256d sum = _mm256_setzero_pd();
    for_each_column(p0, p1, p2, p3, cols, [&](__m256d v, std::size_t) { sum = _mm256_add_pd(sum, v); });
    const __m256d mean = _mm256_div_pd(sum, n);
    __m256d ss = _mm256_setzero_pd();
    for_each_column(p0, p1, p2, p3, cols, [&](__m256d v, std::size_t) {
      const __m256d d = _mm256_sub_pd(v, mean);
      ss = _mm256_add_pd(ss, _mm256_mul_pd(d, d));
    });
    _mm256_storeu_pd(out + r, _mm256_sqrt_pd(_mm256_div_pd(ss, nm1)));
  }
  if (r < rows) scalar_kernels().row_std(data + r * stride, rows - r, cols, stride, out + r);
}

void row_pearson_avx2(const double* data, std::size_t rows, std::size_t cols, std::size_t stride,
                      const double* ref, double ref_ss, double* out) {
  const __m256d n = _mm256_set1_pd(static_cast<double>(cols));
  const __m256d ref_norm = _mm256_set1_pd(std::sqrt(ref_ss));
  std::size_t r = 0;
  alignas(32) double sxx_l[4], max_l[4], rho_l[4];
  for (; r + 4 <= rows; r += 4) {
    const double* p0 = data + r * stride;
    const double* p1 = p0 + stride;
    const double* p2 = p1 + stride;
    const double* p3 = p2 + stride;
    __m256d sum = _mm256_setzero_pd();
    __m256d maxabs = _mm256_setzero_pd();
    for_each_column(p0, p1, p2, p3, cols, [&](__m256d v, std::size_t) {
      sum = _mm256_add_pd(sum, v);
      maxabs = max_like_std(maxabs, abs_pd(v));
    });
    const __m256d mean = _mm256_div_pd(sum, n);
    __m256d sxx = _mm256_setzero_pd();
    __m256d sxy = _mm256_setzero_pd();
    for_each_column(p0, p1, p2, p3, cols, [&](__m256d v, std::size_t k) {
      const __m256d d = _mm256_sub_pd(v, mean);
      sxx = _mm256_add_pd(sxx, _mm256_mul_pd(d, d));
      sxy = _mm256_add_pd(sxy, _mm256_mul_pd(d, _mm256_set1_pd(ref[k])));
    });
    const __m256d rho = _mm256_div_pd(sxy, _mm256_mul_pd(_mm256_sqrt_pd(sxx), ref_norm));
    _mm256_store_pd(sxx_l, sxx);
    _mm256_store_pd(max_l, maxabs);
    _mm256_store_pd(rho_l, rho);
    for (int l = 0; l < 4; ++l) {
      out[r + l] = is_flat(sxx_l[l], max_l[l], cols, kFlatTolerance)
                       ? std::numeric_limits<double>::quiet_NaN()
                       : std::min(1.0, std::max(-1.0, rho_l[l]));
    }
  }
  if (r < rows) {
    scalar_kernels().row_pearson(data + r * stride, rows - r, cols, stride, ref, ref_ss, out + r);
  }
}

void column_mean_avx2(const double* data, std::size_t rows, std::size_t cols, std::size_t stride,
                      double* out) {
  const __m256d n = _mm256_set1_pd(static_cast<double>(rows));
  std::size_t c = 0;
  for (; c + 4 <= cols; c += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t r = 0; r < rows; ++r) acc = _mm256_add_pd(acc, _mm256_loadu_pd(data + r * stride + c));
    _mm256_storeu_pd(out + c, _mm256_div_pd(acc, n));
  }
  for (; c < cols; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) acc = acc + data[r * stride + c];
    out[c] = acc / static_cast<double>(rows);
  }
}

void recurrence_table_avx2(const double* alpha, const double* b, std::size_t degree,
                           const double* x, std::size_t n, double* out) {
  const std::size_t vec_end = n - n % 4;
  for (std::size_t i = 0; i < n; ++i) out[i] = 1.0;
  if (degree == 0) return;
  {
    const __m256d a0 = _mm256_set1_pd(alpha[0]);
    const __m256d b1 = _mm256_set1_pd(b[1]);
    for (std::size_t i = 0; i < vec_end; i += 4) {
      _mm256_storeu_pd(out + n + i, _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), a0), b1));
    }
    for (std::size_t i = vec_end; i < n; ++i) out[n + i] = (x[i] - alpha[0]) / b[1];
  }
  for (std::size_t k = 1; k < degree; ++k) {
    const double* prev = out + (k - 1) * n;
    const double* cur = out + k * n;
    double* next = out + (k + 1) * n;
    const __m256d ak = _mm256_set1_pd(alpha[k]);
    const __m256d bk = _mm256_set1_pd(b[k]);
    const __m256d bk1 = _mm256_set1_pd(b[k + 1]);
    for (std::size_t i = 0; i < vec_end; i += 4) {
      const __m256d lhs = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), ak), _mm256_loadu_pd(cur + i));
      const __m256d rhs = _mm256_mul_pd(bk, _mm256_loadu_pd(prev + i));
      _mm256_storeu_pd(next + i, _mm256_div_pd(_mm256_sub_pd(lhs, rhs), bk1));
    }
    for (std::size_t i = vec_end; i < n; ++i) {
      next[i] = ((x[i] - alpha[k]) * cur[i] - b[k] * prev[i]) / b[k + 1];
    }
  }
}

void accumulate_product_avx2(double coef, const double* const* factors, std::size_t n_factors,
                             std::size_t n, double* out) {
  const std::size_t vec_end = n - n % 4;
  const __m256d c = _mm256_set1_pd(coef);
  for (std::size_t i = 0; i < vec_end; i += 4) {
    __m256d p = _mm256_set1_pd(1.0);
    for (std::size_t f = 0; f < n_factors; ++f) p = _mm256_mul_pd(p, _mm256_loadu_pd(factors[f] + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), _mm256_mul_pd(c, p)));
  }
  for (std::size_t i = vec_end; i < n; ++i) {
    double p = 1.0;
    for (std::size_t f = 0; f < n_factors; ++f) p = p * factors[f][i];
    out[i] = out[i] + coef * p;
  }
}

void product_avx2(const double* const* factors, std::size_t n_factors, std::size_t n, double* out) {
  const std::size_t vec_end = n - n % 4;
  for (std::size_t i = 0; i < vec_end; i += 4) {
    __m256d p = _mm256_set1_pd(1.0);
    for (std::size_t f = 0; f < n_factors; ++f) p = _mm256_mul_pd(p, _mm256_loadu_pd(factors[f] + i));
    _mm256_storeu_pd(out + i, p);
  }
  for (std::size_t i = vec_end; i < n; ++i) {
    double p = 1.0;
    for (std::size_t f = 0; f < n_factors; ++f) p = p * factors[f][i];
    out[i] = p;
  }
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{row_std_avx2,          row_pearson_avx2,
                                 column_mean_avx2,      recurrence_table_avx2,
                                 accumulate_product_avx2, product_avx2};
  return table;
}

}  // namespace icegsa::simd
