#pragma once

// Data-parallel inner loops behind the ICE metrics, PDP averaging and polynomial
// evaluation. Each kernel has a scalar reference and an AVX2 variant; the AVX2
// variants put one row (or point) per lane and repeat the scalar operation
// sequence exactly, so both produce identical bits. Selection happens once at
// runtime from CPUID and can be overridden with ICEGSA_ISA=scalar.

#include <cstddef>

namespace icegsa::simd {

enum class Isa { scalar, avx2 };

const char* to_string(Isa isa);
bool avx2_supported();
Isa active_isa();
/// Forces an ISA (tests, benchmarks). Requesting avx2 on a CPU without it throws.
void force_isa(Isa isa);

/// Relative flatness threshold: a row whose sample std is at most this fraction of its
/// largest magnitude is treated as constant by row_pearson.
inline constexpr double kFlatTolerance = 1e-12;

/// The flatness rule row_pearson applies, for a single vector.
bool is_flat(const double* x, std::size_t n);

/// Sample standard deviation (cols - 1 denominator) of each of `rows` rows.
void row_std(const double* data, std::size_t rows, std::size_t cols, std::size_t stride,
             double* out);

/// Pearson correlation of each row with a reference vector given already centred
/// (`ref_centered`, sum of squares `ref_ss`). Flat rows yield NaN. Results are
/// clamped to [-1, 1].
void row_pearson(const double* data, std::size_t rows, std::size_t cols, std::size_t stride,
                 const double* ref_centered, double ref_ss, double* out);

/// Mean over rows of each column.
void column_mean(const double* data, std::size_t rows, std::size_t cols, std::size_t stride,
                 double* out);

/// Orthonormal three-term recurrence evaluated at n points:
///   psi_0 = 1, psi_{k+1} = ((x - alpha_k) psi_k - b_k psi_{k-1}) / b_{k+1}.
/// `b` has degree + 1 entries (b[0] unused). Output is (degree+1) x n, degree-major:
/// out[d * n + i].
void recurrence_table(const double* alpha, const double* b, std::size_t degree, const double* x,
                      std::size_t n, double* out);

/// out[i] += coef * prod_f factors[f][i]; an empty factor list means a product of 1.
void accumulate_product(double coef, const double* const* factors, std::size_t n_factors,
                        std::size_t n, double* out);

/// out[i] = prod_f factors[f][i].
void product(const double* const* factors, std::size_t n_factors, std::size_t n, double* out);

}  // namespace icegsa::simd
