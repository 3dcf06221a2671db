#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "icegsa/simd/kernels.hpp"

namespace simd = icegsa::simd;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> random_matrix(std::size_t rows, std::size_t cols, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(3.0, 2.0);
  std::vector<double> out(rows * cols);
  for (auto& v : out) v = nd(gen);
  return out;
}

// Runs fn under each ISA and returns the outputs in order (scalar first).
template <typename Fn>
std::vector<std::vector<double>> under_each_isa(Fn fn) {
  std::vector<std::vector<double>> outs;
  simd::force_isa(simd::Isa::scalar);
  outs.push_back(fn());
  simd::force_isa(simd::Isa::avx2);
  outs.push_back(fn());
  simd::force_isa(simd::Isa::scalar);
  return outs;
}

class SimdEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!simd::avx2_supported()) GTEST_SKIP() << "AVX2 not available";
    saved_ = simd::active_isa();
  }
  void TearDown() override {
    if (simd::avx2_supported()) simd::force_isa(saved_);
  }
  simd::Isa saved_ = simd::Isa::scalar;
};

}  // namespace

TEST(SimdScalar, RowStdMatchesDefinition) {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 10.0, 10.0, 10.0, 10.0};
  std::vector<double> out(2);
  simd::row_std(x.data(), 2, 4, 4, out.data());
  EXPECT_NEAR(out[0], std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(out[1], 0.0);
}

TEST(SimdScalar, PearsonFlagsFlatRows) {
  const std::vector<double> ref{-1.0, 0.0, 1.0};
  const std::vector<double> x{2.0, 4.0, 6.0, 5.0, 5.0, 5.0, 3.0, 2.0, 1.0};
  std::vector<double> out(3);
  simd::row_pearson(x.data(), 3, 3, 3, ref.data(), 2.0, out.data());
  EXPECT_DOUBLE_EQ(out[0], 1.0);
  EXPECT_TRUE(std::isnan(out[1]));
  EXPECT_DOUBLE_EQ(out[2], -1.0);
}

TEST(SimdScalar, RecurrenceReproducesLegendre) {
  // Orthonormal Legendre: b_k = k / sqrt(4k^2 - 1).
  std::vector<double> alpha(4, 0.0), b(4, 0.0);
  for (int k = 1; k < 4; ++k) b[static_cast<std::size_t>(k)] = k / std::sqrt(4.0 * k * k - 1.0);
  const std::vector<double> x{0.0, 1.0, -0.5};
  std::vector<double> out(4 * 3);
  simd::recurrence_table(alpha.data(), b.data(), 3, x.data(), 3, out.data());
  EXPECT_NEAR(out[3 + 1], std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(out[6 + 0], -std::sqrt(5.0) / 2.0, 1e-14);
  EXPECT_NEAR(out[9 + 2], std::sqrt(7.0) * (5.0 * -0.125 - 3.0 * -0.5) / 2.0, 1e-14);
}

TEST_F(SimdEquivalence, RowStdBitwise) {
  for (std::size_t rows : {1u, 3u, 4u, 7u, 33u}) {
    for (std::size_t cols : {2u, 3u, 5u, 8u, 50u}) {
      const auto x = random_matrix(rows, cols + 1, static_cast<unsigned>(rows * 100 + cols));
      const auto outs = under_each_isa([&] {
        std::vector<double> out(rows);
        simd::row_std(x.data(), rows, cols, cols + 1, out.data());
        return out;
      });
      EXPECT_TRUE(same_bits(outs[0], outs[1])) << rows << "x" << cols;
    }
  }
}

TEST_F(SimdEquivalence, RowPearsonBitwiseIncludingFlatRows) {
  for (std::size_t rows : {4u, 9u, 64u}) {
    for (std::size_t cols : {3u, 7u, 50u}) {
      auto x = random_matrix(rows, cols, static_cast<unsigned>(rows + 7 * cols));
      for (std::size_t k = 0; k < cols; ++k) x[2 * cols + k] = 1.25;  // one flat row
      auto ref = random_matrix(1, cols, 99);
      double mean = 0.0;
      for (double v : ref) mean += v;
      mean /= static_cast<double>(cols);
      double ss = 0.0;
      for (auto& v : ref) {
        v -= mean;
        ss += v * v;
      }
      const auto outs = under_each_isa([&] {
        std::vector<double> out(rows);
        simd::row_pearson(x.data(), rows, cols, cols, ref.data(), ss, out.data());
        return out;
      });
      EXPECT_TRUE(same_bits(outs[0], outs[1])) << rows << "x" << cols;
      EXPECT_TRUE(std::isnan(outs[1][2]));
    }
  }
}

TEST_F(SimdEquivalence, ColumnMeanBitwise) {
  for (std::size_t cols : {1u, 4u, 6u, 50u}) {
    const auto x = random_matrix(101, cols, static_cast<unsigned>(cols));
    const auto outs = under_each_isa([&] {
      std::vector<double> out(cols);
      simd::column_mean(x.data(), 101, cols, cols, out.data());
      return out;
    });
    EXPECT_TRUE(same_bits(outs[0], outs[1])) << cols;
  }
}

TEST_F(SimdEquivalence, RecurrenceAndProductsBitwise) {
  std::vector<double> alpha{0.1, -0.2, 0.05, 0.0, 0.3, -0.1}, b{0.0, 1.1, 0.9, 1.3, 0.7, 1.0};
  for (std::size_t n : {1u, 4u, 5u, 1023u}) {
    const auto x = random_matrix(1, n, static_cast<unsigned>(n));
    const auto tables = under_each_isa([&] {
      std::vector<double> out(6 * n);
      simd::recurrence_table(alpha.data(), b.data(), 5, x.data(), n, out.data());
      return out;
    });
    EXPECT_TRUE(same_bits(tables[0], tables[1])) << n;
    const double* factors[3] = {tables[0].data() + n, tables[0].data() + 3 * n, tables[0].data() + 5 * n};
    const auto prods = under_each_isa([&] {
      std::vector<double> p(n), acc(n, 0.5);
      simd::product(factors, 3, n, p.data());
      simd::accumulate_product(-1.7, factors, 2, n, acc.data());
      p.insert(p.end(), acc.begin(), acc.end());
      return p;
    });
    EXPECT_TRUE(same_bits(prods[0], prods[1])) << n;
  }
}
