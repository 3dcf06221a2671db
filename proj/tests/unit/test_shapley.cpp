#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "icegsa/error.hpp"
#include "icegsa/evaluator.hpp"
#include "icegsa/parallel.hpp"
#include "icegsa/shapley.hpp"

using namespace icegsa;

namespace {

constexpr std::uint64_t kSeed = 42;

InputSpace unit_cube(std::size_t m) {
  std::vector<Marginal> ms;
  for (std::size_t j = 0; j < m; ++j) ms.push_back(Marginal::uniform("x" + std::to_string(j + 1), 0.0, 1.0));
  return InputSpace(std::move(ms));
}

// Coalition value computed one row at a time, independent of the batched path.
double brute_value(const Evaluator& ev, const std::vector<double>& x, const RowMatrix& bg,
                   const std::vector<bool>& present) {
  double sum = 0.0;
  std::vector<double> row(x.size());
  for (Eigen::Index r = 0; r < bg.rows(); ++r) {
    for (std::size_t c = 0; c < x.size(); ++c) row[c] = present[c] ? x[c] : bg(r, static_cast<Eigen::Index>(c));
    sum += ev(row);
  }
  return sum / static_cast<double>(bg.rows());
}

// Shapley values as the average marginal contribution over all feature orderings.
std::vector<double> permutation_shap(const Evaluator& ev, const std::vector<double>& x, const RowMatrix& bg) {
  const std::size_t m = x.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(m, 0.0);
  double count = 0.0;
  do {
    std::vector<bool> present(m, false);
    double prev = brute_value(ev, x, bg, present);
    for (std::size_t f : order) {
      present[f] = true;
      const double cur = brute_value(ev, x, bg, present);
      phi[f] += cur - prev;
      prev = cur;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& p : phi) p /= count;
  return phi;
}

// Pairwise interaction index with factorial weights s! (m - s - 2)! / (m - 1)!.
double subset_interaction(const Evaluator& ev, const std::vector<double>& x, const RowMatrix& bg, std::size_t i,
                          std::size_t j) {
  const std::size_t m = x.size();
  double acc = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    if ((mask >> i & 1U) || (mask >> j & 1U)) continue;
    std::vector<bool> t(m);
    std::size_t s = 0;
    for (std::size_t c = 0; c < m; ++c) {
      t[c] = mask >> c & 1U;
      s += t[c] ? 1 : 0;
    }
    const double w = std::tgamma(s + 1.0) * std::tgamma(static_cast<double>(m - s - 1)) / std::tgamma(static_cast<double>(m));
    auto ti = t, tj = t, tij = t;
    ti[i] = true;
    tj[j] = true;
    tij[i] = tij[j] = true;
    acc += w * (brute_value(ev, x, bg, tij) - brute_value(ev, x, bg, ti) - brute_value(ev, x, bg, tj) +
                brute_value(ev, x, bg, t));
  }
  return acc;
}

double column_mean(const RowMatrix& m, Eigen::Index c) { return m.col(c).mean(); }

}  // namespace

TEST(ExactShap, MatchesPermutationOracle) {
  const auto bm = builtin_friedman5();
  const auto bg = shap_background(bm.space, 40, kSeed);
  const std::vector<double> x = {0.2, 0.9, 0.35, 0.6, 0.1};
  const auto rec = exact_shap(bm.evaluator, bm.space, x, 40, kSeed);
  const auto oracle = permutation_shap(bm.evaluator, x, bg);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(rec.phi[j], oracle[j], 1e-12) << j;
  EXPECT_NEAR(rec.phi0, brute_value(bm.evaluator, x, bg, std::vector<bool>(5, false)), 1e-12);
  EXPECT_EQ(rec.fx, bm.evaluator(x));
}

TEST(ExactShap, AdditiveCollapsesToCenteredTerms) {
  const auto bm = builtin_friedman5();
  const auto additive = pointwise("add", 5, [](std::span<const double> x) {
    return x[0] * x[0] + std::sin(x[1]) + 3 * x[2] + std::exp(x[3]) - x[4];
  });
  const std::vector<double> x = {0.3, 0.7, 0.1, 0.5, 0.8};
  const auto rec = exact_shap(additive, bm.space, x, 300, kSeed);
  const auto bg = shap_background(bm.space, 300, kSeed);
  std::vector<double> g_mean(5, 0.0);
  for (Eigen::Index r = 0; r < bg.rows(); ++r) {
    g_mean[0] += bg(r, 0) * bg(r, 0);
    g_mean[1] += std::sin(bg(r, 1));
    g_mean[2] += 3 * bg(r, 2);
    g_mean[3] += std::exp(bg(r, 3));
    g_mean[4] += -bg(r, 4);
  }
  const double g_x[] = {x[0] * x[0], std::sin(x[1]), 3 * x[2], std::exp(x[3]), -x[4]};
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(rec.phi[j], g_x[j] - g_mean[j] / 300.0, 1e-12) << j;
}

TEST(ExactShap, ConstantGivesZero) {
  const auto space = unit_cube(4);
  const auto ev = pointwise("c", 4, [](std::span<const double>) { return 3.25; });
  const std::vector<double> x = {0.1, 0.2, 0.3, 0.4};
  for (double p : exact_shap(ev, space, x, 50, kSeed).phi) EXPECT_EQ(p, 0.0);
}

TEST(ExactShap, GoldsteinX1IsAdditive) {
  const auto bm = builtin_goldstein3();
  const std::vector<double> x = {0.6, -0.4, 0.25};
  const auto rec = exact_shap(bm.evaluator, bm.space, x, 1000, kSeed);
  const auto bg = shap_background(bm.space, 1000, kSeed);
  EXPECT_NEAR(rec.phi[0], 0.2 * x[0] - 0.2 * column_mean(bg, 0), 1e-12);
}

TEST(ExactShap, Efficiency) {
  const auto bm = builtin_friedman5();
  const std::vector<double> x = {0.9, 0.05, 0.5, 0.33, 0.77};
  const auto rec = exact_shap(bm.evaluator, bm.space, x, 500, kSeed);
  const double total = std::accumulate(rec.phi.begin(), rec.phi.end(), rec.phi0);
  EXPECT_LT(std::abs(total - rec.fx), 1e-8);
}

TEST(ExactShap, DummyFeatureIsExactlyZero) {
  const auto space = unit_cube(4);
  const auto ev = pointwise("skip3", 4, [](std::span<const double> x) {
    return x[0] * x[1] + std::cos(x[3]) * x[0];
  });
  const std::vector<double> x = {0.4, 0.8, 0.15, 0.6};
  EXPECT_EQ(exact_shap(ev, space, x, 100, kSeed).phi[2], 0.0);
  EXPECT_EQ(exact_shap(ev, space, x, 100, kSeed, ShapBaseline::anchor).phi[2], 0.0);
}

TEST(ExactShap, SymmetricFeaturesShareAttribution) {
  const auto space = unit_cube(3);
  const auto ev = pointwise("sym", 3, [](std::span<const double> x) { return x[0] * x[1] + x[2]; });
  const std::vector<double> x = {0.8, 0.8, 0.3};
  const auto anchor = exact_shap(ev, space, x, 1, kSeed, ShapBaseline::anchor);
  EXPECT_EQ(anchor.phi[0], anchor.phi[1]);
  const auto interventional = exact_shap(ev, space, x, 4000, kSeed);
  EXPECT_NEAR(interventional.phi[0], interventional.phi[1], 0.01);
}

TEST(ExactShap, AnchorBaselineUsesAnchorPoint) {
  const InputSpace space({Marginal::uniform("a", 0, 1), Marginal::uniform("b", 0, 1)}, {0.25, 0.75});
  const auto ev = pointwise("prod", 2, [](std::span<const double> x) { return x[0] * x[1]; });
  const std::vector<double> x = {1.0, 0.5};
  const auto rec = exact_shap(ev, space, x, 1, kSeed, ShapBaseline::anchor);
  // v(empty) = 0.1875, v(a) = 0.75, v(b) = 0.125, v(ab) = 0.5.
  EXPECT_DOUBLE_EQ(rec.phi0, 0.1875);
  EXPECT_DOUBLE_EQ(rec.phi[0], 0.5 * ((0.75 - 0.1875) + (0.5 - 0.125)));
  EXPECT_DOUBLE_EQ(rec.phi[1], 0.5 * ((0.125 - 0.1875) + (0.5 - 0.75)));
}

TEST(ExactShap, RejectsTooManyFeatures) {
  const auto space = unit_cube(21);
  const auto ev = pointwise("wide", 21, [](std::span<const double> x) { return x[0]; });
  const std::vector<double> x(21, 0.5);
  EXPECT_THROW(exact_shap(ev, space, x, 10, kSeed), ParameterError);
  const auto space17 = unit_cube(17);
  const auto ev17 = pointwise("wide17", 17, [](std::span<const double> x) { return x[0]; });
  const std::vector<double> x17(17, 0.5);
  EXPECT_THROW(shap_interaction_pair(ev17, space17, x17, 0, 1, 10, kSeed), ParameterError);
}

TEST(ExactShap, RejectsBadPoints) {
  const auto space = unit_cube(2);
  const auto ev = pointwise("p", 2, [](std::span<const double> x) { return x[0]; });
  const std::vector<double> short_x = {0.5};
  EXPECT_THROW(exact_shap(ev, space, short_x, 10, kSeed), DimensionError);
  const std::vector<double> nan_x = {0.5, std::nan("")};
  EXPECT_THROW(exact_shap(ev, space, nan_x, 10, kSeed), InputError);
  const std::vector<double> x = {0.5, 0.5};
  EXPECT_THROW(exact_shap(ev, space, x, 0, kSeed), ParameterError);
}

TEST(ShapInteraction, MatchesSubsetOracle) {
  const auto bm = builtin_friedman5();
  const auto bg = shap_background(bm.space, 30, kSeed);
  const std::vector<double> x = {0.7, 0.4, 0.2, 0.9, 0.5};
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = i + 1; j < 5; ++j) {
      EXPECT_NEAR(shap_interaction_pair(bm.evaluator, bm.space, x, i, j, 30, kSeed),
                  subset_interaction(bm.evaluator, x, bg, i, j), 1e-12)
          << i << "," << j;
    }
  }
}

TEST(ShapInteraction, AdditiveIsZero) {
  const auto space = unit_cube(4);
  const auto ev = pointwise("add", 4, [](std::span<const double> x) { return x[0] + 2 * x[1] * x[1] - x[2] + x[3]; });
  const std::vector<double> x = {0.1, 0.5, 0.7, 0.3};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      EXPECT_NEAR(shap_interaction_pair(ev, space, x, i, j, 100, kSeed), 0.0, 1e-12);
    }
  }
}

TEST(ShapInteraction, ProductPair) {
  const auto space = unit_cube(4);
  const auto ev = pointwise("x2x4", 4, [](std::span<const double> x) { return x[1] * x[3]; });
  const std::vector<double> x = {0.3, 0.9, 0.6, 0.2};
  const std::size_t n_bg = 2000;
  const auto bg = shap_background(space, n_bg, kSeed);
  const double e1 = column_mean(bg, 1);
  const double e3 = column_mean(bg, 3);
  const double e13 = (bg.col(1).array() * bg.col(3).array()).mean();
  const double phi = shap_interaction_pair(ev, space, x, 1, 3, n_bg, kSeed);
  // With a finite background the joint term is the sample mean of the product.
  EXPECT_NEAR(phi, x[1] * x[3] - x[1] * e3 - x[3] * e1 + e13, 1e-12);
  // Population form under independence.
  EXPECT_NEAR(phi, x[1] * x[3] - 0.5 * x[1] - 0.5 * x[3] + 0.25, 0.02);
}

TEST(ShapInteraction, SymmetricBitwise) {
  const auto bm = builtin_friedman5();
  const std::vector<double> x = {0.11, 0.52, 0.93, 0.24, 0.65};
  const auto v = coalition_values(bm.evaluator, x, shap_background(bm.space, 64, kSeed));
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      if (i != j) {
        EXPECT_EQ(interaction_from_values(v, 5, i, j), interaction_from_values(v, 5, j, i));
      }
    }
  }
  EXPECT_THROW(interaction_from_values(v, 5, 2, 2), ParameterError);
}

TEST(CoalitionValues, BatchingAcrossManyBackgroundRows) {
  // n_bg large enough that one coalition per batch is used.
  const auto space = unit_cube(3);
  const auto ev = pointwise("mix", 3, [](std::span<const double> x) { return x[0] * x[1] - x[2] * x[2]; });
  const std::vector<double> x = {0.25, 0.5, 0.75};
  const auto bg = shap_background(space, 70000, kSeed);
  const auto v = coalition_values(ev, x, bg);
  ASSERT_EQ(v.size(), 8u);
  for (std::size_t mask : {0u, 3u, 5u, 7u}) {
    std::vector<bool> present = {(mask & 1U) != 0, (mask & 2U) != 0, (mask & 4U) != 0};
    EXPECT_NEAR(v[mask], brute_value(ev, x, bg, present), 1e-12) << mask;
  }
}

TEST(AveragedShap, FriedmanLinearTerms) {
  const auto bm = builtin_friedman5();
  const auto sh = averaged_shap(bm.evaluator, bm.space, 10000, 200, kSeed);
  EXPECT_NEAR(sh[3], 2.5, 0.02 * 2.5);
  EXPECT_NEAR(sh[4], 1.25, 0.02 * 1.25);
}

TEST(AveragedShap, ConstantIsZero) {
  const auto space = unit_cube(3);
  const auto ev = pointwise("c", 3, [](std::span<const double>) { return -1.0; });
  for (double v : averaged_shap(ev, space, 50, 20, kSeed)) EXPECT_EQ(v, 0.0);
}

TEST(AveragedShap, GoldsteinInteractionPattern) {
  const auto bm = builtin_goldstein3();
  const auto im = averaged_shap_interaction(bm.evaluator, bm.space, 2000, 200, kSeed);
  EXPECT_LE(im(0, 1), 0.01);
  EXPECT_LE(im(0, 2), 0.01);
  EXPECT_GT(im(1, 2), 0.5);
  EXPECT_EQ(im(1, 2), im(2, 1));
}

TEST(AveragedShap, FriedmanInteractionPattern) {
  const auto bm = builtin_friedman5();
  const auto im = averaged_shap_interaction(bm.evaluator, bm.space, 1000, 200, kSeed);
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = i + 1; j < 5; ++j) {
      if (i == 0 && j == 1) continue;
      EXPECT_LT(im(i, j), 1e-10) << i << "," << j;
    }
  }
  EXPECT_GT(im(0, 1), 0.1);
}

TEST(ShapSummary, EfficiencyAndDeterminism) {
  const auto bm = builtin_friedman5();
  set_worker_count(1);
  const auto one = shap_summary(bm.evaluator, bm.space, 300, 100, kSeed, true);
  set_worker_count(3);
  const auto three = shap_summary(bm.evaluator, bm.space, 300, 100, kSeed, true);
  set_worker_count(0);
  EXPECT_LT(one.max_efficiency_error, 1e-8);
  EXPECT_TRUE(one.phi == three.phi);
  EXPECT_EQ(one.mean_abs_phi, three.mean_abs_phi);
  EXPECT_EQ(one.mean_abs_phi_anchor, three.mean_abs_phi_anchor);
  EXPECT_TRUE(one.mean_abs_interaction == three.mean_abs_interaction);
}

TEST(ShapSummary, RowsMatchPerPointRecords) {
  const auto bm = builtin_goldstein3();
  const auto summary = shap_summary(bm.evaluator, bm.space, 5, 50, kSeed, false);
  for (Eigen::Index p = 0; p < 5; ++p) {
    const std::vector<double> x = {summary.points(p, 0), summary.points(p, 1), summary.points(p, 2)};
    const auto rec = exact_shap(bm.evaluator, bm.space, x, 50, kSeed);
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_EQ(summary.phi(p, j), rec.phi[static_cast<std::size_t>(j)]);
  }
  EXPECT_EQ(summary.mean_abs_interaction.size(), 0);
}
