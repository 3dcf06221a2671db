#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "icegsa/error.hpp"
#include "icegsa/evaluator.hpp"
#include "icegsa/metrics.hpp"
#include "icegsa/pdp_ice.hpp"
#include "icegsa/sampling.hpp"

using namespace icegsa;

namespace {

constexpr std::uint64_t kSeed = 42;
constexpr std::size_t kGrid = 50;
constexpr std::size_t kMc = 10000;

IceEnsemble ice(const Benchmark& bm, std::size_t j, std::size_t n_mc = kMc, std::size_t k = kGrid) {
  return compute_ice(bm.evaluator, bm.space, j, feature_grid(bm.space, j, k, GridScheme::quantile), n_mc, kSeed);
}

JointPdp joint(const Benchmark& bm, std::size_t i, std::size_t j, std::size_t n_mc = kMc) {
  return compute_joint_pdp(bm.evaluator, bm.space, i, j, feature_grid(bm.space, i, 25, GridScheme::equispaced),
                           feature_grid(bm.space, j, 25, GridScheme::equispaced), n_mc, kSeed);
}

Benchmark additive2() {
  return {pointwise("sum2", 2, [](std::span<const double> x) { return x[0] + x[1]; }),
          InputSpace({Marginal::uniform("x1", 0, 1), Marginal::uniform("x2", 0, 1)})};
}

Benchmark constant3() {
  return {pointwise("const", 3, [](std::span<const double>) { return 7.0; }),
          InputSpace({Marginal::uniform("x1", 0, 1), Marginal::uniform("x2", 0, 1), Marginal::uniform("x3", 0, 1)})};
}

double naive_std(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST(IPdp, GoldsteinValues) {
  const auto bm = builtin_goldstein3();
  EXPECT_NEAR(i_pdp(ice(bm, 0)), 0.116, 0.005);
  EXPECT_LE(i_pdp(ice(bm, 1)), 0.05);
  EXPECT_LE(i_pdp(ice(bm, 2)), 0.05);
}

TEST(IPdp, FriedmanX4) {
  const auto bm = builtin_friedman5();
  EXPECT_NEAR(i_pdp(ice(bm, 3)), 10.0 / std::sqrt(12.0), 0.02 * 10.0 / std::sqrt(12.0));
}

TEST(IPdp, MatchesNaiveStdOfPdp) {
  const auto bm = builtin_friedman5();
  const auto ens = ice(bm, 0, 500);
  EXPECT_NEAR(i_pdp(ens), naive_std(ens.pdp), 1e-13);
}

TEST(IPdp, DegenerateGrid) {
  auto ens = ice(builtin_friedman5(), 0, 10, 2);
  ens.grid.values.resize(1);
  ens.pdp.resize(1);
  EXPECT_THROW(i_pdp(ens), ParameterError);
  EXPECT_THROW(ice_importances(ens), ParameterError);
}

TEST(IceImportances, AdditiveEntriesEqualIPdp) {
  const auto bm = builtin_friedman5();
  const auto ens = ice(bm, 4, 2000);
  const double ref = i_pdp(ens);
  for (double v : ice_importances(ens)) EXPECT_NEAR(v, ref, 1e-10);
}

TEST(IceImportances, GoldsteinX2SlopeMagnitude) {
  const auto bm = builtin_goldstein3();
  const auto ens = ice(bm, 1);
  // Each curve is +-5 x2 plus a constant, so its std is 5 times the grid std.
  const double grid_std = naive_std(ens.grid.values);
  for (double v : ice_importances(ens)) {
    EXPECT_NEAR(v, 5.0 * grid_std, 1e-12);
    EXPECT_NEAR(v, 5.0 / std::sqrt(3.0), 0.03 * 5.0 / std::sqrt(3.0));
  }
}

TEST(IceImportances, ConstantEvaluatorGivesZeros) {
  const auto bm = constant3();
  for (double v : ice_importances(ice(bm, 1, 100))) EXPECT_EQ(v, 0.0);
}

TEST(MuSigmaIce, HandValues) {
  const auto ms = mu_sigma_ice({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(ms.mu, 2.5);
  EXPECT_DOUBLE_EQ(ms.sigma, std::sqrt(5.0 / 3.0));
  EXPECT_THROW(mu_sigma_ice({1.0}), ParameterError);
}

TEST(MuSigmaIce, GoldsteinX3StepCurves) {
  const auto ms = mu_sigma_ice(ice_importances(ice(builtin_goldstein3(), 2)));
  EXPECT_NEAR(ms.mu, 2.5, 0.03 * 2.5);
  EXPECT_NEAR(ms.sigma, 5.0 / std::sqrt(12.0), 0.05 * 5.0 / std::sqrt(12.0));
}

TEST(MuSigmaIce, GoldsteinX1) {
  const auto ms = mu_sigma_ice(ice_importances(ice(builtin_goldstein3(), 0)));
  EXPECT_NEAR(ms.mu, 0.116, 0.005);
  EXPECT_NEAR(ms.sigma, 0.0, 1e-10);
}

TEST(MuSigmaIce, FriedmanX1) {
  const auto ms = mu_sigma_ice(ice_importances(ice(builtin_friedman5(), 0)));
  EXPECT_NEAR(ms.mu, 2.415, 0.03 * 2.415);
  EXPECT_NEAR(ms.sigma, 0.856, 0.03 * 0.856);
}

TEST(IceCorrelations, AdditiveAllOne) {
  const auto c = ice_correlations(ice(builtin_friedman5(), 3, 1000));
  for (double r : c.rho) EXPECT_NEAR(r, 1.0, 1e-12);
  EXPECT_NEAR(c.sigma_rho, 0.0, 1e-12);
  EXPECT_EQ(c.excluded, 0u);
}

TEST(IceCorrelations, GoldsteinX2SignSplit) {
  const auto c = ice_correlations(ice(builtin_goldstein3(), 1));
  EXPECT_NEAR(c.sigma_rho, 1.0, 0.02);
  for (double r : c.rho) EXPECT_NEAR(std::abs(r), 1.0, 1e-9);
}

TEST(IceCorrelations, FriedmanAdditiveFeatures) {
  const auto bm = builtin_friedman5();
  for (std::size_t j : {2u, 3u, 4u}) EXPECT_NEAR(ice_correlations(ice(bm, j)).sigma_rho, 0.0, 0.01) << j;
}

TEST(IceCorrelations, WithinUnitInterval) {
  const auto c = ice_correlations(ice(builtin_friedman5(), 0, 2000));
  for (double r : c.rho) {
    EXPECT_GE(r, -1.0 - 1e-12);
    EXPECT_LE(r, 1.0 + 1e-12);
  }
  EXPECT_GE(c.sigma_rho, 0.0);
  EXPECT_LE(c.sigma_rho, 1.0 + 1e-12);
}

TEST(IceCorrelations, FlatCurvesExcluded) {
  // f = x1 * x2: instances with x2 = 0 give flat curves in x1.
  const InputSpace space({Marginal::uniform("x1", 0, 1), Marginal::uniform("x2", 0, 1)});
  const auto ev = pointwise("prod", 2, [](std::span<const double> x) { return x[0] * x[1]; });
  RowMatrix draws(4, 2);
  draws << 0.3, 0.0, 0.2, 0.5, 0.9, 0.0, 0.1, 0.8;
  const auto ens = compute_ice(ev, 0, feature_grid(space, 0, 5, GridScheme::equispaced), draws);
  const auto c = ice_correlations(ens);
  EXPECT_EQ(c.excluded, 2u);
  EXPECT_TRUE(std::isnan(c.rho[0]));
  EXPECT_TRUE(std::isnan(c.rho[2]));
  EXPECT_NEAR(c.rho[1], 1.0, 1e-12);
  EXPECT_NEAR(c.sigma_rho, 0.0, 1e-12);
  EXPECT_FALSE(c.pdp_flat);
}

TEST(IceCorrelations, FlatPdpExcludesEverything) {
  const auto c = ice_correlations(ice(constant3(), 0, 50));
  EXPECT_TRUE(c.pdp_flat);
  EXPECT_EQ(c.excluded, 50u);
  EXPECT_TRUE(std::isnan(c.sigma_rho));
}

TEST(IceCorrelations, NeedsThreeGridPoints) {
  EXPECT_THROW(ice_correlations(ice(builtin_friedman5(), 0, 10, 2)), ParameterError);
}

TEST(TwoWayIPdp, GoldsteinPairs) {
  const auto bm = builtin_goldstein3();
  EXPECT_NEAR(two_way_ipdp(joint(bm, 1, 2)), 0.771, 0.05 * 0.771);
  EXPECT_LE(two_way_ipdp(joint(bm, 0, 1)), 0.02);
  EXPECT_LE(two_way_ipdp(joint(bm, 0, 2)), 0.02);
}

TEST(TwoWayIPdp, GoldsteinClosedFormOnGrid) {
  // On the closed-form surface c + x2 s(x3) with s = +-5, the slices along x2 all share
  // one std; the slices along x3 have std |x2| std(s).
  const auto bm = builtin_goldstein3();
  const auto jp = joint(bm, 1, 2, 500);
  std::vector<double> s, abs_x2;
  for (double v : jp.grid_j.values) s.push_back(v >= 0.0 ? 5.0 : -5.0);
  for (double v : jp.grid_i.values) abs_x2.push_back(std::abs(v));
  const double expected = 0.5 * naive_std(s) * naive_std(abs_x2);
  EXPECT_NEAR(two_way_ipdp(jp), expected, 1e-9);
}

TEST(TwoWayIPdp, FriedmanX1X2) {
  EXPECT_NEAR(two_way_ipdp(joint(builtin_friedman5(), 0, 1)), 0.995, 0.05 * 0.995);
}

TEST(TwoWayIPdp, AdditivePairIsZero) {
  EXPECT_NEAR(two_way_ipdp(joint(builtin_friedman5(), 2, 3, 200)), 0.0, 1e-10);
}

TEST(SobolMc, AdditiveHalfHalf) {
  const auto s = sobol_mc(additive2().evaluator, additive2().space, 100000, kSeed);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_NEAR(s.first[j], 0.5, 0.01);
    EXPECT_NEAR(s.total[j], 0.5, 0.01);
  }
  EXPECT_EQ(s.evaluations, 400000u);
  EXPECT_NEAR(s.variance, 1.0 / 6.0, 0.005);
}

TEST(SobolMc, GoldsteinTotal) {
  const auto bm = builtin_goldstein3();
  const auto s = sobol_mc(bm.evaluator, bm.space, 100000, kSeed);
  const double v = 0.04 / 3.0 + 25.0 / 3.0;
  EXPECT_NEAR(s.total[0], (0.04 / 3.0) / v, 0.002);
  EXPECT_NEAR(s.total[1], 0.998, 0.01);
  EXPECT_NEAR(s.total[2], 0.998, 0.01);
}

TEST(SobolMc, FriedmanFirstOrder) {
  const auto bm = builtin_friedman5();
  const auto s = sobol_mc(bm.evaluator, bm.space, 100000, kSeed);
  const double expected[] = {0.195, 0.198, 0.091, 0.348, 0.086};
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(s.first[j], expected[j], 0.01) << j;
}

TEST(SobolMc, Errors) {
  const auto bm = constant3();
  EXPECT_THROW(sobol_mc(bm.evaluator, bm.space, 99, kSeed), ParameterError);
  EXPECT_THROW(sobol_mc(bm.evaluator, bm.space, 100, kSeed), DegenerateVarianceError);
}

TEST(SobolMc, OutOfRangeFlaggedNotClipped) {
  // Tiny first-order effects on a small design land slightly below zero for some seed.
  const Benchmark bm{pointwise("weak", 3, [](std::span<const double> x) { return 1e-3 * x[0] + x[1] * x[2]; }),
                     InputSpace({Marginal::uniform("a", -1, 1), Marginal::uniform("b", -1, 1),
                                 Marginal::uniform("c", -1, 1)})};
  bool saw_negative = false;
  for (std::uint64_t seed = 1; seed <= 20 && !saw_negative; ++seed) {
    const auto s = sobol_mc(bm.evaluator, bm.space, 100, seed);
    for (double v : s.first) {
      if (v < 0.0) {
        saw_negative = true;
        EXPECT_TRUE(s.out_of_range);
      }
    }
  }
  EXPECT_TRUE(saw_negative);
}

TEST(SobolSecondMc, GoldsteinPair23) {
  const auto bm = builtin_goldstein3();
  const auto s = sobol_second_mc(bm.evaluator, bm.space, 100000, kSeed);
  EXPECT_NEAR(s.second(1, 2), 0.993, 0.01);
  EXPECT_EQ(s.second(1, 2), s.second(2, 1));
  EXPECT_EQ(s.second(0, 0), 0.0);
  EXPECT_EQ(s.evaluations, 100000u * (5 + 3));
}

TEST(SobolSecondMc, FriedmanPair12) {
  const auto bm = builtin_friedman5();
  const auto s = sobol_second_mc(bm.evaluator, bm.space, 100000, kSeed);
  EXPECT_NEAR(s.second(0, 1), 0.076, 0.01);
}

TEST(SobolSecondMc, AdditiveIsZero) {
  const auto bm = builtin_friedman5();
  const auto additive = pointwise("additive", 5, [](std::span<const double> x) {
    return 20 * (x[2] - 0.5) * (x[2] - 0.5) + 10 * x[3] - 5 * x[4] + x[0] + x[1];
  });
  const auto s = sobol_second_mc(additive, bm.space, 100000, kSeed);
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = i + 1; j < 5; ++j) EXPECT_NEAR(s.second(i, j), 0.0, 0.01) << i << "," << j;
  }
}

TEST(BoxplotStats, Median) {
  const auto b = boxplot_stats({1, 2, 3, 4, 5});
  EXPECT_EQ(b.q1, 2.0);
  EXPECT_EQ(b.q2, 3.0);
  EXPECT_EQ(b.q3, 4.0);
  EXPECT_EQ(b.lower_whisker, -1.0);
  EXPECT_EQ(b.upper_whisker, 7.0);
  EXPECT_TRUE(b.outliers.empty());
}

TEST(BoxplotStats, AllEqual) {
  const auto b = boxplot_stats({2.5, 2.5, 2.5, 2.5, 2.5, 2.5});
  EXPECT_EQ(b.q1, 2.5);
  EXPECT_EQ(b.q3, 2.5);
  EXPECT_EQ(b.lower_whisker, 2.5);
  EXPECT_EQ(b.upper_whisker, 2.5);
  EXPECT_TRUE(b.outliers.empty());
}

TEST(BoxplotStats, FarPointIsOutlier) {
  const auto b = boxplot_stats({0, 100, 0, 0, 0});
  EXPECT_EQ(b.q1, 0.0);
  EXPECT_EQ(b.q3, 0.0);
  ASSERT_EQ(b.outliers.size(), 1u);
  EXPECT_EQ(b.outliers[0], 100.0);
}

TEST(BoxplotStats, InterpolatedQuartilesAndErrors) {
  const auto b = boxplot_stats({4, 1, 3, 2});
  EXPECT_DOUBLE_EQ(b.q1, 1.75);
  EXPECT_DOUBLE_EQ(b.q2, 2.5);
  EXPECT_DOUBLE_EQ(b.q3, 3.25);
  EXPECT_THROW(boxplot_stats({1, 2, 3}), ParameterError);
  EXPECT_THROW(boxplot_stats({1, 2, 3, std::nan("")}), InputError);
}

TEST(MetricInvariance, ScaleByTwoIsExact) {
  const auto bm = builtin_friedman5();
  const auto doubled = scaled(bm.evaluator, 2.0);
  const auto grid = feature_grid(bm.space, 0, kGrid, GridScheme::quantile);
  const auto base = compute_ice(bm.evaluator, bm.space, 0, grid, 1000, kSeed);
  const auto big = compute_ice(doubled, bm.space, 0, grid, 1000, kSeed);
  EXPECT_EQ(i_pdp(big), 2.0 * i_pdp(base));
  const auto mb = mu_sigma_ice(ice_importances(base));
  const auto mg = mu_sigma_ice(ice_importances(big));
  EXPECT_EQ(mg.mu, 2.0 * mb.mu);
  EXPECT_EQ(mg.sigma, 2.0 * mb.sigma);
  EXPECT_EQ(ice_correlations(big).rho, ice_correlations(base).rho);
  const auto sb = sobol_mc(bm.evaluator, bm.space, 1000, kSeed);
  const auto sg = sobol_mc(doubled, bm.space, 1000, kSeed);
  EXPECT_EQ(sg.first, sb.first);
  EXPECT_EQ(sg.total, sb.total);
}

TEST(MetricInvariance, ShiftWithinRounding) {
  const auto bm = builtin_goldstein3();
  const auto moved = shifted(bm.evaluator, 3.0);
  for (std::size_t j = 0; j < 3; ++j) {
    const auto grid = feature_grid(bm.space, j, kGrid, GridScheme::quantile);
    const auto base = compute_ice(bm.evaluator, bm.space, j, grid, 1000, kSeed);
    const auto up = compute_ice(moved, bm.space, j, grid, 1000, kSeed);
    EXPECT_NEAR(i_pdp(up), i_pdp(base), 1e-12);
    EXPECT_NEAR(mu_sigma_ice(ice_importances(up)).mu, mu_sigma_ice(ice_importances(base)).mu, 1e-12);
    EXPECT_NEAR(mu_sigma_ice(ice_importances(up)).sigma, mu_sigma_ice(ice_importances(base)).sigma, 1e-12);
  }
  const auto sb = sobol_mc(bm.evaluator, bm.space, 1000, kSeed);
  const auto su = sobol_mc(moved, bm.space, 1000, kSeed);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_NEAR(su.first[j], sb.first[j], 1e-12);
    EXPECT_NEAR(su.total[j], sb.total[j], 1e-12);
  }
}

TEST(MetricInvariance, AnchoringIsBitwiseNeutral) {
  const auto bm = builtin_friedman5();
  const auto ens = ice(bm, 1, 1000);
  const auto anchored = anchor_curves(bm.evaluator, ens, 0.5);
  EXPECT_EQ(i_pdp(anchored), i_pdp(ens));
  EXPECT_EQ(ice_importances(anchored), ice_importances(ens));
  const auto ca = ice_correlations(anchored);
  const auto cr = ice_correlations(ens);
  EXPECT_EQ(ca.sigma_rho, cr.sigma_rho);
  EXPECT_EQ(ca.excluded, cr.excluded);
}

TEST(MetricProperties, MuIceDominatesIPdp) {
  // Grid std is a seminorm, so the std of the mean curve never exceeds the mean curve std.
  for (const auto& bm : {builtin_goldstein3(), builtin_friedman5()}) {
    for (std::size_t j = 0; j < bm.space.dimension(); ++j) {
      const auto ens = ice(bm, j, 2000);
      EXPECT_GE(mu_sigma_ice(ice_importances(ens)).mu, i_pdp(ens) - 1e-12) << bm.evaluator.name() << " " << j;
    }
  }
}

TEST(MetricProperties, AdditiveIdentities) {
  const auto bm = additive2();
  const auto ens = ice(bm, 0, 3000);
  const auto ms = mu_sigma_ice(ice_importances(ens));
  EXPECT_NEAR(ms.mu, i_pdp(ens), 1e-10);
  EXPECT_NEAR(ms.sigma, 0.0, 1e-10);
  EXPECT_NEAR(ice_correlations(ens).sigma_rho, 0.0, 1e-10);
}

TEST(InteractionMatrix, SymmetricAndClipped) {
  Matrix pairs = Matrix::Zero(3, 3);
  pairs(0, 1) = 0.4;
  pairs(0, 2) = -0.01;
  pairs(1, 2) = 0.2;
  pairs(2, 1) = 99.0;  // lower triangle ignored
  const auto im = make_interaction_matrix(InteractionTag::sobol2, {0.1, -0.2, 0.3}, pairs);
  EXPECT_EQ(im.clipped, 2u);
  EXPECT_TRUE(im.values.isApprox(im.values.transpose()));
  EXPECT_EQ(im.values(0, 0), 0.1);
  EXPECT_EQ(im.values(1, 1), 0.0);
  EXPECT_EQ(im.values(2, 1), 0.2);
  EXPECT_EQ(im.values(2, 0), 0.0);
  EXPECT_GE(im.values.minCoeff(), 0.0);
  EXPECT_STREQ(to_string(im.tag), "sobol2");
  EXPECT_THROW(make_interaction_matrix(InteractionTag::pdp, {0.1}, pairs), DimensionError);
}
