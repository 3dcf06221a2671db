#include "icegsa/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "icegsa/error.hpp"
#include "icegsa/sampling.hpp"
#include "icegsa/simd/kernels.hpp"

namespace icegsa {
namespace {

double sample_std(const double* x, std::size_t n) {
  double out = 0.0;
  simd::row_std(x, 1, n, n, &out);
  return out;
}

void require_grid(const IceEnsemble& ens, std::size_t min_k) {
  if (ens.k() < min_k) {
    throw ParameterError("metric needs a grid of at least " + std::to_string(min_k) + " points, got " +
                         std::to_string(ens.k()));
  }
}

double mean_product(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s / static_cast<double>(a.size());
}

SobolIndices sobol_impl(const Evaluator& ev, const InputSpace& space, std::size_t n_base, std::uint64_t seed,
                        bool second) {
  if (n_base < 100) throw ParameterError("Sobol' estimation needs n_base >= 100");
  const std::size_t m = space.dimension();
  if (ev.arity() != m) throw DimensionError("evaluator arity does not match the input space");
  const auto design = saltelli_design(space, n_base, seed);
  const Vector fa = eval_parallel(ev, design.a.values);
  const Vector fb = eval_parallel(ev, design.b.values);

  const auto n = static_cast<Eigen::Index>(n_base);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) sum += fa[i];
  for (Eigen::Index i = 0; i < n; ++i) sum += fb[i];
  const double f0 = sum / static_cast<double>(2 * n_base);
  const Vector ya = fa.array() - f0;
  const Vector yb = fb.array() - f0;
  double ss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) ss += ya[i] * ya[i];
  for (Eigen::Index i = 0; i < n; ++i) ss += yb[i] * yb[i];
  const double v = ss / static_cast<double>(2 * n_base - 1);
  if (!(v > 0.0)) throw DegenerateVarianceError("model output has zero variance; Sobol' indices are undefined");

  SobolIndices s;
  s.n_base = n_base;
  s.variance = v;
  s.first.resize(m);
  s.total.resize(m);
  std::vector<Vector> yab(m);
  for (std::size_t j = 0; j < m; ++j) {
    yab[j] = eval_parallel(ev, design.ab[j]).array() - f0;
    const Vector diff = yab[j] - ya;
    s.first[j] = mean_product(yb, diff) / v;
    s.total[j] = 0.5 * mean_product(diff, diff) / v;
  }
  s.evaluations = n_base * (m + 2);
  if (second) {
    s.second = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const RowMatrix pts = pick_freeze(design.a.values, design.b.values, {i, j});
        const Vector yij = eval_parallel(ev, pts).array() - f0;
        const Vector second_diff = yij - yab[i] - yab[j] + ya;
        const double sij = mean_product(yb, second_diff) / v;
        s.second(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sij;
        s.second(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = sij;
        s.out_of_range = s.out_of_range || sij < 0.0 || sij > 1.0;
      }
    }
    s.evaluations += n_base * m * (m - 1) / 2;
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (double x : {s.first[j], s.total[j]}) s.out_of_range = s.out_of_range || x < 0.0 || x > 1.0;
  }
  return s;
}

double quantile7(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double i_pdp(const IceEnsemble& ens) {
  require_grid(ens, 2);
  return sample_std(ens.pdp.data(), ens.k());
}

std::vector<double> ice_importances(const IceEnsemble& ens) {
  require_grid(ens, 2);
  std::vector<double> out(ens.n_mc());
  simd::row_std(ens.curves.data(), ens.n_mc(), ens.k(), ens.k(), out.data());
  return out;
}

MuSigma mu_sigma_ice(const std::vector<double>& importances) {
  if (importances.size() < 2) throw ParameterError("mu/sigma of ICE importances needs at least 2 curves");
  const std::size_t n = importances.size();
  double sum = 0.0;
  for (double v : importances) sum += v;
  const double mu = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : importances) ss += (v - mu) * (v - mu);
  return {mu, std::sqrt(ss / static_cast<double>(n - 1))};
}

IceCorrelations ice_correlations(const IceEnsemble& ens) {
  require_grid(ens, 3);
  const std::size_t kk = ens.k();
  IceCorrelations out;
  out.rho.assign(ens.n_mc(), std::numeric_limits<double>::quiet_NaN());
  if (simd::is_flat(ens.pdp.data(), kk)) {
    out.pdp_flat = true;
    out.excluded = ens.n_mc();
    return out;
  }
  double sum = 0.0;
  for (double v : ens.pdp) sum += v;
  const double mean = sum / static_cast<double>(kk);
  std::vector<double> ref(kk);
  double ref_ss = 0.0;
  for (std::size_t k = 0; k < kk; ++k) {
    ref[k] = ens.pdp[k] - mean;
    ref_ss += ref[k] * ref[k];
  }
  simd::row_pearson(ens.curves.data(), ens.n_mc(), kk, kk, ref.data(), ref_ss, out.rho.data());

  std::size_t valid = 0;
  double rsum = 0.0;
  for (double r : out.rho) {
    if (std::isnan(r)) continue;
    ++valid;
    rsum += r;
  }
  out.excluded = ens.n_mc() - valid;
  if (valid >= 2) {
    const double rmean = rsum / static_cast<double>(valid);
    double ss = 0.0;
    for (double r : out.rho) {
      if (!std::isnan(r)) ss += (r - rmean) * (r - rmean);
    }
    out.sigma_rho = std::sqrt(ss / static_cast<double>(valid - 1));
  }
  return out;
}

double two_way_ipdp(const JointPdp& joint) {
  const auto ki = joint.surface.rows();
  const auto kj = joint.surface.cols();
  if (ki < 2 || kj < 2) throw ParameterError("two-way PDP importance needs grids of at least 2 points");
  // Row-major copy so each conditional slice is contiguous for row_std.
  const RowMatrix by_row = joint.surface;
  const RowMatrix by_col = joint.surface.transpose();
  std::vector<double> cond_i(static_cast<std::size_t>(kj));  // std over a for each b
  std::vector<double> cond_j(static_cast<std::size_t>(ki));  // std over b for each a
  simd::row_std(by_col.data(), static_cast<std::size_t>(kj), static_cast<std::size_t>(ki),
                static_cast<std::size_t>(ki), cond_i.data());
  simd::row_std(by_row.data(), static_cast<std::size_t>(ki), static_cast<std::size_t>(kj),
                static_cast<std::size_t>(kj), cond_j.data());
  const double s_i = sample_std(cond_i.data(), cond_i.size());
  const double s_j = sample_std(cond_j.data(), cond_j.size());
  return 0.5 * (s_i + s_j);
}

SobolIndices sobol_mc(const Evaluator& ev, const InputSpace& space, std::size_t n_base, std::uint64_t seed) {
  return sobol_impl(ev, space, n_base, seed, false);
}

SobolIndices sobol_second_mc(const Evaluator& ev, const InputSpace& space, std::size_t n_base,
                             std::uint64_t seed) {
  return sobol_impl(ev, space, n_base, seed, true);
}

BoxplotStats boxplot_stats(std::vector<double> samples) {
  if (samples.size() < 4) throw ParameterError("boxplot needs at least 4 samples");
  for (double v : samples) {
    if (!std::isfinite(v)) throw InputError("boxplot samples must be finite");
  }
  std::sort(samples.begin(), samples.end());
  BoxplotStats b;
  b.q1 = quantile7(samples, 0.25);
  b.q2 = quantile7(samples, 0.5);
  b.q3 = quantile7(samples, 0.75);
  const double iqr = b.q3 - b.q1;
  b.lower_whisker = b.q1 - 1.5 * iqr;
  b.upper_whisker = b.q3 + 1.5 * iqr;
  for (double v : samples) {
    if (v < b.lower_whisker || v > b.upper_whisker) b.outliers.push_back(v);
  }
  return b;
}

const char* to_string(InteractionTag tag) {
  switch (tag) {
    case InteractionTag::pdp:
      return "pdp";
    case InteractionTag::sobol2:
      return "sobol2";
    case InteractionTag::shap:
      return "shap";
  }
  return "unknown";
}

InteractionMatrix make_interaction_matrix(InteractionTag tag, const std::vector<double>& diagonal,
                                          const Matrix& pairs) {
  const auto m = static_cast<Eigen::Index>(diagonal.size());
  if (pairs.rows() != m || pairs.cols() != m) throw DimensionError("interaction matrix size mismatch");
  InteractionMatrix out{tag, Matrix::Zero(m, m), 0};
  auto put = [&](Eigen::Index a, Eigen::Index b, double v) {
    if (v < 0.0) {
      ++out.clipped;
      v = 0.0;
    }
    out.values(a, b) = v;
    out.values(b, a) = v;
  };
  for (Eigen::Index a = 0; a < m; ++a) {
    put(a, a, diagonal[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = a + 1; b < m; ++b) put(a, b, pairs(a, b));
  }
  return out;
}

}  // namespace icegsa
