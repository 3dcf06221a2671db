#include "icegsa/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "icegsa/error.hpp"
#include "icegsa/parallel.hpp"
#include "icegsa/rng.hpp"
#include "icegsa/sampling.hpp"

namespace icegsa {
namespace {

constexpr std::size_t kRowsPerBatch = 65536;

void check_dimension(std::size_t m, std::size_t limit) {
  if (m > limit) {
    throw ParameterError("exact Shapley enumeration is limited to " + std::to_string(limit) + " features (got " +
                         std::to_string(m) + "); permutation sampling would be needed and is not provided");
  }
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t t = 1; t <= k; ++t) r = r * static_cast<double>(n - k + t) / static_cast<double>(t);
  return r;
}

// w(s) = s! (m - s - 1)! / m!
std::vector<double> shapley_weights(std::size_t m) {
  std::vector<double> w(m);
  for (std::size_t s = 0; s < m; ++s) w[s] = 1.0 / (static_cast<double>(m) * binomial(m - 1, s));
  return w;
}

// w2(s) = s! (m - s - 2)! / (m - 1)!
std::vector<double> interaction_weights(std::size_t m) {
  std::vector<double> w(m - 1);
  for (std::size_t s = 0; s + 2 <= m; ++s) w[s] = 1.0 / (static_cast<double>(m - 1) * binomial(m - 2, s));
  return w;
}

double background_mean(const Evaluator& ev, const RowMatrix& background) {
  const Vector y = ev.eval_batch(background);
  double sum = 0.0;
  for (Eigen::Index r = 0; r < y.size(); ++r) sum += y[r];
  return sum / static_cast<double>(y.size());
}

// Fills v for masks 1 .. 2^m - 1; v[0] must already be set. The full set is averaged
// over the background like every other coalition, so a feature the model ignores gets
// exactly zero attribution.
void fill_coalitions(const Evaluator& ev, std::span<const double> x, const RowMatrix& background,
                     std::vector<double>& v) {
  const std::size_t m = x.size();
  const auto n_bg = static_cast<std::size_t>(background.rows());
  const std::size_t end = std::size_t{1} << m;
  const std::size_t per_batch = std::max<std::size_t>(1, kRowsPerBatch / n_bg);
  RowMatrix batch;
  std::vector<double> y;
  for (std::size_t first = 1; first < end; first += per_batch) {
    const std::size_t last = std::min(end, first + per_batch);
    const std::size_t count = last - first;
    batch.resize(static_cast<Eigen::Index>(count * n_bg), static_cast<Eigen::Index>(m));
    for (std::size_t t = 0; t < count; ++t) {
      const std::size_t mask = first + t;
      auto block = batch.middleRows(static_cast<Eigen::Index>(t * n_bg), static_cast<Eigen::Index>(n_bg));
      block = background;
      for (std::size_t c = 0; c < m; ++c) {
        if (mask >> c & 1U) block.col(static_cast<Eigen::Index>(c)).setConstant(x[c]);
      }
    }
    y.resize(count * n_bg);
    ev.eval_into(batch, y);
    for (std::size_t t = 0; t < count; ++t) {
      double sum = 0.0;
      for (std::size_t r = 0; r < n_bg; ++r) sum += y[t * n_bg + r];
      v[first + t] = sum / static_cast<double>(n_bg);
    }
  }
}

std::vector<double> fill_anchor(const Evaluator& ev, std::span<const double> x, std::span<const double> anchor) {
  const std::size_t m = x.size();
  const std::size_t masks = std::size_t{1} << m;
  RowMatrix batch(static_cast<Eigen::Index>(masks), static_cast<Eigen::Index>(m));
  for (std::size_t mask = 0; mask < masks; ++mask) {
    for (std::size_t c = 0; c < m; ++c) {
      batch(static_cast<Eigen::Index>(mask), static_cast<Eigen::Index>(c)) = (mask >> c & 1U) ? x[c] : anchor[c];
    }
  }
  std::vector<double> v(masks);
  ev.eval_into(batch, v);
  return v;
}

std::vector<double> shapley_weighted(const std::vector<double>& v, std::size_t m, const std::vector<double>& w) {
  std::vector<double> phi(m, 0.0);
  const std::size_t masks = std::size_t{1} << m;
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    double acc = 0.0;
    for (std::size_t t = 0; t < masks; ++t) {
      if (t & bit) continue;
      acc += w[static_cast<std::size_t>(std::popcount(t))] * (v[t | bit] - v[t]);
    }
    phi[j] = acc;
  }
  return phi;
}

double interaction_weighted(const std::vector<double>& v, std::size_t m, std::size_t i, std::size_t j,
                            const std::vector<double>& w2) {
  const std::size_t a = std::min(i, j);
  const std::size_t b = std::max(i, j);
  const std::size_t ba = std::size_t{1} << a;
  const std::size_t bb = std::size_t{1} << b;
  const std::size_t masks = std::size_t{1} << m;
  double acc = 0.0;
  for (std::size_t t = 0; t < masks; ++t) {
    if (t & (ba | bb)) continue;
    acc += w2[static_cast<std::size_t>(std::popcount(t))] * (v[t | ba | bb] - v[t | ba] - v[t | bb] + v[t]);
  }
  return acc;
}

void check_point(const Evaluator& ev, std::span<const double> x) {
  if (x.size() != ev.arity()) throw DimensionError("SHAP point length does not match evaluator arity");
  for (double c : x) {
    if (!std::isfinite(c)) throw InputError("SHAP point contains a non-finite value");
  }
}

}  // namespace

const char* to_string(ShapBaseline baseline) {
  return baseline == ShapBaseline::anchor ? "anchor" : "interventional";
}

std::vector<double> coalition_values(const Evaluator& ev, std::span<const double> x, const RowMatrix& background) {
  check_point(ev, x);
  check_dimension(x.size(), kMaxShapFeatures);
  if (background.rows() < 1) throw ParameterError("SHAP background needs at least one row");
  std::vector<double> v(std::size_t{1} << x.size());
  v[0] = background_mean(ev, background);
  fill_coalitions(ev, x, background, v);
  return v;
}

std::vector<double> coalition_values_anchor(const Evaluator& ev, std::span<const double> x,
                                            std::span<const double> anchor) {
  check_point(ev, x);
  check_dimension(x.size(), kMaxShapFeatures);
  if (anchor.size() != x.size()) throw DimensionError("anchor length does not match the point");
  return fill_anchor(ev, x, anchor);
}

std::vector<double> shapley_from_values(const std::vector<double>& v, std::size_t m) {
  if (v.size() != (std::size_t{1} << m)) throw DimensionError("coalition table size is not 2^m");
  return shapley_weighted(v, m, shapley_weights(m));
}

double interaction_from_values(const std::vector<double>& v, std::size_t m, std::size_t i, std::size_t j) {
  if (v.size() != (std::size_t{1} << m)) throw DimensionError("coalition table size is not 2^m");
  if (i == j || i >= m || j >= m) throw ParameterError("interaction needs two distinct feature indices");
  return interaction_weighted(v, m, i, j, interaction_weights(m));
}

RowMatrix shap_background(const InputSpace& space, std::size_t n_bg, std::uint64_t seed) {
  if (n_bg < 1) throw ParameterError("n_bg must be at least 1");
  return draw_iid(space, n_bg, seed, streams::shap_background).values;
}

ShapRecord exact_shap(const Evaluator& ev, const InputSpace& space, std::span<const double> x, std::size_t n_bg,
                      std::uint64_t seed, ShapBaseline baseline) {
  const std::size_t m = space.dimension();
  check_dimension(m, kMaxShapFeatures);
  check_point(ev, x);
  const auto v = baseline == ShapBaseline::anchor ? coalition_values_anchor(ev, x, space.anchor())
                                                  : coalition_values(ev, x, shap_background(space, n_bg, seed));
  ShapRecord rec;
  rec.x.assign(x.begin(), x.end());
  rec.phi = shapley_from_values(v, m);
  rec.phi0 = v.front();
  rec.fx = ev(x);
  return rec;
}

double shap_interaction_pair(const Evaluator& ev, const InputSpace& space, std::span<const double> x, std::size_t i,
                             std::size_t j, std::size_t n_bg, std::uint64_t seed) {
  const std::size_t m = space.dimension();
  check_dimension(m, kMaxShapInteractionFeatures);
  if (i == j || i >= m || j >= m) throw ParameterError("interaction needs two distinct feature indices");
  const auto v = coalition_values(ev, x, shap_background(space, n_bg, seed));
  return interaction_from_values(v, m, i, j);
}

ShapSummary shap_summary(const Evaluator& ev, const InputSpace& space, std::size_t n_pts, std::size_t n_bg,
                         std::uint64_t seed, bool interactions) {
  const std::size_t m = space.dimension();
  check_dimension(m, interactions ? kMaxShapInteractionFeatures : kMaxShapFeatures);
  if (n_pts < 1) throw ParameterError("n_pts must be at least 1");
  if (ev.arity() != m) throw DimensionError("evaluator arity does not match the input space");
  const RowMatrix background = shap_background(space, n_bg, seed);

  ShapSummary out;
  out.points = draw_iid(space, n_pts, seed, streams::shap_points).values;
  out.phi0 = background_mean(ev, background);
  out.phi.resize(static_cast<Eigen::Index>(n_pts), static_cast<Eigen::Index>(m));
  RowMatrix phi_anchor(static_cast<Eigen::Index>(n_pts), static_cast<Eigen::Index>(m));
  const std::size_t n_pairs = m * (m - 1) / 2;
  RowMatrix pair_abs(static_cast<Eigen::Index>(n_pts), static_cast<Eigen::Index>(interactions ? n_pairs : 0));
  std::vector<double> eff(n_pts);
  const auto w = shapley_weights(m);
  const auto w2 = m >= 2 ? interaction_weights(m) : std::vector<double>{};
  const auto& anchor = space.anchor();

  parallel_for(n_pts, [&](std::size_t p) {
    const auto row = static_cast<Eigen::Index>(p);
    std::vector<double> x(m);
    for (std::size_t c = 0; c < m; ++c) x[c] = out.points(row, static_cast<Eigen::Index>(c));
    std::vector<double> v(std::size_t{1} << m);
    v[0] = out.phi0;
    fill_coalitions(ev, x, background, v);
    const auto phi = shapley_weighted(v, m, w);
    double total = out.phi0;
    for (std::size_t c = 0; c < m; ++c) {
      out.phi(row, static_cast<Eigen::Index>(c)) = phi[c];
      total += phi[c];
    }

    if (interactions) {
      std::size_t k = 0;
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
          pair_abs(row, static_cast<Eigen::Index>(k++)) = std::fabs(interaction_weighted(v, m, a, b, w2));
        }
      }
    }
    const auto va = fill_anchor(ev, x, anchor);
    eff[p] = std::fabs(total - va.back());
    const auto pa = shapley_weighted(va, m, w);
    for (std::size_t c = 0; c < m; ++c) phi_anchor(row, static_cast<Eigen::Index>(c)) = pa[c];
  });

  const double dn = static_cast<double>(n_pts);
  out.mean_abs_phi.assign(m, 0.0);
  out.mean_abs_phi_anchor.assign(m, 0.0);
  for (std::size_t p = 0; p < n_pts; ++p) {
    const auto row = static_cast<Eigen::Index>(p);
    for (std::size_t c = 0; c < m; ++c) {
      out.mean_abs_phi[c] += std::fabs(out.phi(row, static_cast<Eigen::Index>(c)));
      out.mean_abs_phi_anchor[c] += std::fabs(phi_anchor(row, static_cast<Eigen::Index>(c)));
    }
    out.max_efficiency_error = std::max(out.max_efficiency_error, eff[p]);
  }
  for (std::size_t c = 0; c < m; ++c) {
    out.mean_abs_phi[c] /= dn;
    out.mean_abs_phi_anchor[c] /= dn;
  }
  if (interactions) {
    out.mean_abs_interaction = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    std::size_t k = 0;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b, ++k) {
        double sum = 0.0;
        for (std::size_t p = 0; p < n_pts; ++p) sum += pair_abs(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k));
        const double mean = sum / dn;
        out.mean_abs_interaction(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = mean;
        out.mean_abs_interaction(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = mean;
      }
    }
  }
  return out;
}

std::vector<double> averaged_shap(const Evaluator& ev, const InputSpace& space, std::size_t n_pts, std::size_t n_bg,
                                  std::uint64_t seed) {
  return shap_summary(ev, space, n_pts, n_bg, seed, false).mean_abs_phi;
}

Matrix averaged_shap_interaction(const Evaluator& ev, const InputSpace& space, std::size_t n_pts, std::size_t n_bg,
                                 std::uint64_t seed) {
  return shap_summary(ev, space, n_pts, n_bg, seed, true).mean_abs_interaction;
}

}  // namespace icegsa
