#include "icegsa/pce/basis.hpp"

#include <algorithm>
#include <cmath>

#include "icegsa/error.hpp"
#include "icegsa/parallel.hpp"
#include "icegsa/simd/kernels.hpp"

namespace icegsa::pce {
namespace {

constexpr std::size_t kRowBlock = 1024;

void compositions(std::size_t pos, unsigned remaining, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (pos + 1 == cur.size()) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (unsigned first = remaining + 1; first-- > 0;) {
    cur[pos] = first;
    compositions(pos + 1, remaining - first, cur, out);
  }
}

double q_norm(const MultiIndex& g, double q) {
  double s = 0.0;
  for (unsigned v : g) {
    if (v > 0) s += std::pow(static_cast<double>(v), q);
  }
  return std::pow(s, 1.0 / q);
}

}  // namespace

std::vector<MultiIndex> hyperbolic_index_set(std::size_t m, std::size_t p, double q) {
  if (m == 0) throw ParameterError("index set dimension must be at least 1");
  if (!(q > 0.0) || q > 1.0) throw ParameterError("hyperbolic truncation q must lie in (0, 1]");
  std::vector<MultiIndex> out;
  MultiIndex cur(m, 0);
  const double limit = static_cast<double>(p) * (1.0 + 1e-12);
  for (unsigned d = 0; d <= p; ++d) {
    std::vector<MultiIndex> level;
    compositions(0, d, cur, level);
    for (auto& g : level) {
      // ||g||_q >= ||g||_1 for q <= 1, so total degree <= p bounds the search.
      if (q == 1.0 || q_norm(g, q) <= limit) out.push_back(std::move(g));
    }
  }
  return out;
}

BasisSet::BasisSet(const InputSpace& space, std::vector<MultiIndex> indices)
    : indices_(std::move(indices)) {
  const std::size_t m = space.dimension();
  if (indices_.empty()) throw ParameterError("basis needs at least the constant term");
  max_degree_.assign(m, 0);
  for (const auto& g : indices_) {
    if (g.size() != m) throw DimensionError("multi-index length does not match the input dimension");
    for (std::size_t j = 0; j < m; ++j) max_degree_[j] = std::max<std::size_t>(max_degree_[j], g[j]);
  }
  if (std::any_of(indices_[0].begin(), indices_[0].end(), [](unsigned v) { return v != 0; })) {
    throw ParameterError("first basis term must be the constant");
  }
  univariate_.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    univariate_.push_back(OrthoPoly1D::for_marginal(space.marginal(j), max_degree_[j]));
    if (univariate_[j].max_degree() < max_degree_[j]) {
      throw ParameterError("input '" + space.marginal(j).name() + "' supports polynomial degree at most " +
                           std::to_string(univariate_[j].max_degree()));
    }
  }
}

std::vector<std::vector<double>> BasisSet::tables(const RowMatrix& pts, std::size_t r0,
                                                  std::size_t n) const {
  const std::size_t m = dimension();
  std::vector<std::vector<double>> out(m);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = pts(static_cast<Eigen::Index>(r0 + i), static_cast<Eigen::Index>(j));
    out[j].resize((max_degree_[j] + 1) * n);
    univariate_[j].evaluate(col, max_degree_[j], out[j]);
  }
  return out;
}

Matrix BasisSet::design(const RowMatrix& pts) const {
  if (static_cast<std::size_t>(pts.cols()) != dimension()) {
    throw DimensionError("points have " + std::to_string(pts.cols()) + " columns, basis expects " +
                         std::to_string(dimension()));
  }
  const std::size_t n = static_cast<std::size_t>(pts.rows());
  Matrix f(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(size()));
  const std::size_t blocks = (n + kRowBlock - 1) / kRowBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t r0 = b * kRowBlock;
    const std::size_t len = std::min(kRowBlock, n - r0);
    const auto tab = tables(pts, r0, len);
    std::vector<const double*> factors;
    for (std::size_t k = 0; k < size(); ++k) {
      factors.clear();
      for (std::size_t j = 0; j < dimension(); ++j) {
        if (indices_[k][j] > 0) factors.push_back(tab[j].data() + indices_[k][j] * len);
      }
      simd::product(factors.data(), factors.size(), len, f.col(static_cast<Eigen::Index>(k)).data() + r0);
    }
  });
  return f;
}

void BasisSet::evaluate(const RowMatrix& pts, const Vector& coef, std::span<double> out) const {
  if (static_cast<std::size_t>(pts.cols()) != dimension()) {
    throw DimensionError("points have " + std::to_string(pts.cols()) + " columns, basis expects " +
                         std::to_string(dimension()));
  }
  if (static_cast<std::size_t>(coef.size()) != size()) throw DimensionError("coefficient count mismatch");
  const std::size_t n = static_cast<std::size_t>(pts.rows());
  if (out.size() != n) throw DimensionError("output length mismatch");
  const std::size_t blocks = (n + kRowBlock - 1) / kRowBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t r0 = b * kRowBlock;
    const std::size_t len = std::min(kRowBlock, n - r0);
    const auto tab = tables(pts, r0, len);
    double* dst = out.data() + r0;
    std::fill(dst, dst + len, 0.0);
    std::vector<const double*> factors;
    for (std::size_t k = 0; k < size(); ++k) {
      const double c = coef[static_cast<Eigen::Index>(k)];
      if (c == 0.0) continue;
      factors.clear();
      for (std::size_t j = 0; j < dimension(); ++j) {
        if (indices_[k][j] > 0) factors.push_back(tab[j].data() + indices_[k][j] * len);
      }
      simd::accumulate_product(c, factors.data(), factors.size(), len, dst);
    }
  });
}

Matrix eval_basis(const BasisSet& basis, const RowMatrix& pts) { return basis.design(pts); }

}  // namespace icegsa::pce
