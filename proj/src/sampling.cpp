#include "icegsa/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "icegsa/error.hpp"
#include "icegsa/parallel.hpp"
#include "icegsa/rng.hpp"

namespace icegsa {

const char* to_string(GridScheme scheme) {
  return scheme == GridScheme::quantile ? "quantile" : "equispaced";
}

GridScheme grid_scheme_from_string(const std::string& text) {
  if (text == "quantile") return GridScheme::quantile;
  if (text == "equispaced") return GridScheme::equispaced;
  throw ParameterError("unknown grid scheme '" + text + "' (expected quantile or equispaced)");
}

SampleMatrix draw_iid(const InputSpace& space, std::size_t n, std::uint64_t seed,
                      std::uint64_t stream) {
  if (n == 0) throw ParameterError("empty design: n must be >= 1");
  const std::size_t m = space.dimension();
  SampleMatrix out{RowMatrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)), seed, stream};
  const StreamRng rng(seed, stream);
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double u = rng.uniform(static_cast<std::uint64_t>(i * m + j));
        out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            space.marginal(j).quantile(u);
      }
    }
  });
  return out;
}

FeatureGrid feature_grid(const InputSpace& space, std::size_t feature, std::size_t K,
                         GridScheme scheme) {
  if (feature >= space.dimension()) {
    throw DimensionError("feature index " + std::to_string(feature) + " out of range");
  }
  if (K < 2) throw ParameterError("grid needs K >= 2");
  const Marginal& marginal = space.marginal(feature);
  FeatureGrid grid{feature, {}};
  grid.values.reserve(K);
  if (scheme == GridScheme::quantile) {
    for (std::size_t k = 1; k <= K; ++k) {
      grid.values.push_back(marginal.quantile((static_cast<double>(k) - 0.5) / static_cast<double>(K)));
    }
  } else {
    if (!marginal.bounded()) {
      throw ParameterError("equispaced grid is unsupported for unbounded marginal '" +
                           marginal.name() + "'");
    }
    const double lo = marginal.lower();
    const double hi = marginal.upper();
    for (std::size_t k = 0; k < K; ++k) {
      if (k + 1 == K) {
        grid.values.push_back(hi);
      } else {
        grid.values.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(K - 1));
      }
    }
  }
  grid.values.erase(std::unique(grid.values.begin(), grid.values.end()), grid.values.end());
  if (grid.values.size() < 2) {
    throw ParameterError("grid for '" + marginal.name() + "' collapsed to fewer than 2 distinct values");
  }
  return grid;
}

RowMatrix pick_freeze(const RowMatrix& a, const RowMatrix& b, std::initializer_list<std::size_t> cols) {
  RowMatrix out = a;
  for (std::size_t c : cols) out.col(static_cast<Eigen::Index>(c)) = b.col(static_cast<Eigen::Index>(c));
  return out;
}

SaltelliDesign saltelli_design(const InputSpace& space, std::size_t n_base, std::uint64_t seed) {
  if (n_base < 2) throw ParameterError("saltelli design needs n_base >= 2");
  SaltelliDesign design{draw_iid(space, n_base, seed, streams::sobol_a),
                        draw_iid(space, n_base, seed, streams::sobol_b),
                        {}};
  design.ab.reserve(space.dimension());
  for (std::size_t j = 0; j < space.dimension(); ++j) {
    design.ab.push_back(pick_freeze(design.a.values, design.b.values, {j}));
  }
  return design;
}

}  // namespace icegsa
