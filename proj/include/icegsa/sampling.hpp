#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "icegsa/marginal.hpp"
#include "icegsa/types.hpp"

namespace icegsa {

/// n x m draws in physical units, reproducible from (seed, stream).
struct SampleMatrix {
  RowMatrix values;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

enum class GridScheme { quantile, equispaced };

const char* to_string(GridScheme scheme);
GridScheme grid_scheme_from_string(const std::string& text);

/// Strictly increasing evaluation points for feature `feature`.
struct FeatureGrid {
  std::size_t feature = 0;
  std::vector<double> values;
};

/// Element (i, j) is marginal j's quantile of uniform draw i*m + j of the stream; a
/// larger n extends a smaller one without changing its rows.
SampleMatrix draw_iid(const InputSpace& space, std::size_t n, std::uint64_t seed,
                      std::uint64_t stream);

/// quantile: probabilities (k - 0.5)/K. equispaced: K evenly spaced points over a bounded
/// support including both ends. Duplicate values (empirical ties) are merged.
FeatureGrid feature_grid(const InputSpace& space, std::size_t feature, std::size_t K,
                         GridScheme scheme);

/// Pick-freeze design. ab[j] is A with column j taken from B.
struct SaltelliDesign {
  SampleMatrix a;
  SampleMatrix b;
  std::vector<RowMatrix> ab;
};

SaltelliDesign saltelli_design(const InputSpace& space, std::size_t n_base, std::uint64_t seed);

/// A with the listed columns replaced by B's.
RowMatrix pick_freeze(const RowMatrix& a, const RowMatrix& b, std::initializer_list<std::size_t> cols);

}  // namespace icegsa
