#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "icegsa/evaluator.hpp"
#include "icegsa/marginal.hpp"
#include "icegsa/sampling.hpp"
#include "icegsa/types.hpp"

namespace icegsa {

/// Raised when the evaluator fails on an ICE or joint-PDP point.
class CurveEvaluationError : public EvaluationError {
 public:
  CurveEvaluationError(const std::string& what, std::size_t instance, std::size_t grid_index)
      : EvaluationError(what, instance), instance_(instance), grid_index_(grid_index) {}
  std::size_t instance() const noexcept { return instance_; }
  std::size_t grid_index() const noexcept { return grid_index_; }

 private:
  std::size_t instance_;
  std::size_t grid_index_;
};

/// ICE curves of one feature over a shared complement sample.
///
/// `curves` always holds raw model outputs and `pdp` is their column mean. Anchoring
/// records one offset per curve (the model value at the anchor) instead of rewriting
/// the curves, so every scalar metric sees the same numbers whether or not the
/// ensemble is anchored; anchored_curves() and anchored_pdp() materialize the view.
struct IceEnsemble {
  std::size_t feature = 0;
  FeatureGrid grid;
  RowMatrix instances;           // n_mc x (m - 1) complement values, feature column removed
  RowMatrix curves;              // n_mc x K raw outputs
  std::vector<double> pdp;       // K
  bool anchored = false;
  double anchor_value = 0.0;
  std::vector<double> offsets;   // n_mc model values at the anchor (when anchored)
  double pdp_offset = 0.0;       // mean of offsets

  std::size_t n_mc() const { return static_cast<std::size_t>(curves.rows()); }
  std::size_t k() const { return grid.values.size(); }
  /// Curves minus offsets (raw curves if not anchored).
  RowMatrix anchored_curves() const;
  std::vector<double> anchored_pdp() const;
};

/// Complement draws shared across features: draw_iid on the complement stream.
RowMatrix complement_sample(const InputSpace& space, std::size_t n_mc, std::uint64_t seed);

/// curves(i, k) = f(draws_i with column j set to grid[k]).
IceEnsemble compute_ice(const Evaluator& ev, std::size_t j, const FeatureGrid& grid, const RowMatrix& draws);
IceEnsemble compute_ice(const Evaluator& ev, const InputSpace& space, std::size_t j, const FeatureGrid& grid,
                        std::size_t n_mc, std::uint64_t seed);

/// Offsets from evaluating each instance at x_j = a_j. Re-anchoring replaces the
/// previous offsets, so anchoring is idempotent.
IceEnsemble anchor_curves(const Evaluator& ev, const IceEnsemble& ens, double a_j);

struct JointPdp {
  std::size_t feature_i = 0;
  std::size_t feature_j = 0;
  FeatureGrid grid_i;
  FeatureGrid grid_j;
  Matrix surface;  // K_i x K_j
};

JointPdp compute_joint_pdp(const Evaluator& ev, std::size_t i, std::size_t j, const FeatureGrid& grid_i,
                           const FeatureGrid& grid_j, const RowMatrix& draws);
JointPdp compute_joint_pdp(const Evaluator& ev, const InputSpace& space, std::size_t i, std::size_t j,
                           const FeatureGrid& grid_i, const FeatureGrid& grid_j, std::size_t n_mc,
                           std::uint64_t seed);

/// Wide CSV: header "grid,curve_0,...,pdp"; one row per grid point. Values are anchored
/// when the ensemble is. At most `max_curves` curves (in instance order) are written.
void write_curves_csv(std::ostream& out, const IceEnsemble& ens, std::size_t max_curves = SIZE_MAX);

}  // namespace icegsa
