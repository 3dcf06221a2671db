#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "icegsa/evaluator.hpp"
#include "icegsa/marginal.hpp"
#include "icegsa/types.hpp"

namespace icegsa {

inline constexpr std::size_t kMaxShapFeatures = 20;
inline constexpr std::size_t kMaxShapInteractionFeatures = 16;

/// How absent features are filled in the coalition value v(T).
enum class ShapBaseline {
  interventional,  // mean over a shared background sample
  anchor,          // the input space's anchor point
};
const char* to_string(ShapBaseline baseline);

struct ShapRecord {
  std::vector<double> x;
  std::vector<double> phi;
  double phi0 = 0.0;  // v(empty set)
  double fx = 0.0;    // f(x); v(all features) is its background average
};

/// Coalition values v(T) for every T (bit j of the mask = feature j present).
std::vector<double> coalition_values(const Evaluator& ev, std::span<const double> x, const RowMatrix& background);
std::vector<double> coalition_values_anchor(const Evaluator& ev, std::span<const double> x,
                                            std::span<const double> anchor);

/// Shapley values from a full coalition table.
std::vector<double> shapley_from_values(const std::vector<double>& v, std::size_t m);
/// Pairwise Shapley interaction index from a full coalition table; symmetric in (i, j) bitwise.
double interaction_from_values(const std::vector<double>& v, std::size_t m, std::size_t i, std::size_t j);

/// Background of n_bg rows from the SHAP background stream.
RowMatrix shap_background(const InputSpace& space, std::size_t n_bg, std::uint64_t seed);

ShapRecord exact_shap(const Evaluator& ev, const InputSpace& space, std::span<const double> x, std::size_t n_bg,
                      std::uint64_t seed, ShapBaseline baseline = ShapBaseline::interventional);

double shap_interaction_pair(const Evaluator& ev, const InputSpace& space, std::span<const double> x, std::size_t i,
                             std::size_t j, std::size_t n_bg, std::uint64_t seed);

/// Global summaries over n_pts points drawn from the SHAP point stream.
struct ShapSummary {
  RowMatrix points;           // n_pts x m
  RowMatrix phi;              // n_pts x m, interventional
  std::vector<double> mean_abs_phi;         // interventional
  std::vector<double> mean_abs_phi_anchor;  // anchor baseline
  Matrix mean_abs_interaction;              // symmetric, zero diagonal; empty if not requested
  double phi0 = 0.0;
  double max_efficiency_error = 0.0;        // max |phi0 + sum phi - f(x)|
};

ShapSummary shap_summary(const Evaluator& ev, const InputSpace& space, std::size_t n_pts, std::size_t n_bg,
                         std::uint64_t seed, bool interactions);

std::vector<double> averaged_shap(const Evaluator& ev, const InputSpace& space, std::size_t n_pts, std::size_t n_bg,
                                  std::uint64_t seed);
Matrix averaged_shap_interaction(const Evaluator& ev, const InputSpace& space, std::size_t n_pts, std::size_t n_bg,
                                 std::uint64_t seed);

}  // namespace icegsa
