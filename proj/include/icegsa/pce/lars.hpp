#pragma once

#include <cstddef>
#include <vector>

#include "icegsa/types.hpp"

namespace icegsa::pce {

/// One step of the LARS path: the active columns after the step and the
/// hybrid (least-squares refit) leave-one-out error, normalized by var(y).
struct LarsStep {
  std::vector<std::size_t> active;
  double loo = 0.0;
};

struct LarsResult {
  std::vector<LarsStep> path;  // path[0] is the constant-only model
  std::size_t selected = 0;    // index into path
  Vector beta;                 // length P, zero outside the selected active set
  double loo = 0.0;
  double r2 = 0.0;
  bool truncated = false;  // stopped early on a rank-deficient candidate

  /// Least-squares coefficients restricted to path[step].active.
  Vector coefficients_at(std::size_t step) const;

 private:
  friend LarsResult fit_lars(const Matrix& design, const Vector& y);
  Matrix r_;                     // upper-triangular factor of the normalized active columns
  Vector z_;                     // Q^T (y - mean(y))
  std::vector<std::size_t> order_;
  Vector col_mean_;
  Vector col_norm_;
  double y_mean_ = 0.0;
  double const_value_ = 1.0;
};

/// Hybrid LARS on an n x P design whose column 0 is constant. The active set grows
/// by LARS; each step is refit by least squares and scored by the hat-matrix LOO.
LarsResult fit_lars(const Matrix& design, const Vector& y);

}  // namespace icegsa::pce
