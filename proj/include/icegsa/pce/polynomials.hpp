#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "icegsa/marginal.hpp"

namespace icegsa::pce {

/// Univariate polynomials orthonormal w.r.t. one marginal, stored as three-term
/// recurrence coefficients on a standardized variable z = (clamp(x) - shift) / scale:
///   z psi_k = b_{k+1} psi_{k+1} + alpha_k psi_k + b_k psi_{k-1},  psi_0 = 1.
/// Legendre for uniform (z in [-1, 1]), probabilists' Hermite for gaussian (z standard
/// normal), Stieltjes on the sample for empirical (z = standardized sample, clamped).
class OrthoPoly1D {
 public:
  static OrthoPoly1D for_marginal(const Marginal& marginal, std::size_t max_degree);

  Family family() const { return family_; }
  /// May be lower than requested for empirical marginals with few distinct values.
  std::size_t max_degree() const { return alpha_.size() - 1; }
  const std::vector<double>& alpha() const { return alpha_; }
  const std::vector<double>& b() const { return b_; }

  double standardize(double x) const;

  /// (degree + 1) x n table, degree-major: out[d * n + i] = psi_d(x_i).
  void evaluate(std::span<const double> x, std::size_t degree, std::span<double> out) const;
  double value(double x, std::size_t degree) const;

 private:
  Family family_ = Family::uniform;
  double shift_ = 0.0;
  double scale_ = 1.0;
  double lower_ = 0.0;
  double upper_ = 0.0;
  bool clamp_ = false;
  std::vector<double> alpha_;
  std::vector<double> b_;
};

}  // namespace icegsa::pce
