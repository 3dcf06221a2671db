#pragma once

#include <cstddef>
#include <vector>

#include "icegsa/marginal.hpp"
#include "icegsa/pce/polynomials.hpp"
#include "icegsa/types.hpp"

namespace icegsa::pce {

using MultiIndex = std::vector<unsigned>;

/// All gamma with (sum gamma_i^q)^(1/q) <= p, ordered by total degree and, within a
/// degree, with earlier coordinates descending: (0,0) (1,0) (0,1) (2,0) (1,1) (0,2).
std::vector<MultiIndex> hyperbolic_index_set(std::size_t m, std::size_t p, double q);

/// Tensor-product orthonormal basis on an input space. indices[0] is the zero index.
class BasisSet {
 public:
  BasisSet(const InputSpace& space, std::vector<MultiIndex> indices);

  std::size_t size() const { return indices_.size(); }
  std::size_t dimension() const { return univariate_.size(); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const OrthoPoly1D& univariate(std::size_t j) const { return univariate_[j]; }
  /// Highest degree used by any term in coordinate j.
  std::size_t max_degree(std::size_t j) const { return max_degree_[j]; }

  /// Column-major n x P design matrix, F(i, k) = Psi_k(x_i).
  Matrix design(const RowMatrix& pts) const;

  /// out[i] = sum_k coef[k] Psi_k(x_i); rows are processed in parallel blocks.
  void evaluate(const RowMatrix& pts, const Vector& coef, std::span<double> out) const;

 private:
  std::vector<MultiIndex> indices_;
  std::vector<OrthoPoly1D> univariate_;
  std::vector<std::size_t> max_degree_;

  // Degree-major univariate tables for rows [r0, r0 + n).
  std::vector<std::vector<double>> tables(const RowMatrix& pts, std::size_t r0, std::size_t n) const;
};

Matrix eval_basis(const BasisSet& basis, const RowMatrix& pts);

}  // namespace icegsa::pce
