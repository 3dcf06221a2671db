#include "icegsa/pce/polynomials.hpp"

#include <algorithm>
#include <cmath>

#include "icegsa/error.hpp"
#include "icegsa/simd/kernels.hpp"

namespace icegsa::pce {

OrthoPoly1D OrthoPoly1D::for_marginal(const Marginal& marginal, std::size_t max_degree) {
  OrthoPoly1D poly;
  poly.family_ = marginal.family();
  switch (poly.family_) {
    case Family::uniform: {
      const auto& u = std::get<UniformParams>(marginal.params());
      poly.shift_ = 0.5 * (u.lo + u.hi);
      poly.scale_ = 0.5 * (u.hi - u.lo);
      poly.alpha_.assign(max_degree + 1, 0.0);
      poly.b_.assign(max_degree + 1, 0.0);
      for (std::size_t k = 1; k <= max_degree; ++k) {
        const double kk = static_cast<double>(k);
        poly.b_[k] = kk / std::sqrt(4.0 * kk * kk - 1.0);
      }
      break;
    }
    case Family::gaussian: {
      const auto& g = std::get<GaussianParams>(marginal.params());
      poly.shift_ = g.mean;
      poly.scale_ = g.std;
      poly.alpha_.assign(max_degree + 1, 0.0);
      poly.b_.assign(max_degree + 1, 0.0);
      for (std::size_t k = 1; k <= max_degree; ++k) poly.b_[k] = std::sqrt(static_cast<double>(k));
      break;
    }
    case Family::empirical: {
      const auto& e = std::get<EmpiricalParams>(marginal.params());
      poly.shift_ = e.mean;
      poly.scale_ = e.std;
      poly.lower_ = e.sorted.front();
      poly.upper_ = e.sorted.back();
      poly.clamp_ = true;
      const std::size_t n = e.sorted.size();
      const double w = 1.0 / static_cast<double>(n);
      std::vector<double> z(n);
      for (std::size_t i = 0; i < n; ++i) z[i] = (e.sorted[i] - poly.shift_) / poly.scale_;
      // Discretized Stieltjes procedure on the sample measure.
      std::vector<double> prev(n, 0.0), cur(n, 1.0), next(n);
      poly.alpha_.clear();
      poly.b_.assign(1, 0.0);
      for (std::size_t k = 0;; ++k) {
        double a = 0.0;
        for (std::size_t i = 0; i < n; ++i) a += w * z[i] * cur[i] * cur[i];
        poly.alpha_.push_back(a);
        if (k == max_degree) break;
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          next[i] = (z[i] - a) * cur[i] - poly.b_[k] * prev[i];
          ss += w * next[i] * next[i];
        }
        const double bk1 = std::sqrt(ss);
        // The sample measure supports at most (#distinct - 1) orthogonal degrees.
        if (!(bk1 > 1e-8)) break;
        poly.b_.push_back(bk1);
        for (std::size_t i = 0; i < n; ++i) next[i] /= bk1;
        std::swap(prev, cur);
        std::swap(cur, next);
      }
      break;
    }
  }
  return poly;
}

double OrthoPoly1D::standardize(double x) const {
  if (clamp_) x = std::clamp(x, lower_, upper_);
  return (x - shift_) / scale_;
}

void OrthoPoly1D::evaluate(std::span<const double> x, std::size_t degree, std::span<double> out) const {
  if (degree > max_degree()) throw ParameterError("polynomial degree exceeds the prepared maximum");
  const std::size_t n = x.size();
  if (out.size() < (degree + 1) * n) throw DimensionError("polynomial table buffer too small");
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = standardize(x[i]);
  simd::recurrence_table(alpha_.data(), b_.data(), degree, z.data(), n, out.data());
}

double OrthoPoly1D::value(double x, std::size_t degree) const {
  std::vector<double> table(degree + 1);
  evaluate(std::span<const double>(&x, 1), degree, table);
  return table[degree];
}

}  // namespace icegsa::pce
