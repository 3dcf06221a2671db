#include "icegsa/pce/lars.hpp"

#include <cmath>
#include <limits>

#include "icegsa/error.hpp"

namespace icegsa::pce {
namespace {

// Columns whose component orthogonal to the active set falls below this (columns are
// unit-norm) are treated as linearly dependent.
constexpr double kRankTolerance = 1e-8;
// Steps whose normalized LOO is within this of the best are ties; the earliest wins.
constexpr double kLooTieTolerance = 1e-12;

}  // namespace

Vector LarsResult::coefficients_at(std::size_t step) const {
  if (step >= path.size()) throw ParameterError("LARS step out of range");
  const auto k = static_cast<Eigen::Index>(path[step].active.size());
  const auto p = col_norm_.size();
  Vector beta = Vector::Zero(p);
  double intercept = y_mean_;
  if (k > 0) {
    const Vector bn = r_.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(z_.head(k));
    for (Eigen::Index l = 0; l < k; ++l) {
      const auto j = static_cast<Eigen::Index>(order_[static_cast<std::size_t>(l)]);
      beta[j] = bn[l] / col_norm_[j];
      intercept -= beta[j] * col_mean_[j];
    }
  }
  beta[0] = intercept / const_value_;
  return beta;
}

LarsResult fit_lars(const Matrix& design, const Vector& y) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (n < 2) throw ParameterError("LARS needs at least 2 observations");
  if (p < 1) throw ParameterError("design matrix has no columns");
  if (y.size() != n) throw DimensionError("response length does not match design rows");
  if (!design.allFinite() || !y.allFinite()) throw InputError("design or response contains non-finite values");
  const double c0 = design(0, 0);
  if (c0 == 0.0 || (design.col(0).array() != c0).any()) {
    throw ParameterError("design column 0 must be a nonzero constant");
  }

  LarsResult res;
  res.const_value_ = c0;
  res.y_mean_ = y.mean();
  res.col_mean_ = Vector::Zero(p);
  res.col_norm_ = Vector::Ones(p);

  const Vector r0 = y.array() - res.y_mean_;
  const double sst = r0.squaredNorm();
  const double var_y = sst / static_cast<double>(n - 1);
  const double dn = static_cast<double>(n);

  // Centered, unit-norm candidate columns.
  Matrix xn = Matrix::Zero(n, p);
  std::vector<bool> usable(static_cast<std::size_t>(p), false);
  for (Eigen::Index j = 1; j < p; ++j) {
    const double mean = design.col(j).mean();
    xn.col(j) = design.col(j).array() - mean;
    const double norm = xn.col(j).norm();
    res.col_mean_[j] = mean;
    if (norm > 1e-10 * design.col(j).norm() && norm > 0.0) {
      res.col_norm_[j] = norm;
      xn.col(j) /= norm;
      usable[static_cast<std::size_t>(j)] = true;
    } else {
      xn.col(j).setZero();
    }
  }

  Vector resid = r0;
  Vector h = Vector::Constant(n, 1.0 / dn);
  auto loo_of = [&]() {
    if ((h.array() >= 1.0 - 1e-10).any()) return std::numeric_limits<double>::infinity();
    if (var_y == 0.0) return 0.0;
    return (resid.array() / (1.0 - h.array())).square().mean() / var_y;
  };
  res.path.push_back({{}, loo_of()});

  const Eigen::Index kmax = std::min<Eigen::Index>(p - 1, n - 2);
  Matrix q(n, std::max<Eigen::Index>(kmax, 0));
  res.r_ = Matrix::Zero(kmax, kmax);
  res.z_ = Vector::Zero(kmax);
  std::vector<bool> active(static_cast<std::size_t>(p), false);
  Vector mu = Vector::Zero(n);

  auto perfect = [&]() { return resid.squaredNorm() <= 1e-28 * sst; };

  Eigen::Index next = -1;
  if (sst > 0.0 && kmax > 0) {
    const Vector c = xn.transpose() * r0;
    double best = 0.0;
    for (Eigen::Index j = 1; j < p; ++j) {
      if (usable[static_cast<std::size_t>(j)] && std::fabs(c[j]) > best) {
        best = std::fabs(c[j]);
        next = j;
      }
    }
  }

  for (Eigen::Index k = 0; next >= 0 && k < kmax; ++k) {
    // Modified Gram-Schmidt, two passes, against the current active columns.
    Vector v = xn.col(next);
    Vector rcol = Vector::Zero(k + 1);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index l = 0; l < k; ++l) {
        const double d = q.col(l).dot(v);
        v -= d * q.col(l);
        rcol[l] += d;
      }
    }
    const double rn = v.norm();
    if (rn < kRankTolerance) {
      res.truncated = true;
      break;
    }
    q.col(k) = v / rn;
    rcol[k] = rn;
    res.r_.col(k).head(k + 1) = rcol;
    res.z_[k] = q.col(k).dot(r0);
    resid -= res.z_[k] * q.col(k);
    h.array() += q.col(k).array().square();
    active[static_cast<std::size_t>(next)] = true;
    res.order_.push_back(static_cast<std::size_t>(next));
    res.path.push_back({res.order_, loo_of()});
    if (k + 1 == kmax || perfect()) break;

    // Equiangular LARS direction over the active set.
    const Vector corr = xn.transpose() * (r0 - mu);
    const Eigen::Index ka = k + 1;
    Vector s(ka);
    double cmax = 0.0;
    for (Eigen::Index l = 0; l < ka; ++l) {
      const double cl = corr[static_cast<Eigen::Index>(res.order_[static_cast<std::size_t>(l)])];
      s[l] = cl >= 0.0 ? 1.0 : -1.0;
      cmax = std::max(cmax, std::fabs(cl));
    }
    const auto rk = res.r_.topLeftCorner(ka, ka);
    const Vector t = rk.transpose().triangularView<Eigen::Lower>().solve(s);
    const Vector g = rk.triangularView<Eigen::Upper>().solve(t);
    const double aa = 1.0 / std::sqrt(s.dot(g));
    const Vector w = aa * g;
    Vector u = Vector::Zero(n);
    for (Eigen::Index l = 0; l < ka; ++l) {
      u += w[l] * xn.col(static_cast<Eigen::Index>(res.order_[static_cast<std::size_t>(l)]));
    }
    const Vector a = xn.transpose() * u;

    double gamma = cmax / aa;
    next = -1;
    for (Eigen::Index j = 1; j < p; ++j) {
      if (!usable[static_cast<std::size_t>(j)] || active[static_cast<std::size_t>(j)]) continue;
      for (const double cand : {(cmax - corr[j]) / (aa - a[j]), (cmax + corr[j]) / (aa + a[j])}) {
        if (std::isfinite(cand) && cand > 1e-15 && cand < gamma) {
          gamma = cand;
          next = j;
        }
      }
    }
    if (next < 0) {
      // No remaining column can tie; fall back to the most correlated inactive one.
      const Vector c_after = xn.transpose() * (r0 - mu - gamma * u);
      double best = 0.0;
      for (Eigen::Index j = 1; j < p; ++j) {
        if (usable[static_cast<std::size_t>(j)] && !active[static_cast<std::size_t>(j)] &&
            std::fabs(c_after[j]) > best) {
          best = std::fabs(c_after[j]);
          next = j;
        }
      }
    }
    mu += gamma * u;
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& step : res.path) best = std::min(best, step.loo);
  for (std::size_t s = 0; s < res.path.size(); ++s) {
    if (res.path[s].loo <= best + kLooTieTolerance) {
      res.selected = s;
      break;
    }
  }
  if (!std::isfinite(best)) throw FitError("every step of the LARS path has undefined leave-one-out error");
  res.beta = res.coefficients_at(res.selected);
  res.loo = res.path[res.selected].loo;
  const auto k = static_cast<Eigen::Index>(res.path[res.selected].active.size());
  if (sst > 0.0) {
    const double ssr = std::max(0.0, sst - res.z_.head(k).squaredNorm());
    res.r2 = 1.0 - ssr / sst;
  } else {
    res.r2 = 1.0;
  }
  return res;
}

}  // namespace icegsa::pce
