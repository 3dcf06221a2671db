#include "icegsa/pdp_ice.hpp"

#include <algorithm>
#include <ostream>

#include "icegsa/error.hpp"
#include "icegsa/parallel.hpp"
#include "icegsa/rng.hpp"
#include "icegsa/simd/kernels.hpp"
#include "icegsa/textio.hpp"

namespace icegsa {
namespace {

constexpr std::size_t kPointsPerBatch = 4096;

void check_feature(std::size_t j, std::size_t m) {
  if (j >= m) {
    throw DimensionError("feature index " + std::to_string(j) + " out of range for " + std::to_string(m) +
                         " inputs");
  }
}

void check_grid(const FeatureGrid& grid) {
  if (grid.values.size() < 2) throw ParameterError("feature grid needs at least 2 points");
  for (double v : grid.values) {
    if (!std::isfinite(v)) throw InputError("feature grid contains a non-finite value");
  }
}

}  // namespace

RowMatrix IceEnsemble::anchored_curves() const {
  RowMatrix out = curves;
  if (!anchored) return out;
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i).array() -= offsets[static_cast<std::size_t>(i)];
  return out;
}

std::vector<double> IceEnsemble::anchored_pdp() const {
  std::vector<double> out = pdp;
  if (anchored) {
    for (double& v : out) v -= pdp_offset;
  }
  return out;
}

RowMatrix complement_sample(const InputSpace& space, std::size_t n_mc, std::uint64_t seed) {
  return draw_iid(space, n_mc, seed, streams::complement).values;
}

IceEnsemble compute_ice(const Evaluator& ev, std::size_t j, const FeatureGrid& grid, const RowMatrix& draws) {
  const auto m = static_cast<std::size_t>(draws.cols());
  check_feature(j, m);
  check_grid(grid);
  if (ev.arity() != m) throw DimensionError("evaluator arity does not match the sample width");
  if (draws.rows() < 1) throw ParameterError("ICE needs at least one instance");

  const auto n = static_cast<std::size_t>(draws.rows());
  const std::size_t kk = grid.values.size();
  IceEnsemble ens;
  ens.feature = j;
  ens.grid = grid;
  ens.grid.feature = j;
  ens.curves.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(kk));

  const std::size_t per_block = std::max<std::size_t>(1, kPointsPerBatch / kk);
  const std::size_t blocks = (n + per_block - 1) / per_block;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t i0 = b * per_block;
    const std::size_t len = std::min(per_block, n - i0);
    RowMatrix batch(static_cast<Eigen::Index>(len * kk), static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < len; ++r) {
      for (std::size_t k = 0; k < kk; ++k) {
        const auto row = static_cast<Eigen::Index>(r * kk + k);
        batch.row(row) = draws.row(static_cast<Eigen::Index>(i0 + r));
        batch(row, static_cast<Eigen::Index>(j)) = grid.values[k];
      }
    }
    try {
      ev.eval_into(batch, std::span<double>(ens.curves.data() + i0 * kk, len * kk));
    } catch (const EvaluationError& e) {
      const std::size_t i = i0 + e.row() / kk;
      const std::size_t k = e.row() % kk;
      throw CurveEvaluationError("ICE evaluation failed for instance " + std::to_string(i) + " at grid point " +
                                     std::to_string(k) + " (x" + std::to_string(j + 1) + " = " +
                                     format_double(grid.values[k]) + "): " + e.what(),
                                 i, k);
    }
  });

  ens.pdp.resize(kk);
  simd::column_mean(ens.curves.data(), n, kk, kk, ens.pdp.data());

  ens.instances.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m - 1));
  for (std::size_t c = 0, out = 0; c < m; ++c) {
    if (c == j) continue;
    ens.instances.col(static_cast<Eigen::Index>(out++)) = draws.col(static_cast<Eigen::Index>(c));
  }
  return ens;
}

IceEnsemble compute_ice(const Evaluator& ev, const InputSpace& space, std::size_t j, const FeatureGrid& grid,
                        std::size_t n_mc, std::uint64_t seed) {
  if (n_mc < 1) throw ParameterError("n_mc must be at least 1");
  return compute_ice(ev, j, grid, complement_sample(space, n_mc, seed));
}

IceEnsemble anchor_curves(const Evaluator& ev, const IceEnsemble& ens, double a_j) {
  if (!(a_j >= ens.grid.values.front() && a_j <= ens.grid.values.back())) {
    throw ParameterError("anchor " + format_double(a_j) + " lies outside the grid span [" +
                         format_double(ens.grid.values.front()) + ", " + format_double(ens.grid.values.back()) + "]");
  }
  const auto n = ens.instances.rows();
  const auto m = ens.instances.cols() + 1;
  const auto j = static_cast<Eigen::Index>(ens.feature);
  RowMatrix pts(n, m);
  pts.leftCols(j) = ens.instances.leftCols(j);
  pts.col(j).setConstant(a_j);
  pts.rightCols(m - j - 1) = ens.instances.rightCols(m - j - 1);

  IceEnsemble out = ens;
  out.offsets.assign(static_cast<std::size_t>(n), 0.0);
  try {
    eval_parallel_into(ev, pts, out.offsets);
  } catch (const EvaluationError& e) {
    throw CurveEvaluationError("anchor evaluation failed for instance " + std::to_string(e.row()) + ": " + e.what(),
                               e.row(), ens.k());
  }
  double sum = 0.0;
  for (double v : out.offsets) sum += v;
  out.pdp_offset = sum / static_cast<double>(n);
  out.anchored = true;
  out.anchor_value = a_j;
  return out;
}

JointPdp compute_joint_pdp(const Evaluator& ev, std::size_t i, std::size_t j, const FeatureGrid& grid_i,
                           const FeatureGrid& grid_j, const RowMatrix& draws) {
  const auto m = static_cast<std::size_t>(draws.cols());
  check_feature(i, m);
  check_feature(j, m);
  if (i == j) throw ParameterError("joint PDP needs two distinct features");
  check_grid(grid_i);
  check_grid(grid_j);
  if (ev.arity() != m) throw DimensionError("evaluator arity does not match the sample width");
  if (draws.rows() < 1) throw ParameterError("joint PDP needs at least one instance");

  const auto n = static_cast<std::size_t>(draws.rows());
  const std::size_t ki = grid_i.values.size();
  const std::size_t kj = grid_j.values.size();
  JointPdp out{i, j, grid_i, grid_j, Matrix(static_cast<Eigen::Index>(ki), static_cast<Eigen::Index>(kj))};
  out.grid_i.feature = i;
  out.grid_j.feature = j;

  parallel_for(ki, [&](std::size_t a) {
    RowMatrix batch = draws;
    batch.col(static_cast<Eigen::Index>(i)).setConstant(grid_i.values[a]);
    std::vector<double> y(n);
    for (std::size_t b = 0; b < kj; ++b) {
      batch.col(static_cast<Eigen::Index>(j)).setConstant(grid_j.values[b]);
      try {
        ev.eval_into(batch, y);
      } catch (const EvaluationError& e) {
        throw CurveEvaluationError("joint PDP evaluation failed for instance " + std::to_string(e.row()) +
                                       " at grid cell (" + std::to_string(a) + ", " + std::to_string(b) +
                                       "): " + e.what(),
                                   e.row(), a * kj + b);
      }
      double sum = 0.0;
      for (double v : y) sum += v;
      out.surface(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = sum / static_cast<double>(n);
    }
  });
  return out;
}

JointPdp compute_joint_pdp(const Evaluator& ev, const InputSpace& space, std::size_t i, std::size_t j,
                           const FeatureGrid& grid_i, const FeatureGrid& grid_j, std::size_t n_mc,
                           std::uint64_t seed) {
  if (n_mc < 1) throw ParameterError("n_mc must be at least 1");
  return compute_joint_pdp(ev, i, j, grid_i, grid_j, complement_sample(space, n_mc, seed));
}

void write_curves_csv(std::ostream& out, const IceEnsemble& ens, std::size_t max_curves) {
  const std::size_t nc = std::min(max_curves, ens.n_mc());
  const double pdp_shift = ens.anchored ? ens.pdp_offset : 0.0;
  out << "grid";
  for (std::size_t c = 0; c < nc; ++c) out << ",curve_" << c;
  out << ",pdp\n";
  for (std::size_t k = 0; k < ens.k(); ++k) {
    out << format_double(ens.grid.values[k]);
    for (std::size_t c = 0; c < nc; ++c) {
      const double shift = ens.anchored ? ens.offsets[c] : 0.0;
      out << ',' << format_double(ens.curves(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k)) - shift);
    }
    out << ',' << format_double(ens.pdp[k] - pdp_shift) << '\n';
  }
}

}  // namespace icegsa
