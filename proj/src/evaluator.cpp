#include "icegsa/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "icegsa/parallel.hpp"

namespace icegsa {

Evaluator::Evaluator(std::string name, std::size_t arity, BatchFn fn)
    : name_(std::move(name)), arity_(arity), fn_(std::move(fn)) {
  if (arity_ == 0) throw ParameterError("evaluator arity must be >= 1");
  if (!fn_) throw ParameterError("evaluator '" + name_ + "' has no callable");
}

void Evaluator::eval_into(const RowMatrix& pts, std::span<double> out) const {
  if (static_cast<std::size_t>(pts.cols()) != arity_) {
    throw DimensionError("evaluator '" + name_ + "' expects " + std::to_string(arity_) +
                         " columns, got " + std::to_string(pts.cols()));
  }
  if (out.size() != static_cast<std::size_t>(pts.rows())) {
    throw DimensionError("output buffer size does not match batch rows");
  }
  const double* data = pts.data();
  const auto total = static_cast<std::size_t>(pts.size());
  for (std::size_t t = 0; t < total; ++t) {
    if (!std::isfinite(data[t])) {
      throw InputError("non-finite input at row " + std::to_string(t / arity_) + ", column " +
                       std::to_string(t % arity_));
    }
  }
  fn_(pts, out);
  for (std::size_t r = 0; r < out.size(); ++r) {
    if (!std::isfinite(out[r])) {
      throw EvaluationError("evaluator '" + name_ + "' returned a non-finite value at row " +
                                std::to_string(r),
                            r);
    }
  }
}

Vector Evaluator::eval_batch(const RowMatrix& pts) const {
  Vector out(pts.rows());
  eval_into(pts, std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

double Evaluator::operator()(std::span<const double> x) const {
  RowMatrix row(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j) row(0, static_cast<Eigen::Index>(j)) = x[j];
  double y = 0.0;
  eval_into(row, std::span<double>(&y, 1));
  return y;
}

void eval_parallel_into(const Evaluator& ev, const RowMatrix& pts, std::span<double> out) {
  constexpr std::size_t kBlock = 4096;
  const auto n = static_cast<std::size_t>(pts.rows());
  if (out.size() != n) throw DimensionError("output buffer size does not match batch rows");
  if (n <= kBlock) {
    ev.eval_into(pts, out);
    return;
  }
  if (static_cast<std::size_t>(pts.cols()) != ev.arity()) {
    throw DimensionError("evaluator '" + ev.name() + "' expects " + std::to_string(ev.arity()) +
                         " columns, got " + std::to_string(pts.cols()));
  }
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t r0 = b * kBlock;
    const std::size_t len = std::min(kBlock, n - r0);
    const RowMatrix block = pts.middleRows(static_cast<Eigen::Index>(r0), static_cast<Eigen::Index>(len));
    try {
      ev.eval_into(block, out.subspan(r0, len));
    } catch (const EvaluationError& e) {
      throw EvaluationError("evaluator '" + ev.name() + "' returned a non-finite value at row " +
                                std::to_string(r0 + e.row()),
                            r0 + e.row());
    } catch (const InputError&) {
      for (std::size_t t = 0; t < len * ev.arity(); ++t) {
        if (!std::isfinite(block.data()[t])) {
          throw InputError("non-finite input at row " + std::to_string(r0 + t / ev.arity()) + ", column " +
                           std::to_string(t % ev.arity()));
        }
      }
      throw;
    }
  });
}

Vector eval_parallel(const Evaluator& ev, const RowMatrix& pts) {
  Vector out(pts.rows());
  eval_parallel_into(ev, pts, std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

Evaluator scaled(const Evaluator& ev, double factor) {
  return Evaluator(ev.name() + "*c", ev.arity(), [ev, factor](const RowMatrix& pts, std::span<double> out) {
    ev.eval_into(pts, out);
    for (double& y : out) y *= factor;
  });
}

Evaluator shifted(const Evaluator& ev, double offset) {
  return Evaluator(ev.name() + "+c", ev.arity(), [ev, offset](const RowMatrix& pts, std::span<double> out) {
    ev.eval_into(pts, out);
    for (double& y : out) y += offset;
  });
}

Evaluator linear_combination(double a, const Evaluator& f, double b, const Evaluator& g) {
  if (f.arity() != g.arity()) throw DimensionError("linear_combination: arity mismatch");
  return Evaluator("lincomb", f.arity(), [a, f, b, g](const RowMatrix& pts, std::span<double> out) {
    std::vector<double> tmp(out.size());
    f.eval_into(pts, out);
    g.eval_into(pts, tmp);
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = a * out[r] + b * tmp[r];
  });
}

Evaluator pointwise(std::string name, std::size_t arity,
                    std::function<double(std::span<const double>)> fn) {
  return Evaluator(std::move(name), arity,
                   [arity, fn = std::move(fn)](const RowMatrix& pts, std::span<double> out) {
                     for (Eigen::Index r = 0; r < pts.rows(); ++r) {
                       out[static_cast<std::size_t>(r)] = fn(std::span<const double>(pts.row(r).data(), arity));
                     }
                   });
}

Benchmark builtin_goldstein3() {
  auto fn = [](const RowMatrix& pts, std::span<double> out) {
    for (Eigen::Index r = 0; r < pts.rows(); ++r) {
      const double x1 = pts(r, 0);
      const double x2 = pts(r, 1);
      const double x3 = pts(r, 2);
      // Closed indicator: 1 at x3 == 0.
      const double indicator = x3 >= 0.0 ? 1.0 : 0.0;
      out[static_cast<std::size_t>(r)] = 0.2 * x1 - 5.0 * x2 + 10.0 * x2 * indicator;
    }
  };
  std::vector<Marginal> marginals;
  for (int j = 1; j <= 3; ++j) marginals.push_back(Marginal::uniform("x" + std::to_string(j), -1.0, 1.0));
  return {Evaluator("goldstein3", 3, fn), InputSpace(std::move(marginals))};
}

Benchmark builtin_friedman5() {
  auto fn = [](const RowMatrix& pts, std::span<double> out) {
    for (Eigen::Index r = 0; r < pts.rows(); ++r) {
      const double x3c = pts(r, 2) - 0.5;
      out[static_cast<std::size_t>(r)] = 10.0 * std::sin(std::numbers::pi * pts(r, 0) * pts(r, 1)) +
                                         20.0 * x3c * x3c + 10.0 * pts(r, 3) - 5.0 * pts(r, 4);
    }
  };
  std::vector<Marginal> marginals;
  for (int j = 1; j <= 5; ++j) marginals.push_back(Marginal::uniform("x" + std::to_string(j), 0.0, 1.0));
  return {Evaluator("friedman5", 5, fn), InputSpace(std::move(marginals))};
}

Benchmark builtin(const std::string& name) {
  if (name == "goldstein3") return builtin_goldstein3();
  if (name == "friedman5") return builtin_friedman5();
  throw ParameterError("unknown builtin '" + name + "' (expected goldstein3 or friedman5)");
}

}  // namespace icegsa
