#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "icegsa/error.hpp"
#include "icegsa/marginal.hpp"
#include "icegsa/types.hpp"

namespace icegsa {

/// Raised when an evaluator returns a non-finite value; carries the offending batch row.
class EvaluationError : public ComputeError {
 public:
  EvaluationError(const std::string& what, std::size_t row) : ComputeError(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Pure, stateless batch function R^{n x m} -> R^n. Copies share the underlying callable.
class Evaluator {
 public:
  /// `out` has pts.rows() entries. The callable must not depend on row order.
  using BatchFn = std::function<void(const RowMatrix& pts, std::span<double> out)>;

  Evaluator(std::string name, std::size_t arity, BatchFn fn);

  const std::string& name() const { return name_; }
  std::size_t arity() const { return arity_; }

  /// Validates arity and finiteness on the way in and out.
  Vector eval_batch(const RowMatrix& pts) const;
  void eval_into(const RowMatrix& pts, std::span<double> out) const;
  double operator()(std::span<const double> x) const;

 private:
  std::string name_;
  std::size_t arity_;
  BatchFn fn_;
};

/// Evaluates rows in parallel blocks; identical to eval_batch for any worker count.
/// EvaluationError rows refer to the full batch.
Vector eval_parallel(const Evaluator& ev, const RowMatrix& pts);
void eval_parallel_into(const Evaluator& ev, const RowMatrix& pts, std::span<double> out);

Evaluator scaled(const Evaluator& ev, double factor);
Evaluator shifted(const Evaluator& ev, double offset);
/// a*f + b*g on the same arity.
Evaluator linear_combination(double a, const Evaluator& f, double b, const Evaluator& g);
/// Evaluator built from a pointwise function; convenient in tests and oracles.
Evaluator pointwise(std::string name, std::size_t arity,
                    std::function<double(std::span<const double>)> fn);

struct Benchmark {
  Evaluator evaluator;
  InputSpace space;
};

/// y = 0.2 x1 - 5 x2 + 10 x2 1{x3 >= 0} on [-1, 1]^3.
Benchmark builtin_goldstein3();
/// y = 10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 - 5 x5 on [0, 1]^5.
Benchmark builtin_friedman5();
/// Lookup by name ("goldstein3" | "friedman5"); ParameterError otherwise.
Benchmark builtin(const std::string& name);

}  // namespace icegsa
