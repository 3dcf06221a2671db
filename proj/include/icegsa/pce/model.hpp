#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "icegsa/evaluator.hpp"
#include "icegsa/marginal.hpp"
#include "icegsa/pce/basis.hpp"
#include "icegsa/types.hpp"

namespace icegsa::pce {

struct OrderDiagnostics {
  std::size_t p = 0;
  std::size_t basis_size = 0;
  std::size_t nonzeros = 0;
  double loo = 0.0;
  double r2 = 0.0;
  std::string status;  // "ok" or the reason the fit was skipped
};

struct PceDiagnostics {
  std::size_t p = 0;
  double q = 1.0;
  double r2 = 0.0;
  double loo = 0.0;
  std::size_t n_train = 0;
  double heldout_r2 = std::numeric_limits<double>::quiet_NaN();
  std::vector<OrderDiagnostics> per_order;
};

/// Immutable fitted expansion f(x) = sum_k beta_k Psi_k(x), coefficients in output units.
class PceModel {
 public:
  PceModel(InputSpace space, std::vector<MultiIndex> indices, Vector beta, PceDiagnostics diagnostics);

  const InputSpace& space() const { return space_; }
  const BasisSet& basis() const { return basis_; }
  const Vector& beta() const { return beta_; }
  const PceDiagnostics& diagnostics() const { return diagnostics_; }
  void set_heldout_r2(double r2) { diagnostics_.heldout_r2 = r2; }
  std::size_t nonzeros() const;

 private:
  InputSpace space_;
  BasisSet basis_;
  Vector beta_;
  PceDiagnostics diagnostics_;
};

/// Fits one hybrid-LARS expansion per order p = 1..p_max and keeps the smallest
/// normalized leave-one-out error; near-ties go to the smaller p.
PceModel select_order(const InputSpace& space, const RowMatrix& x, const Vector& y, std::size_t p_max,
                      double q = 1.0);

Vector predict(const PceModel& model, const RowMatrix& pts);

/// Wraps the model as an evaluator that shares it.
Evaluator as_evaluator(const PceModel& model, std::string name = "pce");

struct PceSobol {
  std::vector<double> first;
  std::vector<double> total;
  Matrix second;  // symmetric, zero diagonal
  double variance = 0.0;
};

PceSobol pce_sobol(const PceModel& model);

/// 1 - SSE / SST.
double r_squared(const Vector& truth, const Vector& fitted);

std::string to_text(const PceModel& model);
PceModel from_text(const std::string& text);
void save_model(const PceModel& model, const std::filesystem::path& path);
PceModel load_model(const std::filesystem::path& path);

}  // namespace icegsa::pce
