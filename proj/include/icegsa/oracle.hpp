#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "icegsa/evaluator.hpp"
#include "icegsa/marginal.hpp"
#include "icegsa/sampling.hpp"
#include "icegsa/types.hpp"

namespace icegsa::oracle {

/// Reference PDP by plain per-grid-point Monte Carlo on the dense oracle stream.
struct ReferencePdp {
  std::vector<double> values;
  std::vector<double> std_error;  // standard error of each value
};

/// Evaluates one grid point at a time with compensated summation; shares no code
/// with the ICE path beyond the evaluator and the marginal quantiles.
ReferencePdp bruteforce_pdp(const Evaluator& ev, const InputSpace& space, std::size_t j, const FeatureGrid& grid,
                            std::size_t n_dense, std::uint64_t seed);

/// Dense sample size the reference PDP needs relative to a production run.
inline constexpr std::size_t kDenseFactor = 10;

enum class Structure { additive, multiplicative_nonneg, multiplicative_signed, general_sum };
const char* to_string(Structure s);
Structure structure_from_string(const std::string& text);
inline constexpr Structure kAllStructures[] = {Structure::additive, Structure::multiplicative_nonneg,
                                               Structure::multiplicative_signed, Structure::general_sum};

/// Monomial-basis polynomial c0 + c1 x + ... evaluated by Horner's rule.
struct Polynomial {
  std::vector<double> coef;
  double operator()(double x) const;
};

/// h(x_C) = prod_c p_c(x_c), optionally squared; an empty product is 1.
struct ComplementFactor {
  std::vector<std::size_t> features;
  std::vector<Polynomial> polys;
  bool squared = false;
  double operator()(std::span<const double> x) const;
};

struct SeparableTerm {
  Polynomial g;  // in x_j
  ComplementFactor h;
};

/// f(x) = sum_l g_l(x_j) h_l(x_C) on [-1, 1]^m.
struct SeparableSpec {
  std::size_t m = 0;
  std::size_t feature = 0;  // j
  Structure structure = Structure::general_sum;
  std::vector<SeparableTerm> terms;
  double operator()(std::span<const double> x) const;
};

Evaluator to_evaluator(const SeparableSpec& spec);
/// Uniform [-1, 1]^m.
InputSpace separable_space(std::size_t m);

struct SeparableFunction {
  Evaluator evaluator;
  SeparableSpec spec;
  InputSpace space;
};

/// Coefficients are uniform on [-1, 1] from the oracle function stream; the separated
/// feature is drawn from the same stream. Layout by structure:
///   additive:               sum_l g_l(x_j) + sum_l h_l(x_C)
///   multiplicative_nonneg:  g(x_j) h(x_C)^2
///   multiplicative_signed:  g(x_j) h(x_C)
///   general_sum:            sum_l g_l(x_j) h_l(x_C)
/// k applies to the two sum layouts. g has degree 1..max_deg and each factor of h
/// degree 0..max_deg.
SeparableFunction random_separable(std::size_t m, std::size_t k, std::size_t max_deg, Structure structure,
                                   std::uint64_t seed);

struct IceSettings {
  std::size_t grid_points = 50;
  std::size_t n_mc = 1000;
  std::size_t replications = 10;
};

struct InequalityResult {
  double mu_ice = 0.0;
  double i_pdp = 0.0;
  double gap = 0.0;  // mu_ice - i_pdp
  double tolerance = 0.0;
  bool pass = false;
};

/// pass <=> mu_ice >= i_pdp - tolerance, both from one ensemble on the complement stream.
InequalityResult check_inequality(const Evaluator& ev, const InputSpace& space, std::size_t j, double tolerance,
                                  const IceSettings& settings, std::uint64_t seed);

/// Std of (mu_ice - i_pdp) over replicated complement samples (replication streams).
double replicated_gap_std(const Evaluator& ev, const InputSpace& space, std::size_t j, const IceSettings& settings,
                          std::uint64_t seed);

/// Relative floor that absorbs rounding when the gap is exactly zero in exact arithmetic.
inline constexpr double kRoundingFloor = 1e-12;

/// check_inequality with tolerance = 3 * replicated_gap_std + rounding floor.
InequalityResult check_inequality(const Evaluator& ev, const InputSpace& space, std::size_t j,
                                  const IceSettings& settings, std::uint64_t seed);

struct JensenResult {
  double mean_sqrt_form = 0.0;  // mean over z of sqrt(z' A z)
  double sqrt_form_of_mean = 0.0;
  bool pass = false;
};

/// Requires symmetric A with eigenvalues >= -1e-10 (ParameterError otherwise). z is n x k.
JensenResult jensen_psd_check(const Matrix& a, const RowMatrix& z);

/// One trial of a verification suite.
struct TrialRecord {
  std::string kind;       // "separable", "pce", "psd", "pdp"
  std::string structure;  // structure tag or benchmark name
  std::size_t m = 0;
  std::size_t feature = 0;
  double gap = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<TrialRecord> trials;
  std::size_t passed() const;
  bool all_passed() const { return passed() == trials.size(); }
};

struct AppendixSuiteOptions {
  std::size_t separable_trials = 1000;
  std::size_t pce_models = 50;
  std::size_t psd_trials = 1000;
  IceSettings ice;
};

/// Random separable functions cycling through the four structures with m in 2..6,
/// PCE models fitted to random general-sum functions (every feature checked), and
/// random PSD matrices for the Jensen step.
VerificationReport run_appendix_suite(const AppendixSuiteOptions& options, std::uint64_t seed);

/// Production PDP against the dense reference for every feature of both builtin
/// benchmarks; gap and tolerance are the worst grid point's |difference| and 3 pooled
/// standard errors. One record per (replication, benchmark, feature).
VerificationReport run_estimator_suite(std::size_t replications, std::size_t n_mc, std::uint64_t seed);

/// {"suite", "seed", "passed", "total", "trials": [{kind, structure, m, feature, gap, tolerance, verdict}]}
std::string to_json(const VerificationReport& report);

}  // namespace icegsa::oracle
