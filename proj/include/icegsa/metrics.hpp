#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "icegsa/evaluator.hpp"
#include "icegsa/marginal.hpp"
#include "icegsa/pdp_ice.hpp"
#include "icegsa/types.hpp"

namespace icegsa {

// All standard deviations below use the (n - 1) denominator.

/// Standard deviation of the PDP across the grid.
double i_pdp(const IceEnsemble& ens);

/// Per-curve standard deviation across the grid.
std::vector<double> ice_importances(const IceEnsemble& ens);

struct MuSigma {
  double mu = 0.0;
  double sigma = 0.0;
};
MuSigma mu_sigma_ice(const std::vector<double>& importances);

struct IceCorrelations {
  std::vector<double> rho;  // NaN where the curve (or the PDP) is flat
  double sigma_rho = std::numeric_limits<double>::quiet_NaN();
  std::size_t excluded = 0;
  bool pdp_flat = false;
};
IceCorrelations ice_correlations(const IceEnsemble& ens);

/// Mean of std_b(std_a surface) and std_a(std_b surface).
double two_way_ipdp(const JointPdp& joint);

struct SobolIndices {
  std::vector<double> first;
  std::vector<double> total;
  Matrix second;  // symmetric, zero diagonal; empty unless requested
  double variance = 0.0;
  std::size_t n_base = 0;
  std::size_t evaluations = 0;
  /// True for any index outside [0, 1]; values are reported unclipped.
  bool out_of_range = false;
};

/// Saltelli first-order and Jansen total-order pick-freeze estimators.
SobolIndices sobol_mc(const Evaluator& ev, const InputSpace& space, std::size_t n_base, std::uint64_t seed);
/// Additionally estimates second-order indices from doubly frozen designs:
/// S_ij = mean(yB (yAB_ij - yAB_i - yAB_j + yA)) / V.
SobolIndices sobol_second_mc(const Evaluator& ev, const InputSpace& space, std::size_t n_base,
                             std::uint64_t seed);

struct BoxplotStats {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
  double lower_whisker = 0.0;
  double upper_whisker = 0.0;
  std::vector<double> outliers;
};
/// Quartiles by linear interpolation between order statistics (h = p (n - 1)).
BoxplotStats boxplot_stats(std::vector<double> samples);

struct FeatureSensitivity {
  std::string name;
  std::size_t feature = 0;
  double i_pdp = 0.0;
  double mu_ice = 0.0;
  double sigma_ice = 0.0;
  double sigma_rho = 0.0;
  std::size_t rho_excluded = 0;
  BoxplotStats rho_box;
  double s_first = 0.0;
  double s_total = 0.0;
  double sh_bar = 0.0;         // mean |phi|, interventional background
  double sh_bar_anchor = 0.0;  // mean |phi|, anchor-point baseline
};

enum class InteractionTag { pdp, sobol2, shap };
const char* to_string(InteractionTag tag);

struct InteractionMatrix {
  InteractionTag tag = InteractionTag::pdp;
  Matrix values;
  std::size_t clipped = 0;  // negative estimates raised to zero
};
/// Symmetric matrix with the given diagonal and upper-triangle off-diagonal entries
/// (lower triangle ignored); negative entries are clipped to zero and counted.
InteractionMatrix make_interaction_matrix(InteractionTag tag, const std::vector<double>& diagonal,
                                          const Matrix& pairs);

}  // namespace icegsa
