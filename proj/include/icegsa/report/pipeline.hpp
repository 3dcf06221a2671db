#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "icegsa/metrics.hpp"
#include "icegsa/pce/model.hpp"
#include "icegsa/pdp_ice.hpp"
#include "icegsa/report/config.hpp"
#include "icegsa/shapley.hpp"

namespace icegsa::report {

inline constexpr const char* kSchemaVersion = "1.0.0";
inline constexpr const char* kToolVersion = "0.1.0";

struct DatasetInfo {
  std::string path;
  std::string output;
  std::vector<std::string> inputs;
  std::size_t rows = 0;
  std::size_t train_rows = 0;
  std::size_t holdout_rows = 0;
};

struct SensitivityReport {
  RunConfig config;
  InputSpace space;
  std::string model;  // builtin name or "pce"
  std::optional<DatasetInfo> dataset;
  std::optional<pce::PceModel> surrogate;

  std::vector<FeatureSensitivity> features;
  std::vector<IceEnsemble> ensembles;  // anchored at the space's anchor (clamped to the grid)
  std::vector<IceCorrelations> correlations;
  std::vector<JointPdp> joint;  // upper-triangle pairs in (i, j) order
  SobolIndices sobol;
  std::optional<ShapSummary> shap;  // absent above kMaxShapFeatures
  InteractionMatrix pdp_interactions;
  InteractionMatrix sobol_interactions;
  std::optional<InteractionMatrix> shap_interactions;  // absent above kMaxShapInteractionFeatures
  std::vector<std::string> warnings;
};

/// Validates the config, then runs every metric stage in sequence. Throws the first
/// structured error; nothing partial is returned.
SensitivityReport run_pipeline(const RunConfig& config);

/// PCE fit used by CSV sources and by builtins with use_surrogate. Held-out R^2 is
/// NaN when there is no hold-out set.
struct SurrogateFit {
  pce::PceModel model;
  DatasetInfo split;
};
SurrogateFit fit_csv_surrogate(const RunConfig& config, std::vector<std::string>& warnings, InputSpace& space);
pce::PceModel fit_builtin_surrogate(const RunConfig& config, const Evaluator& truth, const InputSpace& space);

}  // namespace icegsa::report
