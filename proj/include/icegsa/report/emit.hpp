#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "icegsa/report/pipeline.hpp"

namespace icegsa::report {

/// Canonical JSON: sorted keys, shortest round-trip floats, NaN as null. Contains no
/// thread count, timing or host data, so equal configs give equal bytes.
std::string report_json(const SensitivityReport& report);

/// One row per feature, header first; missing values are empty cells.
std::string metrics_csv(const SensitivityReport& report);

/// Columns x_j, phi_j and a colouring feature (color_by, else the strongest SHAP
/// interaction partner), one row per SHAP evaluation point.
std::string shap_dependence_csv(const SensitivityReport& report, std::size_t feature);

std::string pdp_ice_svg(const SensitivityReport& report, std::size_t feature);
std::string importance_svg(const SensitivityReport& report);
std::string heatmap_svg(const SensitivityReport& report, const InteractionMatrix& matrix);
std::string rho_boxplot_svg(const SensitivityReport& report);

/// Writes the enabled outputs into `out`. Files are staged in a scratch directory and
/// renamed into place only after every file has been written; IoError otherwise.
/// Returns the final file names in write order.
std::vector<std::filesystem::path> emit_outputs(const SensitivityReport& report, const std::filesystem::path& out);

}  // namespace icegsa::report
