#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "icegsa/marginal.hpp"
#include "icegsa/sampling.hpp"

namespace icegsa::report {

struct EmitFlags {
  bool json = true;
  bool csv = true;
  bool svg = true;
};

/// One analysis run. Text form is `key = value` lines with `#` comments; see
/// set_option for the accepted keys.
struct RunConfig {
  // Source: exactly one of builtin or csv.
  std::optional<std::string> builtin;
  std::optional<std::filesystem::path> csv;
  std::string output_column;
  std::vector<std::string> input_columns;  // empty: every column except the output
  std::vector<std::pair<std::string, std::string>> marginals;  // declared, "uniform(0, 1)" etc.

  // Surrogate. CSV sources always use one; builtins only on request.
  std::optional<bool> use_surrogate;
  std::size_t p_max = 5;
  double q = 1.0;
  double train_fraction = 0.8;
  std::size_t n_train = 2000;   // builtin surrogate training draws
  std::size_t n_holdout = 500;  // builtin surrogate held-out draws

  // Metrics.
  std::size_t grid_points = 50;
  GridScheme grid_scheme = GridScheme::quantile;
  std::size_t joint_grid_points = 25;
  GridScheme joint_grid_scheme = GridScheme::equispaced;
  std::size_t n_mc = 10000;
  std::size_t n_base = 100000;
  std::size_t n_pts = 10000;
  std::size_t n_bg = 1000;
  std::optional<std::uint64_t> seed;

  // Output.
  std::filesystem::path out = "icegsa-out";
  EmitFlags emit;
  std::size_t curve_export_limit = 1000;
  std::string color_by;

  bool surrogate_enabled() const { return csv.has_value() || use_surrogate.value_or(false); }
};

/// Applies one key; ConfigError for unknown keys or malformed values. Relative paths
/// are resolved against base_dir.
void set_option(RunConfig& config, std::string_view key, std::string_view value,
                const std::filesystem::path& base_dir = {});

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Exactly one source, a seed, train_fraction in (0, 1], sizes within estimator limits.
void validate(const RunConfig& config);

/// "uniform(lo, hi)" | "gaussian(mean, std)"; empirical marginals come from data.
Marginal parse_marginal(const std::string& name, std::string_view text);

}  // namespace icegsa::report
