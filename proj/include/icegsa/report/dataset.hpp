#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "icegsa/marginal.hpp"
#include "icegsa/types.hpp"

namespace icegsa::report {

struct ColumnRoles {
  std::string output;
  std::vector<std::string> inputs;  // empty: every other column, in file order
  std::vector<std::pair<std::string, std::string>> declared_marginals;
};

struct Dataset {
  std::vector<std::string> input_names;
  std::string output_name;
  RowMatrix x;
  Vector y;
};

struct LoadedData {
  Dataset data;
  InputSpace space;
  std::vector<std::string> warnings;  // declared-support violations
};

/// Comma-separated file with one header row. Undeclared inputs get empirical
/// marginals. IngestionError names the row and column of the first bad cell.
LoadedData load_csv(const std::filesystem::path& path, const ColumnRoles& roles);
LoadedData parse_csv(const std::string& text, const ColumnRoles& roles);

}  // namespace icegsa::report
