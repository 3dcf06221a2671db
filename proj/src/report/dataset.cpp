#include "icegsa/report/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "icegsa/error.hpp"
#include "icegsa/report/config.hpp"
#include "icegsa/textio.hpp"

namespace icegsa::report {

LoadedData parse_csv(const std::string& text, const ColumnRoles& roles) {
  std::vector<std::string> lines;
  for (auto& l : split(text, '\n')) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
    lines.push_back(std::move(l));
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw IngestionError("CSV file is empty; a header row is required");

  std::vector<std::string> header;
  for (const auto& h : split(lines[0], ',')) header.emplace_back(trim(h));
  std::map<std::string, std::size_t> position;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) throw IngestionError("header column " + std::to_string(c + 1) + " has no name");
    if (!position.emplace(header[c], c).second) throw IngestionError("duplicate header '" + header[c] + "'");
  }

  auto column = [&](const std::string& name) {
    const auto it = position.find(name);
    if (it == position.end()) throw IngestionError("missing column '" + name + "'");
    return it->second;
  };
  if (roles.output.empty()) throw IngestionError("no output column given");
  const std::size_t out_col = column(roles.output);
  std::vector<std::string> inputs = roles.inputs;
  if (inputs.empty()) {
    for (const auto& h : header) {
      if (h != roles.output) inputs.push_back(h);
    }
  }
  std::vector<std::size_t> in_cols;
  for (const auto& name : inputs) {
    if (name == roles.output) throw IngestionError("column '" + name + "' cannot be both input and output");
    in_cols.push_back(column(name));
  }
  if (in_cols.empty()) throw IngestionError("no input columns");
  for (const auto& [name, _] : roles.declared_marginals) {
    if (std::find(inputs.begin(), inputs.end(), name) == inputs.end()) {
      throw IngestionError("marginal declared for '" + name + "', which is not an input column");
    }
  }

  const std::size_t m = in_cols.size();
  const std::size_t n = lines.size() - 1;
  if (n < m + 2) {
    throw IngestionError("need at least " + std::to_string(m + 2) + " data rows for " + std::to_string(m) +
                         " inputs, found " + std::to_string(n));
  }
  LoadedData out{Dataset{inputs, roles.output, RowMatrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)),
                         Vector(static_cast<Eigen::Index>(n))},
                 InputSpace({Marginal::uniform("placeholder", 0, 1)}),
                 {}};
  for (std::size_t r = 0; r < n; ++r) {
    const auto cells = split(lines[r + 1], ',');
    if (cells.size() != header.size()) {
      throw IngestionError("row " + std::to_string(r + 1) + " (line " + std::to_string(r + 2) + ") has " +
                           std::to_string(cells.size()) + " cells, expected " + std::to_string(header.size()));
    }
    auto cell = [&](std::size_t c) {
      const auto v = parse_double(cells[c]);
      if (!v || !std::isfinite(*v)) {
        const std::string shown(trim(cells[c]));
        throw IngestionError((shown.empty() ? std::string("blank cell") : "non-numeric value '" + shown + "'") +
                             " at row " + std::to_string(r + 1) + " (line " + std::to_string(r + 2) +
                             "), column '" + header[c] + "'");
      }
      return *v;
    };
    for (std::size_t j = 0; j < m; ++j) {
      out.data.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = cell(in_cols[j]);
    }
    out.data.y[static_cast<Eigen::Index>(r)] = cell(out_col);
  }

  std::vector<Marginal> marginals;
  for (std::size_t j = 0; j < m; ++j) {
    const auto decl = std::find_if(roles.declared_marginals.begin(), roles.declared_marginals.end(),
                                   [&](const auto& d) { return d.first == inputs[j]; });
    const auto col = out.data.x.col(static_cast<Eigen::Index>(j));
    if (decl == roles.declared_marginals.end()) {
      std::vector<double> values(col.begin(), col.end());
      try {
        marginals.push_back(Marginal::empirical(inputs[j], std::move(values)));
      } catch (const Error& e) {
        throw IngestionError("column '" + inputs[j] + "': " + e.what());
      }
      continue;
    }
    Marginal mg = parse_marginal(inputs[j], decl->second);
    std::size_t violations = 0;
    std::size_t first_row = 0;
    for (Eigen::Index r = 0; r < col.size(); ++r) {
      if (!mg.contains(col[r])) {
        if (violations++ == 0) first_row = static_cast<std::size_t>(r);
      }
    }
    if (violations > 0) {
      out.warnings.push_back("column '" + inputs[j] + "': " + std::to_string(violations) + " value(s) outside " +
                             mg.describe() + " (first at row " + std::to_string(first_row + 1) + ": " +
                             format_double(col[static_cast<Eigen::Index>(first_row)]) + ")");
    }
    marginals.push_back(std::move(mg));
  }
  out.space = InputSpace(std::move(marginals));
  return out;
}

LoadedData load_csv(const std::filesystem::path& path, const ColumnRoles& roles) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot read CSV file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), roles);
}

}  // namespace icegsa::report
