#include "icegsa/report/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "icegsa/error.hpp"
#include "icegsa/textio.hpp"

namespace icegsa::report {
namespace {

std::size_t as_count(std::string_view key, std::string_view value) {
  const auto v = parse_integer(value);
  if (!v || *v < 0) throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + std::string(value) + "'");
  return static_cast<std::size_t>(*v);
}

double as_number(std::string_view key, std::string_view value) {
  const auto v = parse_double(value);
  if (!v || !std::isfinite(*v)) throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(value) + "'");
  return *v;
}

bool as_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(value) + "'");
}

GridScheme as_scheme(std::string_view key, std::string_view value) {
  try {
    return grid_scheme_from_string(std::string(value));
  } catch (const Error&) {
    throw ConfigError(std::string(key) + ": expected quantile or equispaced, got '" + std::string(value) + "'");
  }
}

std::vector<std::string> as_list(std::string_view value) {
  std::vector<std::string> out;
  for (const auto& part : split(value, ',')) {
    const auto t = trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::filesystem::path as_path(std::string_view value, const std::filesystem::path& base_dir) {
  std::filesystem::path p{std::string(value)};
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return p;
}

}  // namespace

Marginal parse_marginal(const std::string& name, std::string_view text) {
  const auto t = trim(text);
  const auto open = t.find('(');
  if (open == std::string_view::npos || t.back() != ')') {
    throw ConfigError("marginal for '" + name + "': expected family(a, b), got '" + std::string(t) + "'");
  }
  const auto family = trim(t.substr(0, open));
  const auto args = split(t.substr(open + 1, t.size() - open - 2), ',');
  if (args.size() != 2) throw ConfigError("marginal for '" + name + "': expected two parameters");
  const auto a = parse_double(args[0]);
  const auto b = parse_double(args[1]);
  if (!a || !b) throw ConfigError("marginal for '" + name + "': parameters must be numbers");
  try {
    if (family == "uniform") return Marginal::uniform(name, *a, *b);
    if (family == "gaussian" || family == "normal") return Marginal::gaussian(name, *a, *b);
  } catch (const Error& e) {
    throw ConfigError("marginal for '" + name + "': " + e.what());
  }
  throw ConfigError("marginal for '" + name + "': unknown family '" + std::string(family) + "'");
}

void set_option(RunConfig& c, std::string_view key, std::string_view value, const std::filesystem::path& base_dir) {
  const std::string k(key);
  if (k == "builtin") {
    c.builtin = std::string(value);
  } else if (k == "csv") {
    c.csv = as_path(value, base_dir);
  } else if (k == "output") {
    c.output_column = std::string(value);
  } else if (k == "inputs") {
    c.input_columns = as_list(value);
  } else if (k.starts_with("marginal.")) {
    const std::string name = k.substr(9);
    if (name.empty()) throw ConfigError("marginal key needs a column name (marginal.<name>)");
    parse_marginal(name, value);
    c.marginals.emplace_back(name, std::string(value));
  } else if (k == "use_surrogate") {
    c.use_surrogate = as_bool(key, value);
  } else if (k == "p_max") {
    c.p_max = as_count(key, value);
  } else if (k == "q") {
    c.q = as_number(key, value);
  } else if (k == "train_fraction") {
    c.train_fraction = as_number(key, value);
  } else if (k == "n_train") {
    c.n_train = as_count(key, value);
  } else if (k == "n_holdout") {
    c.n_holdout = as_count(key, value);
  } else if (k == "grid_points") {
    c.grid_points = as_count(key, value);
  } else if (k == "grid_scheme") {
    c.grid_scheme = as_scheme(key, value);
  } else if (k == "joint_grid_points") {
    c.joint_grid_points = as_count(key, value);
  } else if (k == "joint_grid_scheme") {
    c.joint_grid_scheme = as_scheme(key, value);
  } else if (k == "n_mc") {
    c.n_mc = as_count(key, value);
  } else if (k == "n_base") {
    c.n_base = as_count(key, value);
  } else if (k == "n_pts") {
    c.n_pts = as_count(key, value);
  } else if (k == "n_bg") {
    c.n_bg = as_count(key, value);
  } else if (k == "seed") {
    c.seed = as_count(key, value);
  } else if (k == "out") {
    c.out = as_path(value, base_dir);
  } else if (k == "emit") {
    c.emit = {false, false, false};
    for (const auto& item : as_list(value)) {
      if (item == "json") {
        c.emit.json = true;
      } else if (item == "csv") {
        c.emit.csv = true;
      } else if (item == "svg") {
        c.emit.svg = true;
      } else {
        throw ConfigError("emit: unknown output kind '" + item + "' (json, csv, svg)");
      }
    }
  } else if (k == "curve_export_limit") {
    c.curve_export_limit = as_count(key, value);
  } else if (k == "color_by") {
    c.color_by = std::string(value);
  } else {
    throw ConfigError("unknown configuration key '" + k + "'");
  }
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  RunConfig c;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    try {
      set_option(c, key, value, base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read configuration file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

void validate(const RunConfig& c) {
  if (c.builtin.has_value() == c.csv.has_value()) {
    throw ConfigError("exactly one source is required: set either 'builtin' or 'csv'");
  }
  if (!c.seed) throw ConfigError("'seed' is mandatory");
  if (c.csv && c.output_column.empty()) throw ConfigError("CSV sources need 'output' (the response column)");
  if (c.csv && c.use_surrogate == false) {
    throw ConfigError("CSV sources are analyzed through a fitted surrogate; use_surrogate cannot be false");
  }
  if (c.builtin && (!c.output_column.empty() || !c.input_columns.empty() || !c.marginals.empty())) {
    throw ConfigError("column and marginal settings apply only to CSV sources");
  }
  if (!(c.train_fraction > 0.0 && c.train_fraction <= 1.0)) throw ConfigError("train_fraction must lie in (0, 1]");
  if (c.p_max < 1) throw ConfigError("p_max must be at least 1");
  if (c.q <= 0.0 || c.q > 1.0) throw ConfigError("q must lie in (0, 1]");
  if (c.grid_points < 3) throw ConfigError("grid_points must be at least 3");
  if (c.joint_grid_points < 2) throw ConfigError("joint_grid_points must be at least 2");
  if (c.n_mc < 2) throw ConfigError("n_mc must be at least 2");
  if (c.n_base < 100) throw ConfigError("n_base must be at least 100");
  if (c.n_pts < 1 || c.n_bg < 1) throw ConfigError("n_pts and n_bg must be positive");
  if (c.surrogate_enabled() && c.builtin && (c.n_train < 2 || c.n_holdout < 2)) {
    throw ConfigError("n_train and n_holdout must be at least 2");
  }
}

}  // namespace icegsa::report
