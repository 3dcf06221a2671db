#include "icegsa/report/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "icegsa/error.hpp"
#include "icegsa/textio.hpp"

namespace icegsa::report {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json mat(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
    a.push_back(std::move(row));
  }
  return a;
}

json interaction(const InteractionMatrix& im) {
  return {{"tag", to_string(im.tag)}, {"values", mat(im.values)}, {"clipped", im.clipped}};
}

json run_section(const SensitivityReport& r) {
  const RunConfig& c = r.config;
  json source;
  if (c.builtin) {
    source = {{"kind", "builtin"}, {"name", *c.builtin}};
  } else {
    source = {{"kind", "csv"}, {"path", c.csv->string()}, {"output", c.output_column}};
  }
  json declared = json::object();
  for (const auto& [name, text] : c.marginals) declared[name] = text;
  return {
      {"seed", *c.seed},
      {"source", source},
      {"model", r.model},
      {"declared_marginals", declared},
      {"surrogate", {{"enabled", c.surrogate_enabled()},
                     {"p_max", c.p_max},
                     {"q", c.q},
                     {"train_fraction", c.train_fraction},
                     {"n_train", c.n_train},
                     {"n_holdout", c.n_holdout}}},
      {"metrics", {{"grid_points", c.grid_points},
                   {"grid_scheme", to_string(c.grid_scheme)},
                   {"joint_grid_points", c.joint_grid_points},
                   {"joint_grid_scheme", to_string(c.joint_grid_scheme)},
                   {"n_mc", c.n_mc},
                   {"n_base", c.n_base},
                   {"n_pts", c.n_pts},
                   {"n_bg", c.n_bg}}},
  };
}

json feature_json(const FeatureSensitivity& f, const IceEnsemble& ens) {
  const auto& b = f.rho_box;
  return {
      {"name", f.name},
      {"index", f.feature},
      {"i_pdp", num(f.i_pdp)},
      {"mu_ice", num(f.mu_ice)},
      {"sigma_ice", num(f.sigma_ice)},
      {"sigma_rho", num(f.sigma_rho)},
      {"rho_excluded", f.rho_excluded},
      {"rho_box", {{"q1", num(b.q1)},
                   {"median", num(b.q2)},
                   {"q3", num(b.q3)},
                   {"lower_whisker", num(b.lower_whisker)},
                   {"upper_whisker", num(b.upper_whisker)},
                   {"outliers", vec(b.outliers)}}},
      {"s_first", num(f.s_first)},
      {"s_total", num(f.s_total)},
      {"sh_bar", num(f.sh_bar)},
      {"sh_bar_anchor", num(f.sh_bar_anchor)},
      {"grid", vec(ens.grid.values)},
      {"pdp", vec(ens.pdp)},
      {"anchor", num(ens.anchor_value)},
      {"pdp_offset", num(ens.pdp_offset)},
  };
}

json surrogate_json(const pce::PceModel& model) {
  const auto& d = model.diagnostics();
  json orders = json::array();
  for (const auto& o : d.per_order) {
    orders.push_back({{"p", o.p},
                      {"basis_size", o.basis_size},
                      {"nonzeros", o.nonzeros},
                      {"loo", num(o.loo)},
                      {"r2", num(o.r2)},
                      {"status", o.status}});
  }
  const pce::PceSobol s = pce::pce_sobol(model);
  return {{"p", d.p},
          {"q", d.q},
          {"r2", num(d.r2)},
          {"loo", num(d.loo)},
          {"n_train", d.n_train},
          {"heldout_r2", num(d.heldout_r2)},
          {"basis_size", model.basis().size()},
          {"nonzeros", model.nonzeros()},
          {"per_order", orders},
          {"sobol", {{"first", vec(s.first)}, {"total", vec(s.total)}, {"variance", num(s.variance)}}}};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string file_stem(const std::string& name) {
  std::string out;
  for (char ch : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.';
    out += ok ? ch : '_';
  }
  return out.empty() ? "feature" : out;
}

// Blue to red ramp for t in [0, 1].
std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(40 + 200 * t), 70,
                static_cast<int>(220 - 180 * t));
  return buf;
}

std::string heat(double t) {
  t = std::clamp(t, 0.0, 1.0);
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(255 - 225 * t), static_cast<int>(255 - 185 * t),
                static_cast<int>(255 - 75 * t));
  return buf;
}

struct Canvas {
  double w = 640, h = 420, left = 70, right = 20, top = 40, bottom = 60;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  std::ostringstream s;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (w - left - right); }
  double py(double y) const { return h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom); }

  void open(const std::string& title) {
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
      << "\" viewBox=\"0 0 " << fmt(w) << ' ' << fmt(h) << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << fmt(w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
      << "</text>\n";
  }
  void axes(const std::string& xlabel, const std::string& ylabel, bool numeric_x = true) {
    s << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(h - bottom) << "\" x2=\"" << fmt(w - right) << "\" y2=\""
      << fmt(h - bottom) << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left) << "\" y2=\""
      << fmt(h - bottom) << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double y = y0 + (y1 - y0) * t / 4.0;
      s << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(py(y) + 4) << "\" text-anchor=\"end\">" << short_num(y)
        << "</text>\n";
      if (numeric_x) {
        const double x = x0 + (x1 - x0) * t / 4.0;
        s << "<text x=\"" << fmt(px(x)) << "\" y=\"" << fmt(h - bottom + 16) << "\" text-anchor=\"middle\">"
          << short_num(x) << "</text>\n";
      }
    }
    s << "<text x=\"" << fmt((left + w - right) / 2) << "\" y=\"" << fmt(h - 14) << "\" text-anchor=\"middle\">"
      << escape_xml(xlabel) << "</text>\n"
      << "<text x=\"16\" y=\"" << fmt((top + h - bottom) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fmt((top + h - bottom) / 2) << ")\">" << escape_xml(ylabel) << "</text>\n";
  }
  std::string close() {
    s << "</svg>\n";
    return s.str();
  }
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

std::string report_json(const SensitivityReport& r) {
  json features = json::array();
  for (std::size_t j = 0; j < r.features.size(); ++j) features.push_back(feature_json(r.features[j], r.ensembles[j]));

  json space = json::array();
  for (std::size_t j = 0; j < r.space.dimension(); ++j) {
    const Marginal& mg = r.space.marginal(j);
    space.push_back({{"name", mg.name()},
                     {"family", to_string(mg.family())},
                     {"description", mg.describe()},
                     {"mean", num(mg.mean())},
                     {"std", num(mg.stddev())},
                     {"anchor", num(r.space.anchor()[j])}});
  }

  json interactions = {{"pdp", interaction(r.pdp_interactions)}, {"sobol2", interaction(r.sobol_interactions)}};
  interactions["shap"] = r.shap_interactions ? interaction(*r.shap_interactions) : json(nullptr);

  json shap = nullptr;
  if (r.shap) {
    shap = {{"phi0", num(r.shap->phi0)},
            {"max_efficiency_error", num(r.shap->max_efficiency_error)},
            {"mean_abs_phi", vec(r.shap->mean_abs_phi)},
            {"mean_abs_phi_anchor", vec(r.shap->mean_abs_phi_anchor)}};
  }

  json dataset = nullptr;
  if (r.dataset) {
    dataset = {{"path", r.dataset->path},
               {"output", r.dataset->output},
               {"inputs", r.dataset->inputs},
               {"rows", r.dataset->rows},
               {"train_rows", r.dataset->train_rows},
               {"holdout_rows", r.dataset->holdout_rows}};
  }

  const json doc = {
      {"schema_version", kSchemaVersion},
      {"tool", {{"name", "icegsa"}, {"version", kToolVersion}}},
      {"run", run_section(r)},
      {"input_space", space},
      {"features", features},
      {"interactions", interactions},
      {"sobol", {{"first", vec(r.sobol.first)},
                 {"total", vec(r.sobol.total)},
                 {"second", mat(r.sobol.second)},
                 {"variance", num(r.sobol.variance)},
                 {"n_base", r.sobol.n_base},
                 {"evaluations", r.sobol.evaluations},
                 {"out_of_range", r.sobol.out_of_range}}},
      {"shap", shap},
      {"surrogate", r.surrogate ? surrogate_json(*r.surrogate) : json(nullptr)},
      {"dataset", dataset},
      {"warnings", r.warnings},
  };
  return doc.dump(2) + "\n";
}

std::string metrics_csv(const SensitivityReport& r) {
  auto cell = [](double v) { return std::isfinite(v) ? format_double(v) : std::string(); };
  std::ostringstream s;
  s << "feature,i_pdp,mu_ice,sigma_ice,sigma_rho,rho_excluded,s_first,s_total,sh_bar,sh_bar_anchor\n";
  for (const auto& f : r.features) {
    s << f.name << ',' << cell(f.i_pdp) << ',' << cell(f.mu_ice) << ',' << cell(f.sigma_ice) << ','
      << cell(f.sigma_rho) << ',' << f.rho_excluded << ',' << cell(f.s_first) << ',' << cell(f.s_total) << ','
      << cell(f.sh_bar) << ',' << cell(f.sh_bar_anchor) << '\n';
  }
  return s.str();
}

std::string shap_dependence_csv(const SensitivityReport& r, std::size_t feature) {
  if (!r.shap) throw ParameterError("no SHAP values in this report");
  const auto names = r.space.names();
  const auto m = names.size();
  // Colour column: the configured feature, else the strongest SHAP interaction partner.
  std::size_t color = feature == 0 && m > 1 ? 1 : 0;
  const auto it = std::find(names.begin(), names.end(), r.config.color_by);
  if (it != names.end() && static_cast<std::size_t>(it - names.begin()) != feature) {
    color = static_cast<std::size_t>(it - names.begin());
  } else if (r.shap_interactions) {
    double best = -1.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double v = r.shap_interactions->values(static_cast<Eigen::Index>(feature), static_cast<Eigen::Index>(k));
      if (k != feature && v > best) {
        best = v;
        color = k;
      }
    }
  }
  const auto j = static_cast<Eigen::Index>(feature);
  const auto c = static_cast<Eigen::Index>(color);
  std::ostringstream s;
  s << names[feature] << ",phi_" << names[feature] << ',' << names[color] << '\n';
  for (Eigen::Index i = 0; i < r.shap->points.rows(); ++i) {
    s << format_double(r.shap->points(i, j)) << ',' << format_double(r.shap->phi(i, j)) << ','
      << format_double(r.shap->points(i, c)) << '\n';
  }
  return s.str();
}

std::string pdp_ice_svg(const SensitivityReport& r, std::size_t feature) {
  const IceEnsemble& ens = r.ensembles.at(feature);
  const RowMatrix curves = ens.anchored_curves();
  const auto pdp = ens.anchored_pdp();
  const std::size_t shown = std::min<std::size_t>({ens.n_mc(), r.config.curve_export_limit, 300});

  Canvas c;
  c.x0 = ens.grid.values.front();
  c.x1 = ens.grid.values.back();
  double lo = *std::min_element(pdp.begin(), pdp.end());
  double hi = *std::max_element(pdp.begin(), pdp.end());
  for (std::size_t i = 0; i < shown; ++i) {
    lo = std::min(lo, curves.row(static_cast<Eigen::Index>(i)).minCoeff());
    hi = std::max(hi, curves.row(static_cast<Eigen::Index>(i)).maxCoeff());
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  c.y0 = lo;
  c.y1 = hi;
  const std::string name = r.features[feature].name;
  c.open("Anchored PDP and ICE: " + name);
  c.axes(name, "f - f(anchor)");

  // Optional colouring by another feature's instance value.
  std::optional<Eigen::Index> color_col;
  double cmin = 0, cmax = 1;
  if (!r.config.color_by.empty()) {
    const auto names = r.space.names();
    const auto it = std::find(names.begin(), names.end(), r.config.color_by);
    if (it != names.end()) {
      const auto k = static_cast<std::size_t>(it - names.begin());
      if (k != feature) {
        color_col = static_cast<Eigen::Index>(k < feature ? k : k - 1);
        cmin = ens.instances.col(*color_col).minCoeff();
        cmax = ens.instances.col(*color_col).maxCoeff();
      }
    }
  }
  for (std::size_t i = 0; i < shown; ++i) {
    std::string stroke = "#9aa4b0";
    if (color_col) {
      const double v = ens.instances(static_cast<Eigen::Index>(i), *color_col);
      stroke = ramp(cmax > cmin ? (v - cmin) / (cmax - cmin) : 0.5);
    }
    c.s << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-opacity=\"0.35\" stroke-width=\"0.8\" points=\"";
    for (std::size_t k = 0; k < ens.k(); ++k) {
      c.s << fmt(c.px(ens.grid.values[k])) << ',' << fmt(c.py(curves(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)))) << ' ';
    }
    c.s << "\"/>\n";
  }
  c.s << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2.5\" points=\"";
  for (std::size_t k = 0; k < ens.k(); ++k) c.s << fmt(c.px(ens.grid.values[k])) << ',' << fmt(c.py(pdp[k])) << ' ';
  c.s << "\"/>\n";
  if (color_col) {
    c.s << "<text x=\"" << fmt(c.w - c.right) << "\" y=\"36\" text-anchor=\"end\">colour: " << escape_xml(r.config.color_by)
        << " (blue low, red high)</text>\n";
  }
  return c.close();
}

std::string importance_svg(const SensitivityReport& r) {
  const std::size_t m = r.features.size();
  const bool shap = r.shap.has_value();
  double hi = 0.0;
  for (const auto& f : r.features) {
    hi = std::max({hi, f.i_pdp, f.mu_ice + f.sigma_ice, shap ? f.sh_bar : 0.0});
  }
  if (hi <= 0) hi = 1;
  Canvas c;
  c.w = std::max(480.0, 110.0 * static_cast<double>(m) + 120);
  c.x0 = 0;
  c.x1 = static_cast<double>(m);
  c.y0 = 0;
  c.y1 = hi * 1.1;
  c.open("Feature importance");
  c.axes("feature", "importance", false);
  const char* colors[] = {"#4c72b0", "#dd8452", "#55a868"};
  const std::size_t bars = shap ? 3 : 2;
  const double slot = (c.px(1) - c.px(0)) * 0.8 / static_cast<double>(bars);
  for (std::size_t j = 0; j < m; ++j) {
    const auto& f = r.features[j];
    const double vals[] = {f.i_pdp, f.mu_ice, f.sh_bar};
    const double base = c.px(static_cast<double>(j)) + (c.px(1) - c.px(0)) * 0.1;
    for (std::size_t b = 0; b < bars; ++b) {
      const double x = base + slot * static_cast<double>(b);
      c.s << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(c.py(vals[b])) << "\" width=\"" << fmt(slot * 0.9)
          << "\" height=\"" << fmt(c.py(0) - c.py(vals[b])) << "\" fill=\"" << colors[b] << "\"/>\n";
    }
    // sigma_ice error bar on the mu_ice bar.
    const double xm = base + slot * 1.45;
    c.s << "<line x1=\"" << fmt(xm) << "\" y1=\"" << fmt(c.py(std::max(0.0, f.mu_ice - f.sigma_ice))) << "\" x2=\""
        << fmt(xm) << "\" y2=\"" << fmt(c.py(f.mu_ice + f.sigma_ice)) << "\" stroke=\"black\"/>\n";
    c.s << "<text x=\"" << fmt(c.px(static_cast<double>(j) + 0.5)) << "\" y=\"" << fmt(c.h - c.bottom + 16)
        << "\" text-anchor=\"middle\">" << escape_xml(f.name) << "</text>\n";
  }
  const char* labels[] = {"I_pdp", "mu_ice (bar: sigma_ice)", "mean |SHAP|"};
  for (std::size_t b = 0; b < bars; ++b) {
    const double y = c.top + 4 + 16 * static_cast<double>(b);
    c.s << "<rect x=\"" << fmt(c.w - 200) << "\" y=\"" << fmt(y) << "\" width=\"10\" height=\"10\" fill=\"" << colors[b]
        << "\"/><text x=\"" << fmt(c.w - 185) << "\" y=\"" << fmt(y + 9) << "\">" << labels[b] << "</text>\n";
  }
  return c.close();
}

std::string heatmap_svg(const SensitivityReport& r, const InteractionMatrix& im) {
  const auto m = static_cast<std::size_t>(im.values.rows());
  const double cell = std::clamp(360.0 / static_cast<double>(std::max<std::size_t>(m, 1)), 24.0, 90.0);
  const double left = 90, top = 50;
  const double side = cell * static_cast<double>(m);
  double hi = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) hi = std::max(hi, im.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
  Canvas c;
  c.w = left + side + 30;
  c.h = top + side + 30;
  c.open(std::string("Pairwise interactions (") + to_string(im.tag) + ")");
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double v = im.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const double x = left + cell * static_cast<double>(j);
      const double y = top + cell * static_cast<double>(i);
      const std::string fill = i == j ? "#e6e6e6" : heat(hi > 0 ? v / hi : 0.0);
      c.s << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(cell) << "\" height=\"" << fmt(cell)
          << "\" fill=\"" << fill << "\" stroke=\"white\"/>\n";
      if (cell >= 30) {
        c.s << "<text x=\"" << fmt(x + cell / 2) << "\" y=\"" << fmt(y + cell / 2 + 4) << "\" text-anchor=\"middle\" font-size=\"10\">"
            << short_num(v) << "</text>\n";
      }
    }
    const std::string name = escape_xml(r.features[i].name);
    c.s << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(top + cell * (static_cast<double>(i) + 0.5) + 4)
        << "\" text-anchor=\"end\">" << name << "</text>\n";
    c.s << "<text x=\"" << fmt(left + cell * (static_cast<double>(i) + 0.5)) << "\" y=\"" << fmt(top + side + 16)
        << "\" text-anchor=\"middle\">" << name << "</text>\n";
  }
  return c.close();
}

std::string rho_boxplot_svg(const SensitivityReport& r) {
  const std::size_t m = r.features.size();
  Canvas c;
  c.w = std::max(420.0, 90.0 * static_cast<double>(m) + 120);
  c.x0 = 0;
  c.x1 = static_cast<double>(m);
  c.y0 = -1;
  c.y1 = 1;
  c.open("Correlation of ICE curves with the PDP");
  c.axes("feature", "rho", false);
  for (std::size_t j = 0; j < m; ++j) {
    const auto& f = r.features[j];
    const auto& b = f.rho_box;
    const double xc = c.px(static_cast<double>(j) + 0.5);
    const double half = (c.px(1) - c.px(0)) * 0.25;
    c.s << "<text x=\"" << fmt(xc) << "\" y=\"" << fmt(c.h - c.bottom + 16) << "\" text-anchor=\"middle\">"
        << escape_xml(f.name) << "</text>\n";
    if (r.correlations[j].pdp_flat || r.correlations[j].excluded == r.ensembles[j].n_mc()) continue;
    c.s << "<line x1=\"" << fmt(xc) << "\" y1=\"" << fmt(c.py(b.lower_whisker)) << "\" x2=\"" << fmt(xc) << "\" y2=\""
        << fmt(c.py(b.upper_whisker)) << "\" stroke=\"black\"/>\n"
        << "<rect x=\"" << fmt(xc - half) << "\" y=\"" << fmt(c.py(b.q3)) << "\" width=\"" << fmt(2 * half)
        << "\" height=\"" << fmt(std::max(0.5, c.py(b.q1) - c.py(b.q3))) << "\" fill=\"#a1c4e8\" stroke=\"black\"/>\n"
        << "<line x1=\"" << fmt(xc - half) << "\" y1=\"" << fmt(c.py(b.q2)) << "\" x2=\"" << fmt(xc + half)
        << "\" y2=\"" << fmt(c.py(b.q2)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    const std::size_t shown = std::min<std::size_t>(b.outliers.size(), 500);
    for (std::size_t k = 0; k < shown; ++k) {
      c.s << "<circle cx=\"" << fmt(xc) << "\" cy=\"" << fmt(c.py(b.outliers[k])) << "\" r=\"1.5\" fill=\"none\" stroke=\"#555\"/>\n";
    }
  }
  return c.close();
}

std::vector<fs::path> emit_outputs(const SensitivityReport& r, const fs::path& out) {
  std::vector<std::pair<std::string, std::string>> files;
  const EmitFlags& e = r.config.emit;
  if (e.json) files.emplace_back("report.json", report_json(r));
  if (e.csv) {
    files.emplace_back("metrics.csv", metrics_csv(r));
    for (std::size_t j = 0; j < r.ensembles.size(); ++j) {
      std::ostringstream s;
      write_curves_csv(s, r.ensembles[j], r.config.curve_export_limit);
      files.emplace_back("curves_" + file_stem(r.features[j].name) + ".csv", s.str());
      if (r.shap) {
        files.emplace_back("shap_dependence_" + file_stem(r.features[j].name) + ".csv", shap_dependence_csv(r, j));
      }
    }
  }
  if (e.svg) {
    for (std::size_t j = 0; j < r.ensembles.size(); ++j) {
      files.emplace_back("pdp_ice_" + file_stem(r.features[j].name) + ".svg", pdp_ice_svg(r, j));
    }
    files.emplace_back("importance.svg", importance_svg(r));
    files.emplace_back("heatmap_pdp.svg", heatmap_svg(r, r.pdp_interactions));
    files.emplace_back("heatmap_sobol2.svg", heatmap_svg(r, r.sobol_interactions));
    if (r.shap_interactions) files.emplace_back("heatmap_shap.svg", heatmap_svg(r, *r.shap_interactions));
    files.emplace_back("rho_boxplot.svg", rho_boxplot_svg(r));
  }

  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw IoError("cannot create output directory '" + out.string() + "'");
  const fs::path staging = out / ".icegsa-staging";
  fs::remove_all(staging, ec);
  fs::create_directory(staging, ec);
  if (ec) throw IoError("cannot write into output directory '" + out.string() + "': " + ec.message());
  try {
    for (const auto& [name, content] : files) write_file(staging / name, content);
    for (const auto& [name, _] : files) {
      fs::rename(staging / name, out / name, ec);
      if (ec) throw IoError("cannot move '" + name + "' into '" + out.string() + "': " + ec.message());
    }
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
  fs::remove_all(staging, ec);
  std::vector<fs::path> written;
  for (const auto& [name, _] : files) written.push_back(out / name);
  return written;
}

}  // namespace icegsa::report
