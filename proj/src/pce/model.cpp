#include "icegsa/pce/model.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "icegsa/error.hpp"
#include "icegsa/pce/lars.hpp"
#include "icegsa/textio.hpp"

namespace icegsa::pce {
namespace {

constexpr const char* kMagic = "icegsa-pce";
constexpr int kFormatVersion = 1;
// Orders whose normalized LOO improves on the incumbent by less than this are ties.
constexpr double kOrderTieTolerance = 1e-10;

std::vector<MultiIndex> supported_indices(const InputSpace& space, std::size_t p, double q) {
  auto all = hyperbolic_index_set(space.dimension(), p, q);
  std::vector<std::size_t> cap(space.dimension());
  for (std::size_t j = 0; j < space.dimension(); ++j) {
    cap[j] = OrthoPoly1D::for_marginal(space.marginal(j), p).max_degree();
  }
  std::vector<MultiIndex> out;
  for (auto& g : all) {
    bool ok = true;
    for (std::size_t j = 0; j < g.size(); ++j) ok = ok && g[j] <= cap[j];
    if (ok) out.push_back(std::move(g));
  }
  return out;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '%': out += "%25"; break;
      case ' ': out += "%20"; break;
      case '\t': out += "%09"; break;
      case '\n': out += "%0A"; break;
      case '\r': out += "%0D"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

}  // namespace

PceModel::PceModel(InputSpace space, std::vector<MultiIndex> indices, Vector beta,
                   PceDiagnostics diagnostics)
    : space_(std::move(space)),
      basis_(space_, std::move(indices)),
      beta_(std::move(beta)),
      diagnostics_(std::move(diagnostics)) {
  if (static_cast<std::size_t>(beta_.size()) != basis_.size()) {
    throw DimensionError("coefficient vector length does not match the basis size");
  }
  if (!beta_.allFinite()) throw FitError("model coefficients are not finite");
}

std::size_t PceModel::nonzeros() const {
  return static_cast<std::size_t>((beta_.array() != 0.0).count());
}

PceModel select_order(const InputSpace& space, const RowMatrix& x, const Vector& y, std::size_t p_max,
                      double q) {
  const std::size_t m = space.dimension();
  const auto n = static_cast<std::size_t>(x.rows());
  if (p_max < 1) throw ParameterError("p_max must be at least 1");
  if (!(q > 0.0) || q > 1.0) throw ParameterError("hyperbolic truncation q must lie in (0, 1]");
  if (static_cast<std::size_t>(x.cols()) != m) throw DimensionError("training inputs do not match the input space");
  if (static_cast<std::size_t>(y.size()) != n) throw DimensionError("training response length mismatch");
  if (n < m + 1) {
    throw ParameterError("need at least " + std::to_string(m + 1) + " training rows, got " + std::to_string(n));
  }
  if (!y.allFinite() || !x.allFinite()) throw InputError("training data contains non-finite values");

  const double y_mean = y.mean();
  const double y_sd = std::sqrt((y.array() - y_mean).square().sum() / static_cast<double>(n - 1));
  const Vector ys = y_sd > 0.0 ? Vector((y.array() - y_mean) / y_sd) : Vector(Vector::Zero(y.size()));

  PceDiagnostics diag;
  diag.q = q;
  diag.n_train = n;
  std::size_t best_p = 0;
  double best_loo = std::numeric_limits<double>::infinity();
  std::vector<MultiIndex> best_indices;
  Vector best_beta;
  double best_r2 = 0.0;

  for (std::size_t p = 1; p <= p_max; ++p) {
    OrderDiagnostics od;
    od.p = p;
    try {
      auto indices = supported_indices(space, p, q);
      od.basis_size = indices.size();
      BasisSet basis(space, indices);
      const Matrix f = basis.design(x);
      const LarsResult fit = fit_lars(f, ys);
      od.loo = fit.loo;
      od.r2 = fit.r2;
      od.nonzeros = static_cast<std::size_t>((fit.beta.array() != 0.0).count());
      od.status = "ok";
      if (fit.loo < best_loo - kOrderTieTolerance) {
        best_loo = fit.loo;
        best_p = p;
        best_indices = std::move(indices);
        best_beta = fit.beta * y_sd;
        best_beta[0] += y_mean;
        best_r2 = fit.r2;
      }
    } catch (const Error& e) {
      od.loo = std::numeric_limits<double>::quiet_NaN();
      od.r2 = std::numeric_limits<double>::quiet_NaN();
      od.status = e.what();
    }
    diag.per_order.push_back(std::move(od));
  }

  if (best_p == 0) {
    std::string detail;
    for (const auto& od : diag.per_order) detail += " [p=" + std::to_string(od.p) + ": " + od.status + "]";
    throw FitError("no polynomial order produced a usable fit:" + detail);
  }
  diag.p = best_p;
  diag.loo = best_loo;
  diag.r2 = best_r2;
  return PceModel(space, std::move(best_indices), std::move(best_beta), std::move(diag));
}

Vector predict(const PceModel& model, const RowMatrix& pts) {
  Vector out(pts.rows());
  model.basis().evaluate(pts, model.beta(), std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

Evaluator as_evaluator(const PceModel& model, std::string name) {
  auto shared = std::make_shared<const PceModel>(model);
  return Evaluator(std::move(name), model.space().dimension(),
                   [shared](const RowMatrix& pts, std::span<double> out) {
                     shared->basis().evaluate(pts, shared->beta(), out);
                   });
}

PceSobol pce_sobol(const PceModel& model) {
  const std::size_t m = model.space().dimension();
  const auto& idx = model.basis().indices();
  const Vector& beta = model.beta();
  PceSobol s;
  s.first.assign(m, 0.0);
  s.total.assign(m, 0.0);
  s.second = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  double d = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double b2 = beta[static_cast<Eigen::Index>(k)] * beta[static_cast<Eigen::Index>(k)];
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < m; ++j) {
      if (idx[k][j] > 0) support.push_back(j);
    }
    if (support.empty()) continue;
    d += b2;
    for (std::size_t j : support) s.total[j] += b2;
    if (support.size() == 1) s.first[support[0]] += b2;
    if (support.size() == 2) {
      s.second(static_cast<Eigen::Index>(support[0]), static_cast<Eigen::Index>(support[1])) += b2;
    }
  }
  if (!(d > 0.0)) throw DegenerateVarianceError("expansion has zero variance; Sobol' indices are undefined");
  for (std::size_t j = 0; j < m; ++j) {
    s.first[j] /= d;
    s.total[j] /= d;
  }
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(m); ++i) {
    for (Eigen::Index j = i + 1; j < static_cast<Eigen::Index>(m); ++j) {
      s.second(i, j) /= d;
      s.second(j, i) = s.second(i, j);
    }
  }
  s.variance = d;
  return s;
}

double r_squared(const Vector& truth, const Vector& fitted) {
  if (truth.size() != fitted.size() || truth.size() < 2) throw DimensionError("R^2 needs matching vectors of length >= 2");
  const double mean = truth.mean();
  const double sst = (truth.array() - mean).square().sum();
  if (!(sst > 0.0)) throw DegenerateVarianceError("R^2 is undefined for a constant reference");
  return 1.0 - (truth - fitted).squaredNorm() / sst;
}

std::string to_text(const PceModel& model) {
  std::ostringstream os;
  const auto& space = model.space();
  const auto& d = model.diagnostics();
  os << kMagic << ' ' << kFormatVersion << '\n';
  os << "inputs " << space.dimension() << '\n';
  for (const auto& mg : space.marginals()) {
    os << "input " << escape(mg.name()) << ' ' << to_string(mg.family());
    if (const auto* u = std::get_if<UniformParams>(&mg.params())) {
      os << ' ' << format_double(u->lo) << ' ' << format_double(u->hi);
    } else if (const auto* g = std::get_if<GaussianParams>(&mg.params())) {
      os << ' ' << format_double(g->mean) << ' ' << format_double(g->std);
    } else {
      const auto& e = std::get<EmpiricalParams>(mg.params());
      os << ' ' << e.sorted.size();
      for (double v : e.sorted) os << ' ' << format_double(v);
    }
    os << '\n';
  }
  os << "anchor";
  for (double a : space.anchor()) os << ' ' << format_double(a);
  os << '\n';
  os << "order " << d.p << '\n';
  os << "truncation_q " << format_double(d.q) << '\n';
  os << "train_r2 " << format_double(d.r2) << '\n';
  os << "loo " << format_double(d.loo) << '\n';
  os << "n_train " << d.n_train << '\n';
  os << "heldout_r2 " << format_double(d.heldout_r2) << '\n';
  os << "order_fits " << d.per_order.size() << '\n';
  for (const auto& od : d.per_order) {
    os << "order_fit " << od.p << ' ' << od.basis_size << ' ' << od.nonzeros << ' ' << format_double(od.loo)
       << ' ' << format_double(od.r2) << ' ' << escape(od.status) << '\n';
  }
  const auto& idx = model.basis().indices();
  os << "terms " << idx.size() << '\n';
  for (std::size_t k = 0; k < idx.size(); ++k) {
    os << "term " << format_double(model.beta()[static_cast<Eigen::Index>(k)]);
    for (unsigned g : idx[k]) os << ' ' << g;
    os << '\n';
  }
  os << "end\n";
  return os.str();
}

namespace {

class Reader {
 public:
  explicit Reader(const std::string& text) : in_(text) {}

  std::vector<std::string> line(const std::string& key) {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_no_;
      const auto t = trim(raw);
      if (t.empty()) continue;
      std::vector<std::string> tok;
      std::istringstream ls{std::string(t)};
      for (std::string w; ls >> w;) tok.push_back(w);
      if (tok[0] != key) fail("expected '" + key + "', found '" + tok[0] + "'");
      return tok;
    }
    fail("unexpected end of file, expected '" + key + "'");
  }

  double number(const std::string& s) {
    auto v = parse_double(s);
    if (!v) fail("invalid number '" + s + "'");
    return *v;
  }

  std::size_t count(const std::string& s) {
    auto v = parse_integer(s);
    if (!v || *v < 0) fail("invalid count '" + s + "'");
    return static_cast<std::size_t>(*v);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw IoError("model file line " + std::to_string(line_no_) + ": " + msg);
  }

  void expect_size(const std::vector<std::string>& tok, std::size_t n) const {
    if (tok.size() != n) fail("'" + tok[0] + "' expects " + std::to_string(n - 1) + " fields");
  }

 private:
  std::istringstream in_;
  std::size_t line_no_ = 0;
};

}  // namespace

PceModel from_text(const std::string& text) {
  Reader r(text);
  auto head = r.line(kMagic);
  r.expect_size(head, 2);
  if (r.count(head[1]) != kFormatVersion) r.fail("unsupported model format version " + head[1]);
  auto tok = r.line("inputs");
  r.expect_size(tok, 2);
  const std::size_t m = r.count(tok[1]);
  if (m == 0) r.fail("model has no inputs");
  std::vector<Marginal> marginals;
  try {
    for (std::size_t j = 0; j < m; ++j) {
      tok = r.line("input");
      if (tok.size() < 4) r.fail("incomplete input descriptor");
      const std::string name = unescape(tok[1]);
      if (tok[2] == "uniform") {
        r.expect_size(tok, 5);
        marginals.push_back(Marginal::uniform(name, r.number(tok[3]), r.number(tok[4])));
      } else if (tok[2] == "gaussian") {
        r.expect_size(tok, 5);
        marginals.push_back(Marginal::gaussian(name, r.number(tok[3]), r.number(tok[4])));
      } else if (tok[2] == "empirical") {
        const std::size_t cnt = r.count(tok[3]);
        r.expect_size(tok, 4 + cnt);
        std::vector<double> vals;
        for (std::size_t i = 0; i < cnt; ++i) vals.push_back(r.number(tok[4 + i]));
        marginals.push_back(Marginal::empirical(name, std::move(vals)));
      } else {
        r.fail("unknown family '" + tok[2] + "'");
      }
    }
  } catch (const ParameterError& e) {
    r.fail(e.what());
  }
  tok = r.line("anchor");
  r.expect_size(tok, m + 1);
  std::vector<double> anchor;
  for (std::size_t j = 0; j < m; ++j) anchor.push_back(r.number(tok[1 + j]));

  PceDiagnostics d;
  tok = r.line("order");
  r.expect_size(tok, 2);
  d.p = r.count(tok[1]);
  tok = r.line("truncation_q");
  r.expect_size(tok, 2);
  d.q = r.number(tok[1]);
  tok = r.line("train_r2");
  r.expect_size(tok, 2);
  d.r2 = r.number(tok[1]);
  tok = r.line("loo");
  r.expect_size(tok, 2);
  d.loo = r.number(tok[1]);
  tok = r.line("n_train");
  r.expect_size(tok, 2);
  d.n_train = r.count(tok[1]);
  tok = r.line("heldout_r2");
  r.expect_size(tok, 2);
  d.heldout_r2 = r.number(tok[1]);
  tok = r.line("order_fits");
  r.expect_size(tok, 2);
  const std::size_t n_fits = r.count(tok[1]);
  for (std::size_t i = 0; i < n_fits; ++i) {
    tok = r.line("order_fit");
    r.expect_size(tok, 7);
    d.per_order.push_back({r.count(tok[1]), r.count(tok[2]), r.count(tok[3]), r.number(tok[4]),
                           r.number(tok[5]), unescape(tok[6])});
  }
  tok = r.line("terms");
  r.expect_size(tok, 2);
  const std::size_t n_terms = r.count(tok[1]);
  std::vector<MultiIndex> indices;
  Vector beta(static_cast<Eigen::Index>(n_terms));
  for (std::size_t k = 0; k < n_terms; ++k) {
    tok = r.line("term");
    r.expect_size(tok, m + 2);
    beta[static_cast<Eigen::Index>(k)] = r.number(tok[1]);
    MultiIndex g(m);
    for (std::size_t j = 0; j < m; ++j) g[j] = static_cast<unsigned>(r.count(tok[2 + j]));
    indices.push_back(std::move(g));
  }
  r.line("end");
  try {
    return PceModel(InputSpace(std::move(marginals), std::move(anchor)), std::move(indices), std::move(beta),
                    std::move(d));
  } catch (const Error& e) {
    r.fail(e.what());
  }
}

void save_model(const PceModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << to_text(model);
  if (!out.flush()) throw IoError("failed writing '" + path.string() + "'");
}

PceModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

}  // namespace icegsa::pce
