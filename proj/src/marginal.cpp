#include "icegsa/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "icegsa/error.hpp"
#include "icegsa/textio.hpp"

namespace icegsa {

const char* to_string(Family family) {
  switch (family) {
    case Family::uniform:
      return "uniform";
    case Family::gaussian:
      return "gaussian";
    case Family::empirical:
      return "empirical";
  }
  return "unknown";
}

Marginal Marginal::uniform(std::string name, double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw ParameterError("uniform marginal '" + name + "' requires finite lo < hi");
  }
  return Marginal(std::move(name), UniformParams{lo, hi});
}

Marginal Marginal::gaussian(std::string name, double mean, double std) {
  if (!std::isfinite(mean) || !std::isfinite(std) || !(std > 0.0)) {
    throw ParameterError("gaussian marginal '" + name + "' requires finite mean and std > 0");
  }
  return Marginal(std::move(name), GaussianParams{mean, std});
}

Marginal Marginal::empirical(std::string name, std::vector<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw ParameterError("empirical marginal '" + name + "' contains a non-finite value");
    }
  }
  std::sort(values.begin(), values.end());
  if (values.size() < 2 || values.front() == values.back()) {
    throw ParameterError("empirical marginal '" + name + "' needs at least 2 distinct values");
  }
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return Marginal(std::move(name), EmpiricalParams{std::move(values), mean, sd});
}

Family Marginal::family() const {
  switch (params_.index()) {
    case 0:
      return Family::uniform;
    case 1:
      return Family::gaussian;
    default:
      return Family::empirical;
  }
}

double Marginal::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("quantile probability outside [0, 1]");
  if (const auto* u = std::get_if<UniformParams>(&params_)) {
    if (p == 1.0) return u->hi;
    return u->lo + p * (u->hi - u->lo);
  }
  if (const auto* g = std::get_if<GaussianParams>(&params_)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    const boost::math::normal_distribution<double> normal(g->mean, g->std);
    return boost::math::quantile(normal, p);
  }
  const auto& e = std::get<EmpiricalParams>(params_);
  const double h = p * static_cast<double>(e.sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= e.sorted.size()) return e.sorted.back();
  const double frac = h - static_cast<double>(lo);
  return e.sorted[lo] + frac * (e.sorted[lo + 1] - e.sorted[lo]);
}

double Marginal::mean() const {
  if (const auto* u = std::get_if<UniformParams>(&params_)) return 0.5 * (u->lo + u->hi);
  if (const auto* g = std::get_if<GaussianParams>(&params_)) return g->mean;
  return std::get<EmpiricalParams>(params_).mean;
}

double Marginal::stddev() const {
  if (const auto* u = std::get_if<UniformParams>(&params_)) {
    return (u->hi - u->lo) / std::sqrt(12.0);
  }
  if (const auto* g = std::get_if<GaussianParams>(&params_)) return g->std;
  return std::get<EmpiricalParams>(params_).std;
}

double Marginal::lower() const {
  if (const auto* u = std::get_if<UniformParams>(&params_)) return u->lo;
  if (std::holds_alternative<GaussianParams>(params_)) {
    return -std::numeric_limits<double>::infinity();
  }
  return std::get<EmpiricalParams>(params_).sorted.front();
}

double Marginal::upper() const {
  if (const auto* u = std::get_if<UniformParams>(&params_)) return u->hi;
  if (std::holds_alternative<GaussianParams>(params_)) {
    return std::numeric_limits<double>::infinity();
  }
  return std::get<EmpiricalParams>(params_).sorted.back();
}

bool Marginal::contains(double x) const { return x >= lower() && x <= upper(); }

double Marginal::clamp(double x) const { return std::clamp(x, lower(), upper()); }

std::string Marginal::describe() const {
  std::ostringstream os;
  if (const auto* u = std::get_if<UniformParams>(&params_)) {
    os << "uniform(" << format_double(u->lo) << "," << format_double(u->hi) << ")";
  } else if (const auto* g = std::get_if<GaussianParams>(&params_)) {
    os << "gaussian(" << format_double(g->mean) << "," << format_double(g->std) << ")";
  } else {
    os << "empirical(n=" << std::get<EmpiricalParams>(params_).sorted.size() << ")";
  }
  return os.str();
}

InputSpace::InputSpace(std::vector<Marginal> marginals) : marginals_(std::move(marginals)) {
  if (marginals_.empty()) throw ParameterError("input space needs at least one marginal");
  anchor_.reserve(marginals_.size());
  for (const auto& m : marginals_) anchor_.push_back(m.mean());
}

InputSpace::InputSpace(std::vector<Marginal> marginals, std::vector<double> anchor)
    : InputSpace(std::move(marginals)) {
  set_anchor(std::move(anchor));
}

void InputSpace::set_anchor(std::vector<double> anchor) {
  if (anchor.size() != marginals_.size()) {
    throw DimensionError("anchor length " + std::to_string(anchor.size()) +
                         " does not match dimension " + std::to_string(marginals_.size()));
  }
  for (std::size_t j = 0; j < anchor.size(); ++j) {
    if (!marginals_[j].contains(anchor[j])) {
      throw ParameterError("anchor for '" + marginals_[j].name() + "' lies outside its support");
    }
  }
  anchor_ = std::move(anchor);
}

std::vector<std::string> InputSpace::names() const {
  std::vector<std::string> out;
  out.reserve(marginals_.size());
  for (const auto& m : marginals_) out.push_back(m.name());
  return out;
}

std::size_t InputSpace::index_of(const std::string& name) const {
  for (std::size_t j = 0; j < marginals_.size(); ++j) {
    if (marginals_[j].name() == name) return j;
  }
  throw ParameterError("unknown feature '" + name + "'");
}

}  // namespace icegsa
