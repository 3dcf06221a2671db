#pragma once

#include <string>
#include <variant>
#include <vector>

namespace icegsa {

enum class Family { uniform, gaussian, empirical };

const char* to_string(Family family);

struct UniformParams {
  double lo;
  double hi;
};

struct GaussianParams {
  double mean;
  double std;
};

/// Data-driven marginal: quantiles interpolate linearly between order statistics.
struct EmpiricalParams {
  std::vector<double> sorted;
  double mean;
  double std;
};

/// One independent input distribution.
class Marginal {
 public:
  static Marginal uniform(std::string name, double lo, double hi);
  static Marginal gaussian(std::string name, double mean, double std);
  static Marginal empirical(std::string name, std::vector<double> values);

  const std::string& name() const { return name_; }
  Family family() const;
  const std::variant<UniformParams, GaussianParams, EmpiricalParams>& params() const {
    return params_;
  }

  /// Inverse CDF; monotone non-decreasing on [0, 1]. Gaussian quantiles at 0 and 1 are infinite.
  double quantile(double p) const;
  double mean() const;
  double stddev() const;
  /// Support bounds; infinite for gaussian.
  double lower() const;
  double upper() const;
  bool bounded() const { return family() != Family::gaussian; }
  bool contains(double x) const;
  double clamp(double x) const;

  /// Human-readable descriptor such as "uniform(0,1)".
  std::string describe() const;

 private:
  Marginal(std::string name, std::variant<UniformParams, GaussianParams, EmpiricalParams> params)
      : name_(std::move(name)), params_(std::move(params)) {}

  std::string name_;
  std::variant<UniformParams, GaussianParams, EmpiricalParams> params_;
};

/// Ordered product of independent marginals plus an anchor point.
class InputSpace {
 public:
  /// Anchor defaults to the per-marginal mean.
  explicit InputSpace(std::vector<Marginal> marginals);
  InputSpace(std::vector<Marginal> marginals, std::vector<double> anchor);

  std::size_t dimension() const { return marginals_.size(); }
  const Marginal& marginal(std::size_t j) const { return marginals_.at(j); }
  const std::vector<Marginal>& marginals() const { return marginals_; }
  const std::vector<double>& anchor() const { return anchor_; }
  void set_anchor(std::vector<double> anchor);

  std::vector<std::string> names() const;
  /// Throws ParameterError when the name is unknown.
  std::size_t index_of(const std::string& name) const;

 private:
  std::vector<Marginal> marginals_;
  std::vector<double> anchor_;
};

}  // namespace icegsa
