#include "icegsa/report/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "icegsa/error.hpp"
#include "icegsa/report/dataset.hpp"
#include "icegsa/rng.hpp"
#include "icegsa/sampling.hpp"

namespace icegsa::report {
namespace {

RowMatrix take_rows(const RowMatrix& x, const std::vector<std::size_t>& rows) {
  RowMatrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

Vector take_rows(const Vector& y, const std::vector<std::size_t>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out[static_cast<Eigen::Index>(r)] = y[static_cast<Eigen::Index>(rows[r])];
  return out;
}

pce::PceModel fit_or_throw(const InputSpace& space, const RowMatrix& x, const Vector& y, const RunConfig& c) {
  try {
    return pce::select_order(space, x, y, c.p_max, c.q);
  } catch (const FitError&) {
    throw;
  } catch (const Error& e) {
    throw FitError(std::string("surrogate fit failed: ") + e.what());
  }
}

double anchor_on_grid(const FeatureGrid& grid, double anchor) {
  return std::clamp(anchor, grid.values.front(), grid.values.back());
}

}  // namespace

SurrogateFit fit_csv_surrogate(const RunConfig& config, std::vector<std::string>& warnings, InputSpace& space) {
  ColumnRoles roles{config.output_column, config.input_columns, config.marginals};
  LoadedData loaded = load_csv(*config.csv, roles);
  for (auto& w : loaded.warnings) warnings.push_back(std::move(w));
  space = loaded.space;
  const auto& data = loaded.data;
  const std::size_t n = static_cast<std::size_t>(data.x.rows());

  // Shuffle by sorting on per-row random keys from the split stream.
  const StreamRng rng(*config.seed, streams::train_split);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint64_t> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = rng.bits(i);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  const auto n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::floor(config.train_fraction * static_cast<double>(n) + 0.5)), 1, n);
  const std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> holdout(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(holdout.begin(), holdout.end());
  std::vector<std::size_t> train_sorted = train;
  std::sort(train_sorted.begin(), train_sorted.end());

  pce::PceModel model = fit_or_throw(space, take_rows(data.x, train_sorted), take_rows(data.y, train_sorted), config);
  if (holdout.size() >= 2) {
    model.set_heldout_r2(pce::r_squared(take_rows(data.y, holdout), pce::predict(model, take_rows(data.x, holdout))));
  } else {
    warnings.push_back("no hold-out rows; held-out R^2 is not reported");
  }
  DatasetInfo info{config.csv->string(), data.output_name, data.input_names, n, train_sorted.size(), holdout.size()};
  return {std::move(model), std::move(info)};
}

pce::PceModel fit_builtin_surrogate(const RunConfig& config, const Evaluator& truth, const InputSpace& space) {
  const auto train = draw_iid(space, config.n_train, *config.seed, streams::surrogate_train);
  const auto hold = draw_iid(space, config.n_holdout, *config.seed, streams::surrogate_holdout);
  pce::PceModel model = fit_or_throw(space, train.values, eval_parallel(truth, train.values), config);
  model.set_heldout_r2(pce::r_squared(eval_parallel(truth, hold.values), pce::predict(model, hold.values)));
  return model;
}

SensitivityReport run_pipeline(const RunConfig& config) {
  validate(config);
  const std::uint64_t seed = *config.seed;
  std::vector<std::string> warnings;

  std::optional<Evaluator> ev;
  std::optional<InputSpace> space;
  std::optional<pce::PceModel> surrogate;
  std::optional<DatasetInfo> dataset;
  std::string model_name;
  if (config.builtin) {
    Benchmark b = builtin(*config.builtin);
    space = b.space;
    if (config.surrogate_enabled()) {
      surrogate = fit_builtin_surrogate(config, b.evaluator, *space);
      model_name = "pce";
    } else {
      ev = b.evaluator;
      model_name = *config.builtin;
    }
  } else {
    InputSpace s({Marginal::uniform("placeholder", 0, 1)});
    SurrogateFit fit = fit_csv_surrogate(config, warnings, s);
    space = std::move(s);
    surrogate = std::move(fit.model);
    dataset = std::move(fit.split);
    model_name = "pce";
  }
  if (surrogate) ev = pce::as_evaluator(*surrogate);

  const std::size_t m = space->dimension();
  const auto names = space->names();
  SensitivityReport rep{config, *space, model_name, dataset, surrogate, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};

  // Per-feature ICE over one shared complement sample.
  const RowMatrix draws = complement_sample(*space, config.n_mc, seed);
  for (std::size_t j = 0; j < m; ++j) {
    const FeatureGrid grid = feature_grid(*space, j, config.grid_points, config.grid_scheme);
    const double a = anchor_on_grid(grid, space->anchor()[j]);
    if (a != space->anchor()[j]) {
      warnings.push_back("anchor for '" + names[j] + "' moved onto the grid span");
    }
    IceEnsemble ens = anchor_curves(*ev, compute_ice(*ev, j, grid, draws), a);
    IceCorrelations corr = ice_correlations(ens);
    const MuSigma ms = mu_sigma_ice(ice_importances(ens));

    FeatureSensitivity fs;
    fs.name = names[j];
    fs.feature = j;
    fs.i_pdp = i_pdp(ens);
    fs.mu_ice = ms.mu;
    fs.sigma_ice = ms.sigma;
    fs.sigma_rho = corr.sigma_rho;
    fs.rho_excluded = corr.excluded;
    std::vector<double> finite;
    for (double r : corr.rho) {
      if (!std::isnan(r)) finite.push_back(r);
    }
    if (!finite.empty()) fs.rho_box = boxplot_stats(std::move(finite));
    rep.features.push_back(std::move(fs));
    rep.ensembles.push_back(std::move(ens));
    rep.correlations.push_back(std::move(corr));
  }

  // Two-way PDP importances for every pair.
  Matrix pdp_pairs = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::vector<FeatureGrid> joint_grids;
  for (std::size_t j = 0; j < m; ++j) {
    joint_grids.push_back(feature_grid(*space, j, config.joint_grid_points, config.joint_grid_scheme));
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      JointPdp jp = compute_joint_pdp(*ev, i, j, joint_grids[i], joint_grids[j], draws);
      pdp_pairs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = two_way_ipdp(jp);
      rep.joint.push_back(std::move(jp));
    }
  }

  rep.sobol = sobol_second_mc(*ev, *space, config.n_base, seed);
  if (rep.sobol.out_of_range) warnings.push_back("some Sobol' estimates fall outside [0, 1]; reported unclipped");
  for (std::size_t j = 0; j < m; ++j) {
    rep.features[j].s_first = rep.sobol.first[j];
    rep.features[j].s_total = rep.sobol.total[j];
  }

  if (m <= kMaxShapFeatures) {
    const bool pairs = m <= kMaxShapInteractionFeatures;
    if (!pairs) warnings.push_back("SHAP interactions skipped: more than 16 features");
    rep.shap = shap_summary(*ev, *space, config.n_pts, config.n_bg, seed, pairs);
    for (std::size_t j = 0; j < m; ++j) {
      rep.features[j].sh_bar = rep.shap->mean_abs_phi[j];
      rep.features[j].sh_bar_anchor = rep.shap->mean_abs_phi_anchor[j];
    }
    if (pairs) {
      rep.shap_interactions = make_interaction_matrix(InteractionTag::shap, rep.shap->mean_abs_phi,
                                                      rep.shap->mean_abs_interaction);
    }
  } else {
    warnings.push_back("SHAP skipped: more than 20 features");
    for (auto& f : rep.features) {
      f.sh_bar = f.sh_bar_anchor = std::numeric_limits<double>::quiet_NaN();
    }
  }

  std::vector<double> ipdp_diag(m);
  for (std::size_t j = 0; j < m; ++j) ipdp_diag[j] = rep.features[j].i_pdp;
  rep.pdp_interactions = make_interaction_matrix(InteractionTag::pdp, ipdp_diag, pdp_pairs);
  rep.sobol_interactions = make_interaction_matrix(InteractionTag::sobol2, rep.sobol.first, rep.sobol.second);
  rep.warnings = std::move(warnings);
  return rep;
}

}  // namespace icegsa::report
