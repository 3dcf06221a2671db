// icegsa command-line driver: analyze, fit, verify.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icegsa/error.hpp"
#include "icegsa/oracle.hpp"
#include "icegsa/parallel.hpp"
#include "icegsa/pce/model.hpp"
#include "icegsa/report/config.hpp"
#include "icegsa/report/emit.hpp"
#include "icegsa/report/pipeline.hpp"
#include "icegsa/textio.hpp"

namespace {

using namespace icegsa;

enum Exit : int {
  kOk = 0,
  kFailedChecks = 1,
  kConfig = 2,
  kIngestion = 3,
  kFit = 4,
  kCompute = 5,
  kIo = 6,
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return kConfig;
    case ErrorKind::ingestion: return kIngestion;
    case ErrorKind::fit: return kFit;
    case ErrorKind::io: return kIo;
    default: return kCompute;
  }
}

struct AnalyzeArgs {
  std::string config;
  std::string builtin;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> sets;
  std::string emit;
};

struct FitArgs {
  std::string csv;
  std::string output;
  std::string inputs;
  std::vector<std::string> marginals;
  std::size_t p_max = 5;
  double q = 1.0;
  double train_fraction = 0.8;
  std::uint64_t seed = 42;
  std::string model = "model.pce";
};

struct VerifyArgs {
  std::string suite;
  std::size_t trials = 1000;
  std::size_t pce_models = 50;
  std::size_t n_mc = 1000;
  std::uint64_t seed = 42;
  std::string out;
};

int run_analyze(const AnalyzeArgs& a) {
  report::RunConfig c;
  if (!a.config.empty()) c = report::load_config(a.config);
  if (!a.builtin.empty()) {
    if (c.csv) throw ConfigError("--builtin conflicts with the csv source in the configuration file");
    c.builtin = a.builtin;
  }
  if (a.seed) {
    c.seed = a.seed;
  } else if (!c.seed && a.config.empty()) {
    c.seed = 42;
  }
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    report::set_option(c, trim(std::string_view(kv).substr(0, eq)), trim(std::string_view(kv).substr(eq + 1)));
  }
  if (!a.emit.empty()) report::set_option(c, "emit", a.emit);
  if (!a.out.empty()) c.out = a.out;

  const report::SensitivityReport rep = report::run_pipeline(c);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
  const auto files = report::emit_outputs(rep, c.out);
  std::cout << "wrote " << files.size() << " file(s) to " << c.out.string() << '\n';
  return kOk;
}

int run_fit(const FitArgs& a) {
  report::RunConfig c;
  c.csv = a.csv;
  c.output_column = a.output;
  report::set_option(c, "inputs", a.inputs);
  for (const auto& kv : a.marginals) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--marginal expects name=family(a,b), got '" + kv + "'");
    report::set_option(c, "marginal." + kv.substr(0, eq), kv.substr(eq + 1));
  }
  c.p_max = a.p_max;
  c.q = a.q;
  c.train_fraction = a.train_fraction;
  c.seed = a.seed;
  report::validate(c);

  std::vector<std::string> warnings;
  InputSpace space({Marginal::uniform("placeholder", 0, 1)});
  const report::SurrogateFit fit = report::fit_csv_surrogate(c, warnings, space);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  pce::save_model(fit.model, a.model);
  const auto& d = fit.model.diagnostics();
  std::cout << "rows " << fit.split.rows << " (train " << fit.split.train_rows << ", hold-out " << fit.split.holdout_rows
            << ")\n"
            << "order p = " << d.p << ", q = " << format_double(d.q) << ", terms " << fit.model.nonzeros() << " of "
            << fit.model.basis().size() << '\n'
            << "training R2 " << format_double(d.r2) << ", LOO error " << format_double(d.loo) << ", held-out R2 "
            << format_double(d.heldout_r2) << '\n'
            << "model written to " << a.model << '\n';
  return kOk;
}

int run_verify(const VerifyArgs& a) {
  oracle::VerificationReport rep;
  if (a.suite == "appendix") {
    oracle::AppendixSuiteOptions opt;
    opt.separable_trials = a.trials;
    opt.psd_trials = a.trials;
    opt.pce_models = a.pce_models;
    opt.ice.n_mc = a.n_mc;
    rep = oracle::run_appendix_suite(opt, a.seed);
  } else {
    rep = oracle::run_estimator_suite(a.trials, a.n_mc, a.seed);
  }
  const std::string doc = oracle::to_json(rep);
  if (a.out.empty()) {
    std::cout << doc;
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!(out << doc)) throw IoError("cannot write '" + a.out + "'");
  }
  std::cerr << a.suite << ": " << rep.passed() << " of " << rep.trials.size() << " checks passed\n";
  return rep.all_passed() ? kOk : kFailedChecks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global sensitivity analysis with PDP/ICE, Sobol' and SHAP metrics"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "run the full metric pipeline and write reports");
  analyze->add_option("--config", an.config, "key = value configuration file")->check(CLI::ExistingFile);
  analyze->add_option("--builtin", an.builtin, "goldstein3 | friedman5")
      ->check(CLI::IsMember({"goldstein3", "friedman5"}));
  analyze->add_option("--seed", an.seed, "root seed (default 42 without a configuration file)");
  analyze->add_option("--out", an.out, "output directory");
  analyze->add_option("--set", an.sets, "override one configuration key (key=value)");
  analyze->add_option("--emit", an.emit, "comma list of json, csv, svg");
  analyze->add_option("--threads", threads, "worker threads (0 = all cores)");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "fit a PCE surrogate to a CSV dataset");
  fit->add_option("--csv", fa.csv, "input data file")->required()->check(CLI::ExistingFile);
  fit->add_option("--output", fa.output, "response column")->required();
  fit->add_option("--inputs", fa.inputs, "comma list of input columns (default: all others)");
  fit->add_option("--marginal", fa.marginals, "declared marginal, name=uniform(a,b) or name=gaussian(mean,std)");
  fit->add_option("--p-max", fa.p_max, "maximum total degree")->capture_default_str();
  fit->add_option("--q", fa.q, "hyperbolic truncation norm")->capture_default_str();
  fit->add_option("--train-fraction", fa.train_fraction, "share of rows used for training")->capture_default_str();
  fit->add_option("--seed", fa.seed, "root seed for the train/hold-out split")->capture_default_str();
  fit->add_option("--model", fa.model, "where to save the fitted model")->capture_default_str();
  fit->add_option("--threads", threads, "worker threads (0 = all cores)");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run an oracle verification suite");
  verify->add_option("--suite", va.suite, "appendix | estimators")->required()->check(CLI::IsMember({"appendix", "estimators"}));
  verify->add_option("--trials", va.trials, "separable and PSD trials (appendix) or replications (estimators)")
      ->capture_default_str();
  verify->add_option("--pce-models", va.pce_models, "fitted PCE models (appendix)")->capture_default_str();
  verify->add_option("--n-mc", va.n_mc, "ICE curves per check")->capture_default_str();
  verify->add_option("--seed", va.seed, "root seed")->capture_default_str();
  verify->add_option("--out", va.out, "JSON report path (default: stdout)");
  verify->add_option("--threads", threads, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    set_worker_count(threads);
    if (*analyze) {
      return run_analyze(an);
    }
    if (*fit) return run_fit(fa);
    return run_verify(va);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailedChecks;
  }
}
