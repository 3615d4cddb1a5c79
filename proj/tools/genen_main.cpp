// genen: sparse regression with a correlation-adjusted elastic net penalty,
// sign-consistency condition diagnostics, and a reproducible simulation
// harness. Subcommands: simulate, fit, conditions, experiment.
//
// Exit codes: 0 success, 1 runtime/numerical failure, 2 usage error,
// 3 malformed configuration or input, 4 output I/O failure. Every failure
// prints exactly one line to stderr: "genen error: <category>: <message>".

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "genen/conditions.hpp"
#include "genen/experiments.hpp"
#include "genen/io.hpp"
#include "genen/metrics.hpp"
#include "genen/simulate.hpp"
#include "genen/solvers.hpp"
#include "genen/version.hpp"

namespace {

namespace fs = std::filesystem;
using namespace genen;

struct CliFailure {
  int code;
  std::string category;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& category,
                       const std::string& message) {
  throw CliFailure{code, category, message};
}

/// Runs a block that reads/parses inputs; failures become exit code 3.
template <class F>
auto reading(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    fail(3, "input", e.what());
  }
}

/// Runs a block that writes outputs; failures become exit code 4.
template <class F>
auto writing(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    fail(4, "output", e.what());
  }
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.rfind("log:", 0) == 0) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : text.substr(4)) {
      if (ch == ':') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    fields.push_back(cur);
    if (fields.size() != 3) {
      fail(3, "config", "grid spec must be log:<lo>:<hi>:<count>");
    }
    return log_grid(parse_double(fields[0]), parse_double(fields[1]),
                    static_cast<int>(parse_long(fields[2])));
  }
  std::vector<double> grid;
  for (const std::string& field : csv_split(text)) {
    grid.push_back(parse_double(field));
  }
  return grid;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const std::string& field : csv_split(text)) {
    out.push_back(static_cast<int>(parse_long(field)));
  }
  return out;
}

SymMatrix load_sigma(const std::string& path) {
  return reading([&] { return read_covariance_csv(path); });
}

LoadedDataset load_data(const std::string& path) {
  return reading([&] { return read_dataset_csv(path); });
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  int p = 0, q = 0, n = 0;
  double b = 1.0, sigma = 1.0;
  double alpha1 = 0.3, alpha2 = 0.5, alpha3 = 0.7;
  std::uint64_t seed = 0, stream = 0;
  std::string sign_pattern;
  std::string out;
};

int run_simulate(const SimulateArgs& args) {
  CovarianceSpec spec{args.p, args.q, args.alpha1, args.alpha2, args.alpha3};
  TruthSpec truth{args.q, args.b, {}};
  if (!args.sign_pattern.empty()) {
    truth.sign_pattern =
        reading([&] { return parse_int_list(args.sign_pattern); });
  }
  Dataset ds = reading([&] {
    return sample_dataset(spec, truth, args.n, args.sigma,
                          SeedSpec{args.seed, args.stream});
  });
  writing([&] {
    std::error_code ec;
    fs::create_directories(args.out, ec);
    if (ec || !fs::is_directory(args.out)) {
      throw Error("cannot create output directory '" + args.out + "'");
    }
    write_dataset_csv(ds, (fs::path(args.out) / "dataset.csv").string());
    write_text_file((fs::path(args.out) / "dataset.json").string(),
                    dataset_sidecar_json(ds, spec, truth));
    write_covariance_csv(build_covariance(spec),
                         (fs::path(args.out) / "sigma.csv").string());
  });
  std::cout << (fs::path(args.out) / "dataset.csv").string() << "\n"
            << (fs::path(args.out) / "dataset.json").string() << "\n"
            << (fs::path(args.out) / "sigma.csv").string() << "\n";
  return 0;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string method;
  double lambda = 0.0, eta = 0.0;
  std::string data, sigma_file;
  std::string out = "fit.json";
};

int run_fit(const FitArgs& args) {
  const auto method = method_from_name(args.method);
  if (!method) {
    fail(3, "config", "unknown method '" + args.method + "'");
  }
  const LoadedDataset data = load_data(args.data);
  GenEnFit fit;
  if (*method == Method::lasso) {
    fit = reading([&] { return fit_lasso(data.X, data.y, args.lambda); });
  } else if (*method == Method::en) {
    fit = reading(
        [&] { return fit_elastic_net(data.X, data.y, {args.lambda, args.eta}); });
  } else {
    if (args.sigma_file.empty()) {
      fail(3, "config", "--sigma-file is required for method 'gen'");
    }
    const SymMatrix sigma = load_sigma(args.sigma_file);
    fit = reading([&] {
      return fit_gen_elastic_net(data.X, data.y, sigma,
                                 {args.lambda, args.eta});
    });
  }
  writing([&] { write_text_file(args.out, fit_to_json(fit)); });
  std::cout << args.out << "\n";
  return 0;
}

// -------------------------------------------------------------- conditions

struct ConditionsArgs {
  std::string data, sigma_file;
  int q = 0;  // 0 means: use the support size of the stored beta
  std::string lambda_grid = "log:1e-2:1e4:20";
  std::string eta_grid = "log:1e-2:1e4:20";
  double lambda = 0.0, eta = 0.0;
  bool with_penalty = false;
  double sigma_noise = 1.0, alpha_margin = 0.5;
  std::string out = "conditions.json";
};

int run_conditions(const ConditionsArgs& args) {
  const LoadedDataset data = load_data(args.data);
  const SymMatrix sigma = load_sigma(args.sigma_file);
  const int p = static_cast<int>(data.X.cols());
  int q = args.q;
  if (q == 0) {
    while (q < p && data.beta_star(q) != 0.0) ++q;
  }
  const auto lambda_grid =
      reading([&] { return parse_grid(args.lambda_grid); });
  const auto eta_grid = reading([&] { return parse_grid(args.eta_grid); });

  nlohmann::ordered_json doc;
  doc["tool"] = "genen";
  doc["version"] = kVersion;
  reading([&] {
    const PartitionedMoments pm = partition_moments(data.X, sigma, q, 0.0);
    const ConditionReport report = condition_report(
        pm, data.beta_star.head(q), lambda_grid, eta_grid);
    doc["conditions"] = nlohmann::ordered_json::parse(
        condition_report_to_json(report, lambda_grid, eta_grid));
    if (args.with_penalty) {
      const PenaltyConfig penalty{args.lambda, args.eta};
      const TheoremQuantities tq =
          theorem_quantities(data.X, sigma, data.beta_star, penalty,
                             args.sigma_noise, args.alpha_margin);
      doc["theorem"] = nlohmann::ordered_json::parse(theorem_to_json(tq));
      // The noise vector is recoverable from the stored truth.
      Dataset ds;
      ds.X = data.X;
      ds.y = data.y;
      ds.beta_star = data.beta_star;
      ds.epsilon = data.y - data.X * data.beta_star;
      ds.sigma = args.sigma_noise;
      const LemmaEventReport lemma = lemma_events(ds, sigma, penalty);
      doc["lemma"] = nlohmann::ordered_json::parse(lemma_to_json(lemma));
    }
  });
  writing([&] { write_text_file(args.out, doc.dump(2) + "\n"); });
  std::cout << args.out << "\n";
  return 0;
}

// -------------------------------------------------------------- experiment

struct ExperimentArgs {
  std::string kind, preset, config;
  std::string p_list, n_list, q_list, b_list;
  std::string alphas, lambda_grid, eta_grid;
  int lambda_count = 0;
  double lambda_min_ratio = 0.0;
  double sigma = -1.0;
  int reps = 0;
  std::int64_t seed = -1;
  int workers = 0;
  std::string out;
};

int run_experiment_cmd(const ExperimentArgs& args) {
  ExperimentPlan plan;
  bool have_base = false;
  if (!args.preset.empty()) {
    plan = reading([&] { return preset_plan(args.preset); });
    have_base = true;
  }
  bool config_sets_workers = false;
  if (!args.config.empty()) {
    const std::string text = reading([&] { return read_text_file(args.config); });
    ExperimentPlan from_file = reading([&] { return plan_from_json(text); });
    if (have_base) {
      // Config replaces the preset body wholesale; flags still win below.
      plan = from_file;
    } else {
      plan = from_file;
    }
    have_base = true;
    const auto j = nlohmann::json::parse(text);
    const auto& body = j.contains("plan") ? j.at("plan") : j;
    config_sets_workers = body.contains("workers");
  }
  if (!args.kind.empty()) {
    const auto kind = kind_from_name(args.kind);
    if (!kind) {
      fail(3, "config", "unknown kind '" + args.kind + "'");
    }
    if (!have_base) {
      plan = default_plan(*kind);
      have_base = true;
    } else {
      plan.kind = *kind;
    }
  }
  if (!have_base) {
    fail(3, "config", "experiment needs --kind, --preset or --config");
  }

  auto override_list = [&](const std::string& text, std::vector<int>& dst) {
    if (!text.empty()) dst = reading([&] { return parse_int_list(text); });
  };
  override_list(args.p_list, plan.p_list);
  override_list(args.n_list, plan.n_list);
  override_list(args.q_list, plan.q_list);
  if (!args.b_list.empty()) {
    plan.b_list = reading([&] { return parse_grid(args.b_list); });
  }
  if (!args.alphas.empty()) {
    const auto a = reading([&] { return parse_grid(args.alphas); });
    if (a.size() != 3) fail(3, "config", "--alphas needs 3 values");
    plan.alphas = {a[0], a[1], a[2]};
  }
  if (!args.lambda_grid.empty()) {
    plan.lambda_grid = reading([&] { return parse_grid(args.lambda_grid); });
  }
  if (!args.eta_grid.empty()) {
    plan.eta_grid = reading([&] { return parse_grid(args.eta_grid); });
  }
  if (args.lambda_count > 0) {
    plan.lambda_rule.count = args.lambda_count;
    plan.lambda_grid.clear();
  }
  if (args.lambda_min_ratio > 0) {
    plan.lambda_rule.min_ratio = args.lambda_min_ratio;
  }
  if (args.sigma >= 0.0) plan.sigma = args.sigma;
  if (args.reps > 0) plan.replications = args.reps;
  if (args.seed >= 0) plan.seed = static_cast<std::uint64_t>(args.seed);
  if (args.workers > 0) {
    plan.workers = args.workers;
  } else if (!config_sets_workers) {
    if (const char* env = std::getenv("GEN_EN_WORKERS")) {
      plan.workers = reading(
          [&] { return static_cast<int>(parse_long(env)); });
    }
  }

  const ExperimentOutputs outputs =
      writing([&] { return run_experiment(plan, args.out); });
  for (const auto& f : outputs.files) {
    std::cout << f << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sparse regression with a correlation-adjusted elastic net penalty, "
      "selection-condition diagnostics, and a reproducible simulation "
      "harness"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate =
      app.add_subcommand("simulate", "draw one dataset from the block-"
                                     "correlated Gaussian linear model");
  simulate->add_option("--p", sim.p, "number of predictors")->required();
  simulate->add_option("--q", sim.q, "number of active predictors")
      ->required();
  simulate->add_option("--n", sim.n, "sample size")->required();
  simulate->add_option("--b", sim.b, "non-zero coefficient magnitude");
  simulate->add_option("--sigma", sim.sigma, "noise standard deviation");
  simulate->add_option("--alpha1", sim.alpha1, "within-active correlation");
  simulate->add_option("--alpha2", sim.alpha2, "cross-block correlation");
  simulate->add_option("--alpha3", sim.alpha3, "within-inactive correlation");
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--stream", sim.stream, "stream id under the seed");
  simulate->add_option("--sign-pattern", sim.sign_pattern,
                       "comma-separated signs (+1/-1) for the q coefficients");
  simulate->add_option("--out", sim.out, "output directory")->required();

  FitArgs fit;
  CLI::App* fit_cmd =
      app.add_subcommand("fit", "fit lasso, elastic net or the generalized "
                                "elastic net on a dataset CSV");
  fit_cmd->add_option("--method", fit.method, "lasso | en | gen")->required();
  fit_cmd->add_option("--lambda", fit.lambda, "l1 penalty weight")
      ->required();
  fit_cmd->add_option("--eta", fit.eta, "quadratic penalty weight");
  fit_cmd->add_option("--data", fit.data, "dataset CSV (x1..xp,y,beta)")
      ->required();
  fit_cmd->add_option("--sigma-file", fit.sigma_file,
                      "covariance CSV (required for gen)");
  fit_cmd->add_option("--out", fit.out, "output JSON path");

  ConditionsArgs cond;
  CLI::App* cond_cmd = app.add_subcommand(
      "conditions",
      "IC/EIC/GIC criteria plus optional eigenvalue-bound and event "
      "diagnostics on a dataset CSV");
  cond_cmd->add_option("--data", cond.data, "dataset CSV")->required();
  cond_cmd->add_option("--sigma-file", cond.sigma_file, "covariance CSV")
      ->required();
  cond_cmd->add_option("--q", cond.q,
                       "active block size (default: support of beta)");
  cond_cmd->add_option("--lambda-grid", cond.lambda_grid,
                       "comma list or log:<lo>:<hi>:<count>");
  cond_cmd->add_option("--eta-grid", cond.eta_grid,
                       "comma list or log:<lo>:<hi>:<count>");
  CLI::Option* lam =
      cond_cmd->add_option("--lambda", cond.lambda,
                           "penalty for the bound/event diagnostics");
  cond_cmd->add_option("--eta", cond.eta, "quadratic penalty for diagnostics")
      ->needs(lam);
  cond_cmd->add_option("--sigma-noise", cond.sigma_noise,
                       "noise level for the bound checks");
  cond_cmd->add_option("--alpha-margin", cond.alpha_margin,
                       "margin constant in the bound checks");
  cond_cmd->add_option("--out", cond.out, "output JSON path");

  ExperimentArgs exp;
  CLI::App* exp_cmd = app.add_subcommand(
      "experiment", "replicated studies: criteria_box, condition_curves or "
                    "tprfpr, written as CSV plus a manifest");
  exp_cmd->add_option("--kind", exp.kind,
                      "criteria_box | condition_curves | tprfpr");
  exp_cmd->add_option("--preset", exp.preset,
                      "paper-p200 | paper-p400 | paper-p600 | paper-criteria "
                      "| paper-curves");
  exp_cmd->add_option("--config", exp.config,
                      "plan JSON (bare plan or a run manifest)");
  exp_cmd->add_option("--p", exp.p_list, "comma list of p values");
  exp_cmd->add_option("--n", exp.n_list, "comma list of n values");
  exp_cmd->add_option("--q", exp.q_list, "comma list of q values");
  exp_cmd->add_option("--b", exp.b_list, "comma list of b values");
  exp_cmd->add_option("--sigma", exp.sigma, "noise standard deviation");
  exp_cmd->add_option("--alphas", exp.alphas, "alpha1,alpha2,alpha3");
  exp_cmd->add_option("--lambda-grid", exp.lambda_grid,
                      "comma list or log:<lo>:<hi>:<count>");
  exp_cmd->add_option("--eta-grid", exp.eta_grid,
                      "comma list or log:<lo>:<hi>:<count>");
  exp_cmd->add_option("--lambda-count", exp.lambda_count,
                      "points of the data-driven lambda path (tprfpr)");
  exp_cmd->add_option("--lambda-min-ratio", exp.lambda_min_ratio,
                      "smallest/largest lambda of the data-driven path");
  exp_cmd->add_option("--reps", exp.reps, "replication count");
  exp_cmd->add_option("--seed", exp.seed, "master seed");
  exp_cmd->add_option("--workers", exp.workers,
                      "worker threads (env GEN_EN_WORKERS as fallback)");
  exp_cmd->add_option("--out", exp.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "genen error: usage: " << e.what() << "\n";
    return 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (fit_cmd->parsed()) return run_fit(fit);
    if (cond_cmd->parsed()) {
      cond.with_penalty = lam->count() > 0;
      return run_conditions(cond);
    }
    if (exp_cmd->parsed()) return run_experiment_cmd(exp);
  } catch (const CliFailure& e) {
    std::cerr << "genen error: " << e.category << ": " << e.message << "\n";
    return e.code;
  } catch (const Error& e) {
    std::cerr << "genen error: runtime: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "genen error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
