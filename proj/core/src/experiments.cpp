#include "genen/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "genen/io.hpp"
#include "genen/version.hpp"

namespace genen {

const char* kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::criteria_box:
      return "criteria_box";
    case ExperimentKind::condition_curves:
      return "condition_curves";
    case ExperimentKind::tprfpr:
      return "tprfpr";
  }
  return "?";
}

std::optional<ExperimentKind> kind_from_name(const std::string& name) {
  if (name == "criteria_box") return ExperimentKind::criteria_box;
  if (name == "condition_curves") return ExperimentKind::condition_curves;
  if (name == "tprfpr") return ExperimentKind::tprfpr;
  return std::nullopt;
}

void parallel_for(int count, int workers,
                  const std::function<void(int)>& body) {
  if (count <= 0) return;
  const int pool = std::min(workers, count);
  if (pool <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const int i = next.fetch_add(1);
      if (i >= count) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(pool);
  for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

void validate_plan(const ExperimentPlan& plan) {
  if (plan.p_list.empty() || plan.n_list.empty() || plan.q_list.empty() ||
      plan.b_list.empty()) {
    throw Error("plan: p, n, q and b lists must be non-empty");
  }
  if (plan.replications < 1) {
    throw Error("plan: replication count must be >= 1");
  }
  if (plan.workers < 1) {
    throw Error("plan: worker count must be >= 1");
  }
  if (plan.sigma < 0.0) {
    throw Error("plan: sigma must be >= 0");
  }
  if (plan.eta_grid.empty()) {
    throw Error("plan: eta grid must be non-empty");
  }
  if (plan.kind == ExperimentKind::criteria_box && plan.lambda_grid.empty()) {
    throw Error("plan: lambda grid must be non-empty");
  }
  for (int q : plan.q_list) {
    for (int p : plan.p_list) {
      if (q < 1 || q >= p) {
        throw Error("plan: need 1 <= q < p for every combination");
      }
    }
  }
}

struct Cell {
  int p, n, q;
  double b;
};

std::vector<Cell> enumerate_cells(const ExperimentPlan& plan, bool with_b) {
  std::vector<Cell> cells;
  for (int p : plan.p_list)
    for (int n : plan.n_list)
      for (int q : plan.q_list) {
        if (with_b) {
          for (double b : plan.b_list) cells.push_back({p, n, q, b});
        } else {
          cells.push_back({p, n, q, plan.b_list.front()});
        }
      }
  return cells;
}

using FactorCache = std::map<std::pair<int, int>, CovarianceFactors>;

FactorCache build_factors(const ExperimentPlan& plan,
                          const std::vector<Cell>& cells) {
  FactorCache cache;
  for (const Cell& cell : cells) {
    const auto key = std::make_pair(cell.p, cell.q);
    if (cache.count(key)) continue;
    CovarianceSpec spec{cell.p, cell.q, plan.alphas[0], plan.alphas[1],
                        plan.alphas[2]};
    cache.emplace(key, CovarianceFactors::from(build_covariance(spec)));
  }
  return cache;
}

std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : "";
}

/// Type-7 (linear interpolation) quantile of an ascending-sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double prob) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = prob * double(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - double(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<CriteriaRow> run_criteria_experiment(const ExperimentPlan& plan) {
  validate_plan(plan);
  if (plan.lambda_grid.empty()) {
    throw Error("criteria experiment needs an explicit lambda grid");
  }
  const std::vector<Cell> cells = enumerate_cells(plan, true);
  const FactorCache factors = build_factors(plan, cells);
  const int reps = plan.replications;
  std::vector<CriteriaRow> rows(cells.size() * reps);
  parallel_for(static_cast<int>(rows.size()), plan.workers, [&](int item) {
    const Cell& cell = cells[item / reps];
    const int rep = item % reps;
    const SeedSpec seed{plan.seed,
                        static_cast<std::uint64_t>(item)};
    const CovarianceFactors& cov = factors.at({cell.p, cell.q});
    TruthSpec truth{cell.q, cell.b, {}};
    Dataset ds = sample_dataset(cov, truth, cell.n, plan.sigma, seed);
    PartitionedMoments pm = partition_moments(ds.X, cov.sigma, cell.q, 0.0);
    CriteriaRow row;
    row.p = cell.p;
    row.n = cell.n;
    row.q = cell.q;
    row.b = cell.b;
    row.rep = rep;
    row.seed = seed;
    row.report = condition_report(pm, ds.beta_star.head(cell.q),
                                  plan.lambda_grid, plan.eta_grid);
    rows[item] = std::move(row);
  });
  return rows;
}

std::vector<CurveRow> run_condition_curves(const ExperimentPlan& plan) {
  validate_plan(plan);
  const std::vector<Cell> cells = enumerate_cells(plan, false);
  const FactorCache factors = build_factors(plan, cells);
  const int reps = plan.replications;
  const std::size_t n_eta = plan.eta_grid.size();
  // Per-replication profiles, averaged in replication order afterwards.
  std::vector<std::vector<EtaProfile>> profiles(cells.size() * reps);
  parallel_for(static_cast<int>(profiles.size()), plan.workers, [&](int item) {
    const Cell& cell = cells[item / reps];
    const SeedSpec seed{plan.seed, static_cast<std::uint64_t>(item)};
    const CovarianceFactors& cov = factors.at({cell.p, cell.q});
    TruthSpec truth{cell.q, cell.b, {}};
    Dataset ds = sample_dataset(cov, truth, cell.n, plan.sigma, seed);
    std::vector<EtaProfile> per_eta;
    per_eta.reserve(n_eta);
    for (double eta : plan.eta_grid) {
      per_eta.push_back(
          eta_profile(ds.X, cov.sigma, ds.beta_star, cell.q, eta));
    }
    profiles[item] = std::move(per_eta);
  });

  std::vector<CurveRow> rows;
  rows.reserve(cells.size() * n_eta);
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    for (std::size_t ei = 0; ei < n_eta; ++ei) {
      CurveRow row;
      row.p = cells[ci].p;
      row.n = cells[ci].n;
      row.q = cells[ci].q;
      row.eta = plan.eta_grid[ei];
      for (int rep = 0; rep < reps; ++rep) {
        const EtaProfile& prof = profiles[ci * reps + rep][ei];
        row.lmax_HA += prof.lmax_HA;
        row.lmax_C11inv += prof.lmax_C11inv;
        row.lmax_HB += prof.lmax_HB;
        row.eq18_lhs += prof.eta_bound.lhs;
        row.eq18_rhs += prof.eta_bound.rhs;
      }
      row.lmax_HA /= reps;
      row.lmax_C11inv /= reps;
      row.lmax_HB /= reps;
      row.eq18_lhs /= reps;
      row.eq18_rhs /= reps;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<TprFprRow> run_tprfpr_experiment(const ExperimentPlan& plan) {
  validate_plan(plan);
  if (plan.lambda_grid.empty() && plan.lambda_rule.count < 1) {
    throw Error("tprfpr experiment needs a lambda grid or rule");
  }
  const std::vector<Cell> cells = enumerate_cells(plan, true);
  const FactorCache factors = build_factors(plan, cells);
  const int reps = plan.replications;
  const int items = static_cast<int>(cells.size()) * reps;
  std::vector<TprFprRow> rows(2 * items);
  parallel_for(items, plan.workers, [&](int item) {
    const Cell& cell = cells[item / reps];
    const int rep = item % reps;
    const SeedSpec seed{plan.seed, static_cast<std::uint64_t>(item)};
    const CovarianceFactors& cov = factors.at({cell.p, cell.q});
    TruthSpec truth{cell.q, cell.b, {}};
    Dataset ds = sample_dataset(cov, truth, cell.n, plan.sigma, seed);

    std::vector<double> lambda_grid = plan.lambda_grid;
    if (lambda_grid.empty()) {
      const double lmax_null =
          2.0 * (ds.X.transpose() * ds.y).lpNorm<Eigen::Infinity>();
      lambda_grid = log_grid(plan.lambda_rule.min_ratio * lmax_null,
                             lmax_null, plan.lambda_rule.count);
    }

    const Method methods[2] = {Method::en, Method::gen};
    for (int mi = 0; mi < 2; ++mi) {
      const std::vector<GenEnFit> fits = solve_path(
          ds.X, ds.y, cov.sigma, lambda_grid, plan.eta_grid, methods[mi]);
      std::vector<MetricsRecord> records;
      records.reserve(fits.size());
      for (const GenEnFit& fit : fits) {
        const SelectionResult sel =
            selection_metrics(fit.beta_hat, ds.beta_star, cell.q);
        MetricsRecord rec;
        rec.method = methods[mi];
        rec.lambda = fit.penalty.lambda;
        rec.eta = fit.penalty.eta;
        rec.tpr = sel.tpr;
        rec.fpr = sel.fpr;
        rec.sign_exact = sel.sign_exact;
        rec.replication = rep;
        rec.seed = seed;
        records.push_back(rec);
      }
      const MetricsRecord best = best_tpr_minus_fpr(records);
      TprFprRow row;
      row.p = cell.p;
      row.n = cell.n;
      row.q = cell.q;
      row.b = cell.b;
      row.method = methods[mi];
      row.rep = rep;
      row.seed = seed;
      row.best_lambda = best.lambda;
      row.best_eta = best.eta;
      row.tpr = *best.tpr;
      row.fpr = *best.fpr;
      row.diff = *best.tpr - *best.fpr;
      rows[2 * item + mi] = row;
    }
  });
  return rows;
}

std::string criteria_csv(const std::vector<CriteriaRow>& rows) {
  std::string out = csv_join({"p", "n", "q", "b", "rep", "seed", "ic", "eic",
                              "gic", "eic_lambda", "eic_eta", "gic_lambda",
                              "gic_eta"});
  for (const CriteriaRow& r : rows) {
    out += csv_join({std::to_string(r.p), std::to_string(r.n),
                     std::to_string(r.q), format_double(r.b),
                     std::to_string(r.rep), std::to_string(r.seed.stream),
                     format_double(r.report.ic), format_double(r.report.eic),
                     format_double(r.report.gic),
                     format_double(r.report.eic_lambda),
                     format_double(r.report.eic_eta),
                     format_double(r.report.gic_lambda),
                     format_double(r.report.gic_eta)});
  }
  return out;
}

std::string criteria_summary_csv(const std::vector<CriteriaRow>& rows) {
  std::string out = csv_join(
      {"p", "n", "q", "b", "criterion", "min", "q1", "median", "q3", "max"});
  // Group by cell in first-appearance order.
  std::vector<std::tuple<int, int, int, double>> cell_order;
  std::map<std::tuple<int, int, int, double>,
           std::array<std::vector<double>, 3>>
      groups;
  for (const CriteriaRow& r : rows) {
    const auto key = std::make_tuple(r.p, r.n, r.q, r.b);
    if (!groups.count(key)) cell_order.push_back(key);
    auto& g = groups[key];
    g[0].push_back(r.report.ic);
    g[1].push_back(r.report.eic);
    g[2].push_back(r.report.gic);
  }
  const char* names[3] = {"ic", "eic", "gic"};
  for (const auto& key : cell_order) {
    auto& g = groups[key];
    for (int k = 0; k < 3; ++k) {
      std::vector<double>& v = g[k];
      std::sort(v.begin(), v.end());
      out += csv_join({std::to_string(std::get<0>(key)),
                       std::to_string(std::get<1>(key)),
                       std::to_string(std::get<2>(key)),
                       format_double(std::get<3>(key)), names[k],
                       format_double(v.front()),
                       format_double(quantile_sorted(v, 0.25)),
                       format_double(quantile_sorted(v, 0.5)),
                       format_double(quantile_sorted(v, 0.75)),
                       format_double(v.back())});
    }
  }
  return out;
}

std::string curves_csv(const std::vector<CurveRow>& rows) {
  std::string out = csv_join({"p", "n", "q", "eta", "lmax_HA", "lmax_C11inv",
                              "lmax_HB", "eq18_lhs", "eq18_rhs"});
  for (const CurveRow& r : rows) {
    out += csv_join({std::to_string(r.p), std::to_string(r.n),
                     std::to_string(r.q), format_double(r.eta),
                     format_double(r.lmax_HA), format_double(r.lmax_C11inv),
                     format_double(r.lmax_HB), format_double(r.eq18_lhs),
                     format_double(r.eq18_rhs)});
  }
  return out;
}

std::string tprfpr_csv(const std::vector<TprFprRow>& rows) {
  std::string out =
      csv_join({"p", "n", "q", "b", "method", "rep", "best_lambda", "best_eta",
                "tpr", "fpr", "diff"});
  for (const TprFprRow& r : rows) {
    out += csv_join({std::to_string(r.p), std::to_string(r.n),
                     std::to_string(r.q), format_double(r.b),
                     method_name(r.method), std::to_string(r.rep),
                     format_double(r.best_lambda), format_double(r.best_eta),
                     format_double(r.tpr), format_double(r.fpr),
                     format_double(r.diff)});
  }
  return out;
}

std::string tprfpr_summary_csv(const std::vector<TprFprRow>& rows) {
  std::string out = csv_join(
      {"p", "n", "q", "b", "method", "mean_diff", "mean_tpr", "mean_fpr"});
  std::vector<std::tuple<int, int, int, double, Method>> order;
  std::map<std::tuple<int, int, int, double, Method>,
           std::array<std::vector<double>, 3>>
      groups;
  for (const TprFprRow& r : rows) {
    const auto key = std::make_tuple(r.p, r.n, r.q, r.b, r.method);
    if (!groups.count(key)) order.push_back(key);
    auto& g = groups[key];
    g[0].push_back(r.diff);
    g[1].push_back(r.tpr);
    g[2].push_back(r.fpr);
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
  };
  for (const auto& key : order) {
    auto& g = groups[key];
    out += csv_join({std::to_string(std::get<0>(key)),
                     std::to_string(std::get<1>(key)),
                     std::to_string(std::get<2>(key)),
                     format_double(std::get<3>(key)),
                     method_name(std::get<4>(key)), format_double(mean(g[0])),
                     format_double(mean(g[1])), format_double(mean(g[2]))});
  }
  return out;
}

ExperimentPlan default_plan(ExperimentKind kind) {
  ExperimentPlan plan;
  plan.kind = kind;
  plan.p_list = {200};
  plan.n_list = {200};
  plan.q_list = {5};
  plan.b_list = {10.0};
  switch (kind) {
    case ExperimentKind::criteria_box:
      plan.lambda_grid = log_grid(1e-2, 1e4, 20);
      plan.eta_grid = log_grid(1e-2, 1e4, 20);
      plan.replications = 20;
      break;
    case ExperimentKind::condition_curves:
      plan.q_list = {5, 10};
      plan.eta_grid = log_grid(1e-2, 1e2, 25);
      plan.replications = 10;
      break;
    case ExperimentKind::tprfpr:
      plan.lambda_rule = LambdaGridRule{30, 1e-3};
      plan.eta_grid = {0.01, 0.1, 1.0, 10.0, 100.0};
      plan.replications = 20;
      break;
  }
  return plan;
}

ExperimentPlan preset_plan(const std::string& name) {
  if (name == "paper-p200" || name == "paper-p400" || name == "paper-p600") {
    ExperimentPlan plan = default_plan(ExperimentKind::tprfpr);
    plan.p_list = {name == "paper-p200" ? 200
                                        : (name == "paper-p400" ? 400 : 600)};
    plan.n_list = {100, 200, 400};
    plan.b_list = {1.0, 10.0};
    return plan;
  }
  if (name == "paper-criteria") {
    ExperimentPlan plan = default_plan(ExperimentKind::criteria_box);
    plan.p_list = {200, 400, 600};
    plan.n_list = {100, 200, 400};
    plan.b_list = {1.0, 10.0};
    plan.replications = 100;
    return plan;
  }
  if (name == "paper-curves") {
    return default_plan(ExperimentKind::condition_curves);
  }
  throw Error("config: unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"paper-p200", "paper-p400", "paper-p600", "paper-criteria",
          "paper-curves"};
}

namespace {

nlohmann::ordered_json plan_json_object(const ExperimentPlan& plan) {
  nlohmann::ordered_json j;
  j["kind"] = kind_name(plan.kind);
  j["p"] = plan.p_list;
  j["n"] = plan.n_list;
  j["q"] = plan.q_list;
  j["b"] = plan.b_list;
  j["sigma"] = plan.sigma;
  j["alphas"] = plan.alphas;
  j["lambda_grid"] = plan.lambda_grid;
  j["lambda_rule"] = {{"count", plan.lambda_rule.count},
                      {"min_ratio", plan.lambda_rule.min_ratio}};
  j["eta_grid"] = plan.eta_grid;
  j["replications"] = plan.replications;
  j["seed"] = plan.seed;
  j["workers"] = plan.workers;
  return j;
}

ExperimentPlan plan_from_object(const nlohmann::json& j) {
  ExperimentPlan plan;
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") {
      const auto kind = kind_from_name(value.get<std::string>());
      if (!kind) {
        throw Error("config: unknown kind '" + value.get<std::string>() +
                    "'");
      }
      plan.kind = *kind;
    } else if (key == "p") {
      plan.p_list = value.get<std::vector<int>>();
    } else if (key == "n") {
      plan.n_list = value.get<std::vector<int>>();
    } else if (key == "q") {
      plan.q_list = value.get<std::vector<int>>();
    } else if (key == "b") {
      plan.b_list = value.get<std::vector<double>>();
    } else if (key == "sigma") {
      plan.sigma = value.get<double>();
    } else if (key == "alphas") {
      const auto a = value.get<std::vector<double>>();
      if (a.size() != 3) throw Error("config: alphas needs 3 entries");
      plan.alphas = {a[0], a[1], a[2]};
    } else if (key == "lambda_grid") {
      plan.lambda_grid = value.get<std::vector<double>>();
    } else if (key == "lambda_rule") {
      for (const auto& [rk, rv] : value.items()) {
        if (rk == "count") {
          plan.lambda_rule.count = rv.get<int>();
        } else if (rk == "min_ratio") {
          plan.lambda_rule.min_ratio = rv.get<double>();
        } else {
          throw Error("config: unknown key 'lambda_rule." + rk + "'");
        }
      }
    } else if (key == "eta_grid") {
      plan.eta_grid = value.get<std::vector<double>>();
    } else if (key == "replications") {
      plan.replications = value.get<int>();
    } else if (key == "seed") {
      plan.seed = value.get<std::uint64_t>();
    } else if (key == "workers") {
      plan.workers = value.get<int>();
    } else {
      throw Error("config: unknown key '" + key + "'");
    }
  }
  return plan;
}

}  // namespace

std::string plan_to_json(const ExperimentPlan& plan) {
  return plan_json_object(plan).dump(2) + "\n";
}

ExperimentPlan plan_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw Error("config: expected a JSON object");
  }
  try {
    if (j.contains("plan")) {
      for (const auto& [key, value] : j.items()) {
        if (key != "plan" && key != "tool" && key != "version" &&
            key != "outputs") {
          throw Error("config: unknown key '" + key + "'");
        }
      }
      return plan_from_object(j.at("plan"));
    }
    return plan_from_object(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
}

ExperimentOutputs run_experiment(const ExperimentPlan& plan,
                                 const std::string& out_dir) {
  validate_plan(plan);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw Error("cannot create output directory '" + out_dir + "'");
  }
  auto path = [&](const char* name) {
    return (fs::path(out_dir) / name).string();
  };
  ExperimentOutputs outputs;
  switch (plan.kind) {
    case ExperimentKind::criteria_box: {
      const auto rows = run_criteria_experiment(plan);
      write_text_file(path("criteria.csv"), criteria_csv(rows));
      write_text_file(path("criteria_summary.csv"),
                      criteria_summary_csv(rows));
      outputs.files = {path("criteria.csv"), path("criteria_summary.csv")};
      break;
    }
    case ExperimentKind::condition_curves: {
      const auto rows = run_condition_curves(plan);
      write_text_file(path("curves.csv"), curves_csv(rows));
      outputs.files = {path("curves.csv")};
      break;
    }
    case ExperimentKind::tprfpr: {
      const auto rows = run_tprfpr_experiment(plan);
      write_text_file(path("tprfpr.csv"), tprfpr_csv(rows));
      write_text_file(path("tprfpr_summary.csv"), tprfpr_summary_csv(rows));
      outputs.files = {path("tprfpr.csv"), path("tprfpr_summary.csv")};
      break;
    }
  }
  nlohmann::ordered_json manifest;
  manifest["tool"] = "genen";
  manifest["version"] = kVersion;
  manifest["plan"] = plan_json_object(plan);
  std::vector<std::string> names;
  for (const auto& f : outputs.files) {
    names.push_back(fs::path(f).filename().string());
  }
  manifest["outputs"] = names;
  write_text_file(path("manifest.json"), manifest.dump(2) + "\n");
  outputs.files.push_back(path("manifest.json"));
  return outputs;
}

}  // namespace genen
