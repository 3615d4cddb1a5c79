#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "genen/conditions.hpp"
#include "genen/metrics.hpp"
#include "genen/simulate.hpp"

namespace genen {

enum class ExperimentKind { criteria_box, condition_curves, tprfpr };

const char* kind_name(ExperimentKind kind);
std::optional<ExperimentKind> kind_from_name(const std::string& name);

/// Data-driven lambda path: `count` log-spaced points in
/// [min_ratio * L, L] with L = 2 |X'y|_inf of the replication at hand.
struct LambdaGridRule {
  int count = 30;
  double min_ratio = 1e-3;
  bool operator==(const LambdaGridRule&) const = default;
};

/// A fully resolved experiment configuration. The seed is the sole entropy
/// source: replication r of cell k draws from stream k * replications + r,
/// so serial and worker-pool runs produce identical outputs.
struct ExperimentPlan {
  ExperimentKind kind = ExperimentKind::criteria_box;
  std::vector<int> p_list, n_list, q_list;
  std::vector<double> b_list;
  double sigma = 1.0;
  std::array<double, 3> alphas{0.3, 0.5, 0.7};
  std::vector<double> lambda_grid;  // empty => lambda_rule (tprfpr only)
  LambdaGridRule lambda_rule;
  std::vector<double> eta_grid;
  int replications = 20;
  std::uint64_t seed = 0;
  int workers = 1;

  bool operator==(const ExperimentPlan&) const = default;
};

/// Desk-scale defaults per kind.
ExperimentPlan default_plan(ExperimentKind kind);
/// Named presets: paper-p200 / paper-p400 / paper-p600 (tprfpr),
/// paper-criteria, paper-curves.
ExperimentPlan preset_plan(const std::string& name);
std::vector<std::string> preset_names();

std::string plan_to_json(const ExperimentPlan& plan);
/// Accepts a bare plan object or a run manifest ({"plan": ...}); rejects
/// unknown keys.
ExperimentPlan plan_from_json(const std::string& json_text);

struct CriteriaRow {
  int p = 0, n = 0, q = 0;
  double b = 0.0;
  int rep = 0;
  SeedSpec seed;
  ConditionReport report;
};

struct CurveRow {
  int p = 0, n = 0, q = 0;
  double eta = 0.0;
  double lmax_HA = 0.0, lmax_C11inv = 0.0, lmax_HB = 0.0;
  double eq18_lhs = 0.0, eq18_rhs = 0.0;
};

struct TprFprRow {
  int p = 0, n = 0, q = 0;
  double b = 0.0;
  Method method = Method::en;
  int rep = 0;
  SeedSpec seed;
  double best_lambda = 0.0, best_eta = 0.0;
  double tpr = 0.0, fpr = 0.0, diff = 0.0;
};

std::vector<CriteriaRow> run_criteria_experiment(const ExperimentPlan& plan);
/// Per-eta averages over replications.
std::vector<CurveRow> run_condition_curves(const ExperimentPlan& plan);
std::vector<TprFprRow> run_tprfpr_experiment(const ExperimentPlan& plan);

std::string criteria_csv(const std::vector<CriteriaRow>& rows);
std::string criteria_summary_csv(const std::vector<CriteriaRow>& rows);
std::string curves_csv(const std::vector<CurveRow>& rows);
std::string tprfpr_csv(const std::vector<TprFprRow>& rows);
std::string tprfpr_summary_csv(const std::vector<TprFprRow>& rows);

struct ExperimentOutputs {
  std::vector<std::string> files;  // paths written, manifest last
};

/// Runs the plan and writes its CSV outputs plus a manifest.json echoing the
/// resolved plan; re-running from the manifest reproduces every byte.
ExperimentOutputs run_experiment(const ExperimentPlan& plan,
                                 const std::string& out_dir);

/// Bounded worker pool over [0, count) with result slots owned by the
/// caller; used by every replication loop.
void parallel_for(int count, int workers,
                  const std::function<void(int)>& body);

}  // namespace genen
