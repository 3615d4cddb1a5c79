#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "genen/rng.hpp"
#include "genen/solvers.hpp"

namespace genen {

/// A coefficient counts as selected when |beta_j| > kSelectRelTol *
/// (1 + |beta|_inf); coordinate descent produces exact zeros, the threshold
/// only guards numerical dust.
inline constexpr double kSelectRelTol = 1e-8;

/// tpr = selected fraction of the first q coordinates, fpr = selected
/// fraction of the last p - q; absent when the denominator is zero.
struct SelectionResult {
  std::optional<double> tpr;
  std::optional<double> fpr;
  bool sign_exact = false;
};

SelectionResult selection_metrics(const Eigen::VectorXd& beta_hat,
                                  const Eigen::VectorXd& beta_star, int q);

struct MetricsRecord {
  Method method = Method::lasso;
  double lambda = 0.0;
  double eta = 0.0;
  std::optional<double> tpr;
  std::optional<double> fpr;
  bool sign_exact = false;
  int replication = 0;
  SeedSpec seed;
};

/// argmax of tpr - fpr; ties resolved toward larger lambda, then larger eta
/// (the sparser cell), so the result is independent of record order.
MetricsRecord best_tpr_minus_fpr(const std::vector<MetricsRecord>& records);

}  // namespace genen
