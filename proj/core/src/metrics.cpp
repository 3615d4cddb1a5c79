#include "genen/metrics.hpp"

#include <cmath>

namespace genen {

SelectionResult selection_metrics(const Eigen::VectorXd& beta_hat,
                                  const Eigen::VectorXd& beta_star, int q) {
  const Eigen::Index p = beta_hat.size();
  if (beta_star.size() != p) {
    throw DimensionError("selection_metrics: estimate and truth differ in length");
  }
  if (q < 0 || q > p) {
    throw Error("selection_metrics: q out of range");
  }
  const double threshold =
      kSelectRelTol * (1.0 + beta_hat.cwiseAbs().maxCoeff());
  int true_pos = 0;
  int false_pos = 0;
  bool sign_exact = true;
  for (Eigen::Index j = 0; j < p; ++j) {
    const bool selected = std::abs(beta_hat(j)) > threshold;
    if (selected && j < q) ++true_pos;
    if (selected && j >= q) ++false_pos;
    const int est_sign = selected ? (beta_hat(j) > 0 ? 1 : -1) : 0;
    const int true_sign = beta_star(j) > 0 ? 1 : (beta_star(j) < 0 ? -1 : 0);
    if (est_sign != true_sign) sign_exact = false;
  }
  SelectionResult r;
  if (q > 0) r.tpr = double(true_pos) / q;
  if (q < p) r.fpr = double(false_pos) / double(p - q);
  r.sign_exact = sign_exact;
  return r;
}

MetricsRecord best_tpr_minus_fpr(const std::vector<MetricsRecord>& records) {
  const MetricsRecord* best = nullptr;
  double best_diff = 0.0;
  for (const MetricsRecord& r : records) {
    if (!r.tpr || !r.fpr) continue;
    const double diff = *r.tpr - *r.fpr;
    if (best == nullptr || diff > best_diff ||
        (diff == best_diff &&
         (r.lambda > best->lambda ||
          (r.lambda == best->lambda && r.eta > best->eta)))) {
      best = &r;
      best_diff = diff;
    }
  }
  if (best == nullptr) {
    throw Error("best_tpr_minus_fpr: no record carries both rates");
  }
  return *best;
}

}  // namespace genen
