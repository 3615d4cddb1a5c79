#include <doctest.h>

#include <algorithm>

#include "genen/metrics.hpp"

using namespace genen;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("selection metrics by definition") {
  // estimate selects coordinates 1 and 3 of (q=2, p=3)
  const SelectionResult r =
      selection_metrics(vec({1.0, 0.0, 1.0}), vec({1.0, 1.0, 0.0}), 2);
  CHECK(*r.tpr == doctest::Approx(0.5));
  CHECK(*r.fpr == doctest::Approx(1.0));
  CHECK_FALSE(r.sign_exact);
}

TEST_CASE("perfect recovery") {
  const Eigen::VectorXd truth = vec({2.0, -1.0, 0.0, 0.0});
  const SelectionResult r = selection_metrics(truth, truth, 2);
  CHECK(*r.tpr == 1.0);
  CHECK(*r.fpr == 0.0);
  CHECK(r.sign_exact);
}

TEST_CASE("numerical dust does not count as selected") {
  const SelectionResult r = selection_metrics(vec({1.0, 1e-12, 0.0}),
                                              vec({1.0, 0.0, 0.0}), 1);
  CHECK(*r.tpr == 1.0);
  CHECK(*r.fpr == 0.0);
  CHECK(r.sign_exact);
}

TEST_CASE("degenerate partitions report absent rates") {
  const SelectionResult all_active =
      selection_metrics(vec({1.0, 1.0}), vec({1.0, 1.0}), 2);
  CHECK(all_active.tpr.has_value());
  CHECK_FALSE(all_active.fpr.has_value());

  const SelectionResult none_active =
      selection_metrics(vec({0.0, 0.0}), vec({0.0, 0.0}), 0);
  CHECK_FALSE(none_active.tpr.has_value());
  CHECK(none_active.fpr.has_value());
}

TEST_CASE("sign_exact forces perfect rates") {
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd truth(6), est(6);
    for (int j = 0; j < 6; ++j) {
      truth(j) = j < 3 ? ((trial + j) % 2 ? 1.0 : -1.0) : 0.0;
      est(j) = ((trial * 7 + j * 3) % 5 - 2) * 0.5;
    }
    const SelectionResult r = selection_metrics(est, truth, 3);
    if (r.sign_exact) {
      CHECK(*r.tpr == 1.0);
      CHECK(*r.fpr == 0.0);
    }
  }
}

namespace {

MetricsRecord record(double lambda, double eta, double tpr, double fpr) {
  MetricsRecord r;
  r.method = Method::gen;
  r.lambda = lambda;
  r.eta = eta;
  r.tpr = tpr;
  r.fpr = fpr;
  return r;
}

}  // namespace

TEST_CASE("best_tpr_minus_fpr selection and tie-breaks") {
  SUBCASE("single record") {
    const auto best = best_tpr_minus_fpr({record(1, 2, 0.9, 0.1)});
    CHECK(best.lambda == 1.0);
  }

  SUBCASE("larger difference wins") {
    const auto best = best_tpr_minus_fpr(
        {record(1, 1, 0.9, 0.1), record(2, 1, 1.0, 0.3)});
    CHECK(*best.tpr == 0.9);
  }

  SUBCASE("ties go to larger lambda then larger eta") {
    const auto best = best_tpr_minus_fpr({
        record(1, 5, 1.0, 0.0),
        record(3, 2, 1.0, 0.0),
        record(3, 4, 1.0, 0.0),
        record(2, 9, 1.0, 0.0),
    });
    CHECK(best.lambda == 3.0);
    CHECK(best.eta == 4.0);
  }

  SUBCASE("order independence") {
    std::vector<MetricsRecord> records{
        record(1, 1, 0.8, 0.2), record(4, 1, 0.9, 0.1),
        record(2, 2, 0.9, 0.1), record(4, 3, 0.9, 0.1)};
    const auto a = best_tpr_minus_fpr(records);
    std::reverse(records.begin(), records.end());
    const auto b = best_tpr_minus_fpr(records);
    CHECK(a.lambda == b.lambda);
    CHECK(a.eta == b.eta);
  }

  SUBCASE("no usable record throws") {
    MetricsRecord r;
    r.tpr.reset();
    r.fpr.reset();
    CHECK_THROWS_AS(best_tpr_minus_fpr({r}), Error);
  }
}
