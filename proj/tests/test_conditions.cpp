#include <doctest.h>

#include <cmath>

#include "genen/conditions.hpp"
#include "genen/io.hpp"
#include "genen/rng.hpp"
#include "genen/simulate.hpp"
#include "genen/solvers.hpp"

using namespace genen;

namespace {

Eigen::MatrixXd random_design(int n, int p, std::uint64_t stream) {
  RngStream rng(555, stream);
  Eigen::MatrixXd x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = rng.gaussian();
  return x;
}

/// Scaled identity design: X'X = n I exactly.
Eigen::MatrixXd orthonormal_design(int n) {
  return std::sqrt(double(n)) * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("partition_moments blocks and shifted blocks") {
  const int n = 6, q = 2;
  const Eigen::MatrixXd X = orthonormal_design(n);
  const SymMatrix sigma = build_covariance({n, q, 0.3, 0.5, 0.7});

  SUBCASE("orthonormal design with eta 0") {
    const PartitionedMoments pm = partition_moments(X, sigma, q, 0.0);
    CHECK((pm.C11 - Eigen::MatrixXd::Identity(q, q)).norm() == 0.0);
    CHECK(pm.C21.norm() == 0.0);
    CHECK(pm.curlyC11 == pm.C11);
    CHECK(pm.curlyC21 == pm.C21);
  }

  SUBCASE("eta shifts add the scaled Sigma blocks") {
    const double eta = 3.0;
    const PartitionedMoments pm = partition_moments(X, sigma, q, eta);
    const Eigen::MatrixXd expected11 =
        pm.C11 + (eta / n) * sigma.mat().topLeftCorner(q, q);
    CHECK(pm.curlyC11 == expected11);
  }

  SUBCASE("seeded blocks equal direct submatrices") {
    const Eigen::MatrixXd Xr = random_design(50, 6, 1);
    const PartitionedMoments pm = partition_moments(Xr, sigma, 2, 0.0);
    const Eigen::MatrixXd direct11 =
        Xr.leftCols(2).transpose() * Xr.leftCols(2) / 50.0;
    const Eigen::MatrixXd direct21 =
        Xr.rightCols(4).transpose() * Xr.leftCols(2) / 50.0;
    CHECK((pm.C11 - direct11).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((pm.C21 - direct21).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((pm.C12 - pm.C21.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("q bounds are validated") {
    CHECK_THROWS_AS(partition_moments(X, sigma, 0, 0.0), Error);
    CHECK_THROWS_AS(partition_moments(X, sigma, n, 0.0), Error);
  }
}

TEST_CASE("ic_value basic cases") {
  const int n = 6;
  const SymMatrix sigma = SymMatrix::identity(n);

  SUBCASE("orthogonal blocks give zero") {
    const PartitionedMoments pm =
        partition_moments(orthonormal_design(n), sigma, 2, 0.0);
    CHECK(ic_value(pm, Eigen::VectorXd::Ones(2)) == 0.0);
  }

  SUBCASE("scalar case reduces to |c|") {
    // Two columns: x2 = 0.6 x1 + orthogonal remainder, unit empirical scale.
    Eigen::MatrixXd X(2, 2);
    const double s = std::sqrt(2.0);
    X << s, 0.6 * s, 0.0, 0.8 * s;
    const PartitionedMoments pm =
        partition_moments(X, SymMatrix::identity(2), 1, 0.0);
    CHECK(pm.C11(0, 0) == doctest::Approx(1.0));
    CHECK(ic_value(pm, Eigen::VectorXd::Ones(1)) == doctest::Approx(0.6));
  }

  SUBCASE("seeded instance equals the explicit-inverse oracle") {
    const Eigen::MatrixXd X = random_design(50, 8, 2);
    const SymMatrix sig = build_covariance({8, 3, 0.3, 0.5, 0.7});
    const PartitionedMoments pm = partition_moments(X, sig, 3, 0.0);
    Eigen::VectorXd sgn(3);
    sgn << 1.0, -1.0, 1.0;
    const double expected =
        (pm.C21 * pm.C11.inverse() * sgn).lpNorm<Eigen::Infinity>();
    CHECK(ic_value(pm, sgn) == doctest::Approx(expected).epsilon(1e-10));
  }

  SUBCASE("singular active block reports infinity") {
    Eigen::MatrixXd X = random_design(30, 5, 3);
    X.col(1) = X.col(0);  // collinear active columns
    const PartitionedMoments pm =
        partition_moments(X, SymMatrix::identity(5), 2, 0.0);
    CHECK(std::isinf(ic_value(pm, Eigen::VectorXd::Ones(2))));
  }
}

TEST_CASE("eic_value reductions and oracle agreement") {
  const Eigen::MatrixXd X = random_design(100, 20, 4);
  const SymMatrix sigma = build_covariance({20, 5, 0.3, 0.5, 0.7});
  const PartitionedMoments pm = partition_moments(X, sigma, 5, 0.0);
  const Eigen::VectorXd beta1 = 2.0 * Eigen::VectorXd::Ones(5);

  SUBCASE("eta 0 cell reduces to ic") {
    const GridMin g = eic_value(pm, beta1, {1e6}, {0.0});
    const double ic = ic_value(pm, Eigen::VectorXd::Ones(5));
    CHECK(g.value == doctest::Approx(ic).epsilon(1e-12));
  }

  SUBCASE("orthogonal design gives zero everywhere") {
    const PartitionedMoments pmo = partition_moments(
        orthonormal_design(8), SymMatrix::identity(8), 2, 0.0);
    const GridMin g = eic_value(pmo, Eigen::VectorXd::Ones(2), {0.5, 1.0},
                                {0.1, 1.0});
    CHECK(g.value == 0.0);
  }

  SUBCASE("per-cell values match the explicit-inverse oracle") {
    const std::vector<double> lambdas{0.5, 3.0, 20.0};
    const std::vector<double> etas{0.2, 2.0, 15.0};
    double best = std::numeric_limits<double>::infinity();
    double best_l = 0, best_e = 0;
    for (double eta : etas) {
      const Eigen::MatrixXd shifted =
          pm.C11 + (eta / pm.n) * Eigen::MatrixXd::Identity(5, 5);
      const Eigen::MatrixXd inv = shifted.inverse();
      for (double lambda : lambdas) {
        const Eigen::VectorXd v =
            Eigen::VectorXd::Ones(5) + (2.0 * eta / lambda) * beta1;
        const double value = (pm.C21 * inv * v).lpNorm<Eigen::Infinity>();
        if (value < best) {
          best = value;
          best_l = lambda;
          best_e = eta;
        }
      }
    }
    const GridMin g = eic_value(pm, beta1, lambdas, etas);
    CHECK(g.value == doctest::Approx(best).epsilon(1e-10));
    CHECK(g.lambda == best_l);
    CHECK(g.eta == best_e);
  }
}

TEST_CASE("gic_value properties") {
  const Eigen::MatrixXd X = random_design(60, 12, 5);
  const Eigen::VectorXd beta1 = 1.5 * Eigen::VectorXd::Ones(4);
  const std::vector<double> lambdas{0.5, 2.0, 10.0};
  const std::vector<double> etas{0.1, 1.0, 10.0};

  SUBCASE("identity covariance coincides with eic cell by cell") {
    const PartitionedMoments pm =
        partition_moments(X, SymMatrix::identity(12), 4, 0.0);
    const GridMin e = eic_value(pm, beta1, lambdas, etas);
    const GridMin g = gic_value(pm, beta1, lambdas, etas);
    CHECK(std::abs(e.value - g.value) <= 1e-12);
    CHECK(e.lambda == g.lambda);
    CHECK(e.eta == g.eta);
  }

  SUBCASE("orthogonal design and block-diagonal sigma give zero") {
    const SymMatrix sigma_diag = SymMatrix::identity(8);
    const PartitionedMoments pm =
        partition_moments(orthonormal_design(8), sigma_diag, 2, 0.0);
    const GridMin g =
        gic_value(pm, Eigen::VectorXd::Ones(2), lambdas, etas);
    CHECK(g.value == 0.0);
  }

  SUBCASE("per-cell values match the explicit-inverse oracle") {
    const SymMatrix sigma = build_covariance({12, 4, 0.3, 0.5, 0.7});
    const PartitionedMoments pm = partition_moments(X, sigma, 4, 0.0);
    double best = std::numeric_limits<double>::infinity();
    for (double eta : etas) {
      const Eigen::MatrixXd shifted = pm.C11 + (eta / pm.n) * pm.Sigma11;
      const Eigen::MatrixXd shifted21 = pm.C21 + (eta / pm.n) * pm.Sigma21;
      const Eigen::MatrixXd inv = shifted.inverse();
      for (double lambda : lambdas) {
        const Eigen::VectorXd v =
            Eigen::VectorXd::Ones(4) + (2.0 * eta / lambda) * beta1;
        const double value =
            (shifted21 * inv * v -
             (2.0 * eta / lambda) * (pm.Sigma21 * beta1))
                .lpNorm<Eigen::Infinity>();
        best = std::min(best, value);
      }
    }
    const GridMin g = gic_value(pm, beta1, lambdas, etas);
    CHECK(g.value == doctest::Approx(best).epsilon(1e-10));
  }

  SUBCASE("criteria are invariant under permuting non-active labels") {
    const SymMatrix sigma = build_covariance({12, 4, 0.3, 0.5, 0.7});
    Eigen::MatrixXd Xp = X;
    // rotate the non-active columns by two positions
    for (int j = 0; j < 8; ++j) {
      Xp.col(4 + j) = X.col(4 + (j + 2) % 8);
    }
    const PartitionedMoments pm = partition_moments(X, sigma, 4, 0.0);
    const PartitionedMoments pmp = partition_moments(Xp, sigma, 4, 0.0);
    CHECK(std::abs(ic_value(pm, Eigen::VectorXd::Ones(4)) -
                   ic_value(pmp, Eigen::VectorXd::Ones(4))) <= 1e-12);
    const GridMin g = gic_value(pm, beta1, lambdas, etas);
    const GridMin gp = gic_value(pmp, beta1, lambdas, etas);
    CHECK(std::abs(g.value - gp.value) <= 1e-12);
  }
}

TEST_CASE("condition_report composes values and verdicts") {
  const Eigen::MatrixXd X = random_design(80, 10, 6);
  const SymMatrix sigma = build_covariance({10, 3, 0.3, 0.5, 0.7});
  const PartitionedMoments pm = partition_moments(X, sigma, 3, 0.0);
  const Eigen::VectorXd beta1 = 10.0 * Eigen::VectorXd::Ones(3);
  const auto lambdas = log_grid(1e-2, 1e4, 10);
  const auto etas = log_grid(1e-2, 1e4, 10);
  const ConditionReport rep = condition_report(pm, beta1, lambdas, etas);
  CHECK(rep.ic == ic_value(pm, Eigen::VectorXd::Ones(3)));
  CHECK(rep.eic == eic_value(pm, beta1, lambdas, etas).value);
  CHECK(rep.gic == gic_value(pm, beta1, lambdas, etas).value);
  CHECK(rep.ic_holds == (rep.ic < 1.0));
  CHECK(rep.eic_holds == (rep.eic < 1.0));
  CHECK(rep.gic_holds == (rep.gic < 1.0));
}

TEST_CASE("eta_profile orthonormal reduction") {
  const int n = 8, q = 3;
  const Eigen::MatrixXd X = orthonormal_design(n);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
  beta.head(q).setConstant(2.0);
  const EtaProfile prof =
      eta_profile(X, SymMatrix::identity(n), beta, q, 0.0);
  CHECK(prof.lmax_C11inv == doctest::Approx(1.0));
  CHECK(prof.lmax_HA == doctest::Approx(1.0));
  CHECK(prof.lmax_HB == doctest::Approx(1.0));
}

TEST_CASE("eta_profile single active variable algebra") {
  // q = 1: beta_min equals |beta1| so the bound is n / (3 lmax(Sigma11)).
  const int n = 20;
  const Eigen::MatrixXd X = random_design(n, 4, 7);
  const SymMatrix sigma = build_covariance({4, 1, 0.0, 0.4, 0.2});
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(4);
  beta(0) = 7.0;
  const EtaProfile prof = eta_profile(X, sigma, beta, 1, 2.0);
  CHECK(prof.eta_bound.rhs == doctest::Approx(n / 3.0));
  CHECK(prof.eta_bound.lhs == doctest::Approx(2.0 * prof.lmax_C11inv));
}

TEST_CASE("theorem_quantities evaluates the feasibility checks") {
  const Eigen::MatrixXd X = random_design(60, 10, 8);
  const SymMatrix sigma = build_covariance({10, 3, 0.3, 0.5, 0.7});
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(10);
  beta.head(3).setConstant(10.0);
  const PenaltyConfig penalty{5.0, 1.0};
  const TheoremQuantities tq =
      theorem_quantities(X, sigma, beta, penalty, 1.0, 0.5);
  CHECK(tq.beta_min == 10.0);
  CHECK(tq.M1 == tq.lmax_HA);
  CHECK(tq.M2 == tq.lmax_C11inv);
  CHECK(tq.M3 == tq.lmax_HB);
  CHECK(tq.m1_bound.rhs == doctest::Approx(100.0 / 9.0));
  CHECK(tq.lambda_upper.lhs == doctest::Approx(5.0 / 60.0));
  CHECK(tq.eta_bound.holds == (tq.eta_bound.lhs < tq.eta_bound.rhs));

  // user-supplied constants override the empirical ones
  MBounds m;
  m.M2 = 123.0;
  const TheoremQuantities tq2 =
      theorem_quantities(X, sigma, beta, penalty, 1.0, 0.5, m);
  CHECK(tq2.M2 == 123.0);
  CHECK(tq2.eta_bound.lhs == doctest::Approx(penalty.eta * 123.0));
}

TEST_CASE("lambda_lower verdict is monotone in lambda") {
  const Eigen::MatrixXd X = random_design(40, 8, 9);
  const SymMatrix sigma = build_covariance({8, 2, 0.3, 0.5, 0.7});
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(8);
  beta.head(2).setConstant(5.0);
  bool held = false;
  for (double lambda : {0.1, 10.0, 1000.0, 100000.0}) {
    const TheoremQuantities tq =
        theorem_quantities(X, sigma, beta, {lambda, 0.5}, 1.0, 0.5);
    if (held) CHECK(tq.lambda_lower.holds);
    held = held || tq.lambda_lower.holds;
  }
  CHECK(held);  // large enough lambda always clears the lower bound
}

TEST_CASE("lemma_events zero-noise and extreme-lambda cases") {
  const CovarianceSpec spec{8, 2, 0.3, 0.5, 0.7};
  const Dataset ds = sample_dataset(spec, {2, 5.0, {}}, 40, 0.0, {31, 0});
  const SymMatrix sigma = build_covariance(spec);

  const LemmaEventReport quiet = lemma_events(ds, sigma, {0.5, 0.1});
  CHECK(quiet.an_holds);  // zero noise, tiny penalties: margins positive
  CHECK(quiet.bn_holds);
  CHECK(quiet.Wn1.cwiseAbs().maxCoeff() == 0.0);

  const LemmaEventReport loud = lemma_events(ds, sigma, {1e9, 0.1});
  CHECK_FALSE(loud.an_holds);
  CHECK((loud.a_margin.array() < 0.0).any());

  CHECK_THROWS_AS(lemma_events(ds, sigma, {0.0, 0.1}), Error);
}

TEST_CASE("joint lemma implication: events force exact sign recovery") {
  const CovarianceSpec spec{12, 3, 0.3, 0.5, 0.7};
  const SymMatrix sigma = build_covariance(spec);
  const CovarianceFactors cov = CovarianceFactors::from(sigma);
  int both_held = 0;
  for (std::uint64_t rep = 0; rep < 30; ++rep) {
    const Dataset ds =
        sample_dataset(cov, {3, 6.0, {}}, 60, 1.0, {700 + rep, rep});
    const PenaltyConfig penalty{4.0 + double(rep % 5), 0.5 + 0.2 * (rep % 3)};
    const LemmaEventReport events = lemma_events(ds, sigma, penalty);
    if (!(events.an_holds && events.bn_holds)) continue;
    ++both_held;
    const GenEnFit fit = fit_gen_elastic_net(ds.X, ds.y, sigma, penalty);
    REQUIRE(fit.converged);
    for (int j = 0; j < 12; ++j) {
      const double t = ds.beta_star(j);
      const double e = fit.beta_hat(j);
      const int ts = t > 0 ? 1 : (t < 0 ? -1 : 0);
      const int es = e > 0 ? 1 : (e < 0 ? -1 : 0);
      CHECK(ts == es);
    }
  }
  CHECK(both_held > 0);  // the check must not be vacuous
}

TEST_CASE("condition json exports carry the schema") {
  const Eigen::MatrixXd X = random_design(30, 6, 10);
  const SymMatrix sigma = build_covariance({6, 2, 0.3, 0.5, 0.7});
  const PartitionedMoments pm = partition_moments(X, sigma, 2, 0.0);
  const Eigen::VectorXd beta1 = Eigen::VectorXd::Ones(2);
  const ConditionReport rep =
      condition_report(pm, beta1, {1.0, 2.0}, {0.5});
  const std::string j = condition_report_to_json(rep, {1.0, 2.0}, {0.5});
  for (const char* key : {"\"ic\"", "\"eic\"", "\"gic\"", "\"gic_lambda\"",
                          "\"ic_holds\"", "\"lambda_grid\""}) {
    CHECK(j.find(key) != std::string::npos);
  }
}
