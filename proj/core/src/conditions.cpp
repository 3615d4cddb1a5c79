#include "genen/conditions.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "genen/io.hpp"

namespace genen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Eigendecomposition-backed applier for (M)^{-1} v with a singularity
/// verdict instead of an exception (singular cells are reported states).
struct InverseApplier {
  Eigen::MatrixXd U;
  Eigen::VectorXd d;
  bool singular = false;

  explicit InverseApplier(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) {
      singular = true;
      return;
    }
    d = solver.eigenvalues();
    U = solver.eigenvectors();
    const double floor = kEigFloorRel * std::max(d.maxCoeff(), 0.0);
    singular = !(d.minCoeff() > floor);
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    return U * (d.cwiseInverse().asDiagonal() * (U.transpose() * v));
  }
  Eigen::MatrixXd apply(const Eigen::MatrixXd& v) const {
    return U * (d.cwiseInverse().asDiagonal() * (U.transpose() * v));
  }
  double lmax_inverse() const { return 1.0 / d.minCoeff(); }
};

Eigen::VectorXd sign_vector(const Eigen::VectorXd& v) {
  Eigen::VectorXd s(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    s(j) = v(j) > 0 ? 1.0 : (v(j) < 0 ? -1.0 : 0.0);
  }
  return s;
}

/// Number of leading non-zero coefficients; the support must be a prefix.
int active_count(const Eigen::VectorXd& beta_star) {
  int q = 0;
  while (q < beta_star.size() && beta_star(q) != 0.0) ++q;
  for (Eigen::Index j = q; j < beta_star.size(); ++j) {
    if (beta_star(j) != 0.0) {
      throw Error(
          "beta_star support must occupy the leading coordinates (found a "
          "non-zero entry at position " +
          std::to_string(j) + ")");
    }
  }
  return q;
}

}  // namespace

PartitionedMoments partition_moments(const Eigen::MatrixXd& X,
                                     const SymMatrix& Sigma, int q,
                                     double eta) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  if (q < 1 || q >= p) {
    throw Error("partition_moments: need 1 <= q < p, got q=" +
                std::to_string(q) + " p=" + std::to_string(p));
  }
  if (Sigma.dim() != p) {
    throw DimensionError("partition_moments: Sigma dimension " +
                         std::to_string(Sigma.dim()) + " != p = " +
                         std::to_string(p));
  }
  // Computed through the symmetrized full matrix so C12 == C21' bitwise.
  const SymMatrix C(Eigen::MatrixXd(X.transpose() * X / double(n)));
  PartitionedMoments pm;
  pm.n = n;
  pm.q = q;
  pm.p = p;
  pm.eta = eta;
  pm.C11 = C.mat().topLeftCorner(q, q);
  pm.C12 = C.mat().topRightCorner(q, p - q);
  pm.C21 = C.mat().bottomLeftCorner(p - q, q);
  pm.C22 = C.mat().bottomRightCorner(p - q, p - q);
  pm.Sigma11 = Sigma.mat().topLeftCorner(q, q);
  pm.Sigma12 = Sigma.mat().topRightCorner(q, p - q);
  pm.Sigma21 = Sigma.mat().bottomLeftCorner(p - q, q);
  pm.Sigma22 = Sigma.mat().bottomRightCorner(p - q, p - q);
  const double t = eta / n;
  pm.curlyC11 = pm.C11 + t * pm.Sigma11;
  pm.curlyC21 = pm.C21 + t * pm.Sigma21;
  return pm;
}

double ic_value(const PartitionedMoments& pm,
                const Eigen::VectorXd& sign_beta1) {
  if (sign_beta1.size() != pm.q) {
    throw DimensionError("ic_value: sign vector size mismatch");
  }
  InverseApplier inv(pm.C11);
  if (inv.singular) {
    return kInf;
  }
  return (pm.C21 * inv.apply(sign_beta1)).lpNorm<Eigen::Infinity>();
}

namespace {

/// Shared grid scan for the elastic-net style criteria. shifted(eta) gives
/// the q x q matrix to invert; value(eta, applier, v) evaluates one cell on
/// the direction vector v = sign(beta1*) + (2 eta / lambda) beta1*.
template <class Shift, class Cell>
GridMin grid_minimum(const Eigen::VectorXd& beta1_star,
                     const std::vector<double>& lambda_grid,
                     const std::vector<double>& eta_grid, Shift shifted,
                     Cell cell) {
  if (lambda_grid.empty() || eta_grid.empty()) {
    throw Error("criterion grids must be non-empty");
  }
  const Eigen::VectorXd sgn = sign_vector(beta1_star);
  GridMin best{kInf, lambda_grid.front(), eta_grid.front()};
  for (double eta : eta_grid) {
    InverseApplier inv(shifted(eta));
    if (inv.singular) continue;  // reported as an unattained cell
    for (double lambda : lambda_grid) {
      if (!(lambda > 0.0)) {
        throw Error("criterion grids require lambda > 0");
      }
      const Eigen::VectorXd v = sgn + (2.0 * eta / lambda) * beta1_star;
      const double value = cell(eta, lambda, inv, v);
      if (value < best.value) {
        best = GridMin{value, lambda, eta};
      }
    }
  }
  return best;
}

}  // namespace

GridMin eic_value(const PartitionedMoments& pm,
                  const Eigen::VectorXd& beta1_star,
                  const std::vector<double>& lambda_grid,
                  const std::vector<double>& eta_grid) {
  if (beta1_star.size() != pm.q) {
    throw DimensionError("eic_value: beta1 size mismatch");
  }
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(pm.q, pm.q);
  return grid_minimum(
      beta1_star, lambda_grid, eta_grid,
      [&](double eta) -> Eigen::MatrixXd {
        return pm.C11 + (eta / pm.n) * eye;
      },
      [&](double /*eta*/, double /*lambda*/, const InverseApplier& inv,
          const Eigen::VectorXd& v) {
        return (pm.C21 * inv.apply(v)).lpNorm<Eigen::Infinity>();
      });
}

GridMin gic_value(const PartitionedMoments& pm,
                  const Eigen::VectorXd& beta1_star,
                  const std::vector<double>& lambda_grid,
                  const std::vector<double>& eta_grid) {
  if (beta1_star.size() != pm.q) {
    throw DimensionError("gic_value: beta1 size mismatch");
  }
  return grid_minimum(
      beta1_star, lambda_grid, eta_grid,
      [&](double eta) -> Eigen::MatrixXd {
        return pm.C11 + (eta / pm.n) * pm.Sigma11;
      },
      [&](double eta, double lambda, const InverseApplier& inv,
          const Eigen::VectorXd& v) {
        const Eigen::MatrixXd shifted_C21 =
            pm.C21 + (eta / pm.n) * pm.Sigma21;
        return (shifted_C21 * inv.apply(v) -
                (2.0 * eta / lambda) * (pm.Sigma21 * beta1_star))
            .lpNorm<Eigen::Infinity>();
      });
}

ConditionReport condition_report(const PartitionedMoments& pm,
                                 const Eigen::VectorXd& beta1_star,
                                 const std::vector<double>& lambda_grid,
                                 const std::vector<double>& eta_grid) {
  ConditionReport rep;
  rep.ic = ic_value(pm, sign_vector(beta1_star));
  rep.ic_singular = std::isinf(rep.ic);
  const GridMin eic = eic_value(pm, beta1_star, lambda_grid, eta_grid);
  rep.eic = eic.value;
  rep.eic_lambda = eic.lambda;
  rep.eic_eta = eic.eta;
  const GridMin gic = gic_value(pm, beta1_star, lambda_grid, eta_grid);
  rep.gic = gic.value;
  rep.gic_lambda = gic.lambda;
  rep.gic_eta = gic.eta;
  rep.ic_holds = rep.ic < 1.0;
  rep.eic_holds = rep.eic < 1.0;
  rep.gic_holds = rep.gic < 1.0;
  return rep;
}

EtaProfile eta_profile(const Eigen::MatrixXd& X, const SymMatrix& Sigma,
                       const Eigen::VectorXd& beta_star, int q, double eta,
                       std::optional<double> m2_override) {
  const PartitionedMoments pm = partition_moments(X, Sigma, q, eta);
  const int n = pm.n;
  InverseApplier inv(pm.curlyC11);
  if (inv.singular) {
    throw NearSingularError(
        "eta_profile: shifted active block is singular at eta " +
            format_double(eta),
        inv.d.size() ? inv.d.minCoeff() : 0.0);
  }
  EtaProfile out;
  // H_A H_A' = curlyC11^{-1} C11 curlyC11^{-1} (a q x q matrix).
  const Eigen::MatrixXd inv_c11 =
      inv.apply(Eigen::MatrixXd(Eigen::MatrixXd::Identity(q, q)));
  const Eigen::MatrixXd ha_gram = inv_c11 * pm.C11 * inv_c11;
  out.lmax_HA = lambda_max(SymMatrix(ha_gram));
  out.lmax_C11inv = inv.lmax_inverse();

  // H_B = n^{-1/2} (curlyC21 curlyC11^{-1} X1' - X2'); its nonzero spectrum
  // matches H_B' H_B, so take the smaller Gram.
  const Eigen::MatrixXd X1 = X.leftCols(q);
  const Eigen::MatrixXd X2 = X.rightCols(pm.p - q);
  const Eigen::MatrixXd HB =
      ((pm.curlyC21 * inv.apply(Eigen::MatrixXd(X1.transpose()))) -
       X2.transpose()) /
      std::sqrt(double(n));
  if (HB.rows() <= HB.cols()) {
    out.lmax_HB = lambda_max(SymMatrix(Eigen::MatrixXd(HB * HB.transpose())));
  } else {
    out.lmax_HB = lambda_max(SymMatrix(Eigen::MatrixXd(HB.transpose() * HB)));
  }

  const Eigen::VectorXd beta1 = beta_star.head(q);
  const double beta_min = beta1.cwiseAbs().minCoeff();
  if (!(beta_min > 0.0)) {
    throw Error("eta_profile: the first q coefficients must be non-zero");
  }
  const double m2 = m2_override.value_or(out.lmax_C11inv);
  out.eta_bound.lhs = eta * m2;
  out.eta_bound.rhs = double(n) /
                      (3.0 * lambda_max(SymMatrix(pm.Sigma11))) * beta_min /
                      beta1.norm();
  out.eta_bound.holds = out.eta_bound.lhs < out.eta_bound.rhs;
  return out;
}

TheoremQuantities theorem_quantities(const Eigen::MatrixXd& X,
                                     const SymMatrix& Sigma,
                                     const Eigen::VectorXd& beta_star,
                                     const PenaltyConfig& penalty,
                                     double sigma_noise, double alpha_margin,
                                     const MBounds& m_estimates) {
  if (!(alpha_margin > 0.0)) {
    throw Error("theorem_quantities: alpha margin must be positive");
  }
  const int q = active_count(beta_star);
  if (q < 1) {
    throw Error("theorem_quantities: need at least one active coefficient");
  }
  const int n = static_cast<int>(X.rows());
  const Eigen::VectorXd beta1 = beta_star.head(q);
  const double beta_min = beta1.cwiseAbs().minCoeff();

  TheoremQuantities tq;
  const EtaProfile prof =
      eta_profile(X, Sigma, beta_star, q, penalty.eta, m_estimates.M2);
  tq.lmax_HA = prof.lmax_HA;
  tq.lmax_C11inv = prof.lmax_C11inv;
  tq.lmax_HB = prof.lmax_HB;
  tq.beta_min = beta_min;
  tq.M1 = m_estimates.M1.value_or(tq.lmax_HA);
  tq.M2 = m_estimates.M2.value_or(tq.lmax_C11inv);
  tq.M3 = m_estimates.M3.value_or(tq.lmax_HB);
  tq.alpha = alpha_margin;

  const double sq = std::sqrt(double(q));
  const double noise_term = std::sqrt(2.0 + std::sqrt(2.0)) *
                            std::sqrt(tq.M3) * sigma_noise / alpha_margin;

  tq.m1_bound = {tq.M1, beta_min * beta_min / (9.0 * sigma_noise * sigma_noise),
                 false};
  tq.m1_bound.holds = tq.m1_bound.lhs < tq.m1_bound.rhs;

  tq.m2_m3_compat = {noise_term, beta_min / (3.0 * tq.M2 * sq), false};
  tq.m2_m3_compat.holds = tq.m2_m3_compat.lhs < tq.m2_m3_compat.rhs;

  tq.lambda_upper = {penalty.lambda / n,
                     2.0 * beta_min / (3.0 * tq.M2 * sq), false};
  tq.lambda_upper.holds = tq.lambda_upper.lhs < tq.lambda_upper.rhs;

  tq.lambda_lower = {penalty.lambda / n, 2.0 * noise_term, false};
  tq.lambda_lower.holds = tq.lambda_lower.lhs >= tq.lambda_lower.rhs;

  tq.eta_bound = prof.eta_bound;
  return tq;
}

LemmaEventReport lemma_events(const Dataset& ds, const SymMatrix& Sigma,
                              const PenaltyConfig& penalty) {
  if (!(penalty.lambda > 0.0)) {
    throw Error("lemma_events: lambda must be positive");
  }
  const int q = active_count(ds.beta_star);
  if (q < 1) {
    throw Error("lemma_events: need at least one active coefficient");
  }
  const int n = static_cast<int>(ds.X.rows());
  const int p = static_cast<int>(ds.X.cols());
  if (ds.epsilon.size() != n) {
    throw Error("lemma_events: dataset carries no noise vector");
  }
  const PartitionedMoments pm = partition_moments(ds.X, Sigma, q, penalty.eta);
  InverseApplier inv(pm.curlyC11);
  if (inv.singular) {
    throw NearSingularError("lemma_events: shifted active block is singular",
                            inv.d.size() ? inv.d.minCoeff() : 0.0);
  }
  const double rootn = std::sqrt(double(n));
  const Eigen::VectorXd beta1 = ds.beta_star.head(q);
  const Eigen::VectorXd sgn = [&] {
    Eigen::VectorXd s(q);
    for (int j = 0; j < q; ++j) s(j) = beta1(j) > 0 ? 1.0 : -1.0;
    return s;
  }();

  LemmaEventReport rep;
  rep.Wn1 = ds.X.leftCols(q).transpose() * ds.epsilon / rootn;
  rep.Wn2 = ds.X.rightCols(p - q).transpose() * ds.epsilon / rootn;
  rep.zeta = inv.apply(rep.Wn1);

  const double lambda = penalty.lambda;
  const double eta = penalty.eta;
  rep.a_margin =
      rootn * (beta1.cwiseAbs() -
               (lambda / (2.0 * n)) * inv.apply(sgn).cwiseAbs() -
               (eta / n) *
                   inv.apply(Eigen::VectorXd(pm.Sigma11 * beta1)).cwiseAbs());
  rep.an_holds =
      (rep.zeta.cwiseAbs().array() < rep.a_margin.array()).all();

  rep.psi = pm.curlyC21 * rep.zeta - rep.Wn2;
  const Eigen::VectorXd inner =
      pm.curlyC21 *
          inv.apply(Eigen::VectorXd(sgn + (2.0 * eta / lambda) *
                                              (pm.Sigma11 * beta1))) -
      (2.0 * eta / lambda) * (pm.Sigma21 * beta1);
  rep.b_margin = (lambda / (2.0 * rootn)) *
                 (Eigen::VectorXd::Ones(p - q) - inner.cwiseAbs());
  rep.bn_holds = (rep.psi.cwiseAbs().array() <= rep.b_margin.array()).all();
  return rep;
}

std::string condition_report_to_json(const ConditionReport& report,
                                     const std::vector<double>& lambda_grid,
                                     const std::vector<double>& eta_grid) {
  nlohmann::ordered_json j;
  j["ic"] = report.ic_singular ? nlohmann::ordered_json("inf")
                               : nlohmann::ordered_json(report.ic);
  j["ic_singular"] = report.ic_singular;
  j["ic_holds"] = report.ic_holds;
  j["eic"] = report.eic;
  j["eic_lambda"] = report.eic_lambda;
  j["eic_eta"] = report.eic_eta;
  j["eic_holds"] = report.eic_holds;
  j["gic"] = report.gic;
  j["gic_lambda"] = report.gic_lambda;
  j["gic_eta"] = report.gic_eta;
  j["gic_holds"] = report.gic_holds;
  j["lambda_grid"] = lambda_grid;
  j["eta_grid"] = eta_grid;
  return j.dump(2) + "\n";
}

namespace {

nlohmann::ordered_json check_json(const InequalityCheck& c) {
  return {{"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}};
}

}  // namespace

std::string theorem_to_json(const TheoremQuantities& tq) {
  nlohmann::ordered_json j;
  j["lmax_HA"] = tq.lmax_HA;
  j["lmax_C11inv"] = tq.lmax_C11inv;
  j["lmax_HB"] = tq.lmax_HB;
  j["beta_min"] = tq.beta_min;
  j["M1"] = tq.M1;
  j["M2"] = tq.M2;
  j["M3"] = tq.M3;
  j["alpha"] = tq.alpha;
  j["m1_bound"] = check_json(tq.m1_bound);
  j["m2_m3_compat"] = check_json(tq.m2_m3_compat);
  j["lambda_upper"] = check_json(tq.lambda_upper);
  j["lambda_lower"] = check_json(tq.lambda_lower);
  j["eta_bound"] = check_json(tq.eta_bound);
  return j.dump(2) + "\n";
}

std::string lemma_to_json(const LemmaEventReport& report) {
  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  nlohmann::ordered_json j;
  j["an_holds"] = report.an_holds;
  j["bn_holds"] = report.bn_holds;
  j["Wn1"] = vec(report.Wn1);
  j["Wn2"] = vec(report.Wn2);
  j["zeta"] = vec(report.zeta);
  j["psi"] = vec(report.psi);
  j["a_margin"] = vec(report.a_margin);
  j["b_margin"] = vec(report.b_margin);
  return j.dump(2) + "\n";
}

}  // namespace genen
