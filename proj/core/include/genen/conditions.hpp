#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "genen/linalg.hpp"
#include "genen/simulate.hpp"
#include "genen/solvers.hpp"

namespace genen {

/// Empirical covariance blocks of n^{-1} X'X partitioned at q, the matching
/// Sigma blocks, and the eta-shifted blocks
///   curlyC11 = C11 + (eta/n) Sigma11,  curlyC21 = C21 + (eta/n) Sigma21.
struct PartitionedMoments {
  int n = 0;
  int q = 0;
  int p = 0;
  double eta = 0.0;
  Eigen::MatrixXd C11, C12, C21, C22;
  Eigen::MatrixXd Sigma11, Sigma12, Sigma21, Sigma22;
  Eigen::MatrixXd curlyC11, curlyC21;
};

PartitionedMoments partition_moments(const Eigen::MatrixXd& X,
                                     const SymMatrix& Sigma, int q,
                                     double eta);

/// max_j |(C21 C11^{-1} sign(beta1*))_j|; +infinity when C11 is singular
/// (smallest eigenvalue at or below the relative floor), reported, not thrown.
double ic_value(const PartitionedMoments& pm, const Eigen::VectorXd& sign_beta1);

struct GridMin {
  double value = 0.0;
  double lambda = 0.0;
  double eta = 0.0;
};

/// min over the grid of max_j |(C21 (C11 + (eta/n) I)^{-1}
///   (sign(beta1*) + (2 eta/lambda) beta1*))_j|.
GridMin eic_value(const PartitionedMoments& pm, const Eigen::VectorXd& beta1_star,
                  const std::vector<double>& lambda_grid,
                  const std::vector<double>& eta_grid);

/// min over the grid of max_j |((C21 + (eta/n) Sigma21)
///   (C11 + (eta/n) Sigma11)^{-1} (sign(beta1*) + (2 eta/lambda) beta1*)
///   - (2 eta/lambda) Sigma21 beta1*)_j|. Coincides with eic_value cell by
/// cell when Sigma is the identity.
GridMin gic_value(const PartitionedMoments& pm, const Eigen::VectorXd& beta1_star,
                  const std::vector<double>& lambda_grid,
                  const std::vector<double>& eta_grid);

/// The three criteria on one realization, with verdicts at threshold 1.
struct ConditionReport {
  double ic = 0.0;
  bool ic_singular = false;
  double eic = 0.0;
  double eic_lambda = 0.0, eic_eta = 0.0;
  double gic = 0.0;
  double gic_lambda = 0.0, gic_eta = 0.0;
  bool ic_holds = false, eic_holds = false, gic_holds = false;
};

ConditionReport condition_report(const PartitionedMoments& pm,
                                 const Eigen::VectorXd& beta1_star,
                                 const std::vector<double>& lambda_grid,
                                 const std::vector<double>& eta_grid);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// eta-dependent spectral quantities of the sign-recovery analysis:
/// lmax_HA   = lambda_max(H_A H_A') with H_A = n^{-1/2} curlyC11^{-1} X1',
/// lmax_C11inv = lambda_max(curlyC11^{-1}),
/// lmax_HB   = lambda_max(H_B H_B') with
///             H_B = n^{-1/2} (curlyC21 curlyC11^{-1} X1' - X2'),
/// eta_bound: eta * M2 < n / (3 lambda_max(Sigma11)) * beta_min/|beta1*|_2
/// with M2 the empirical lmax_C11inv unless overridden.
struct EtaProfile {
  double lmax_HA = 0.0;
  double lmax_C11inv = 0.0;
  double lmax_HB = 0.0;
  InequalityCheck eta_bound;
};

EtaProfile eta_profile(const Eigen::MatrixXd& X, const SymMatrix& Sigma,
                       const Eigen::VectorXd& beta_star, int q, double eta,
                       std::optional<double> m2_override = std::nullopt);

/// Optional user-supplied constants; the empirical extreme eigenvalues are
/// used where absent.
struct MBounds {
  std::optional<double> M1, M2, M3;
};

struct TheoremQuantities {
  double lmax_HA = 0.0;
  double lmax_C11inv = 0.0;
  double lmax_HB = 0.0;
  double beta_min = 0.0;
  double M1 = 0.0, M2 = 0.0, M3 = 0.0, alpha = 0.0;
  InequalityCheck m1_bound;       // M1 < beta_min^2 / (9 sigma^2)
  InequalityCheck m2_m3_compat;   // sqrt(2+sqrt 2) sqrt(M3) sigma / alpha
                                  //   < beta_min / (3 M2 sqrt q)
  InequalityCheck lambda_upper;   // lambda/n < 2 beta_min / (3 M2 sqrt q)
  InequalityCheck lambda_lower;   // lambda/n >= 2 sqrt(2+sqrt 2) sqrt(M3)
                                  //   sigma / alpha
  InequalityCheck eta_bound;      // eta M2 < n/(3 lmax(Sigma11))
                                  //   * beta_min / |beta1*|_2
};

TheoremQuantities theorem_quantities(const Eigen::MatrixXd& X,
                                     const SymMatrix& Sigma,
                                     const Eigen::VectorXd& beta_star,
                                     const PenaltyConfig& penalty,
                                     double sigma_noise, double alpha_margin,
                                     const MBounds& m_estimates = {});

/// Per-realization indicators of the finite-sample events whose joint
/// occurrence forces exact sign recovery of the gen elastic net fit.
struct LemmaEventReport {
  bool an_holds = false;
  bool bn_holds = false;
  Eigen::VectorXd Wn1, Wn2;      // n^{-1/2} X1' eps, n^{-1/2} X2' eps
  Eigen::VectorXd zeta;          // curlyC11^{-1} Wn1
  Eigen::VectorXd psi;           // curlyC21 zeta - Wn2
  Eigen::VectorXd a_margin;      // the A event bound, coordinate-wise
  Eigen::VectorXd b_margin;      // the B event bound, coordinate-wise
};

/// Requires the dataset's noise vector (simulation-only diagnostic) and
/// lambda > 0.
LemmaEventReport lemma_events(const Dataset& ds, const SymMatrix& Sigma,
                              const PenaltyConfig& penalty);

std::string condition_report_to_json(const ConditionReport& report,
                                     const std::vector<double>& lambda_grid,
                                     const std::vector<double>& eta_grid);
std::string theorem_to_json(const TheoremQuantities& tq);
std::string lemma_to_json(const LemmaEventReport& report);

}  // namespace genen
