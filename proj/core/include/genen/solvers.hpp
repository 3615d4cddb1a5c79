#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "genen/linalg.hpp"

namespace genen {

enum class Method { lasso, en, gen };

const char* method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

/// l1 weight lambda and quadratic weight eta; both finite and >= 0.
struct PenaltyConfig {
  double lambda = 0.0;
  double eta = 0.0;
};

struct SolverOptions {
  int max_sweeps = 100000;
  /// Sweep stopping rule: max coordinate update < coef_tol * (1 + |beta|_inf).
  double coef_tol = 1e-8;
  /// Subgradient residual bound in z units (lambda > 0 case).
  double kkt_tol = 1e-6;
  /// Gradient residual bound relative to 1 + |X'y|_inf (lambda == 0 case).
  double kkt_tol_smooth = 1e-8;
  /// Keep the per-sweep objective trace on the fit (tests).
  bool record_trace = false;
};

/// A fitted coefficient vector in both coordinate systems, with solver
/// diagnostics. Non-convergence is a recorded state, never an exception.
struct GenEnFit {
  Method method = Method::lasso;
  PenaltyConfig penalty;
  Eigen::VectorXd beta_hat;        // original coordinates
  Eigen::VectorXd beta_tilde_hat;  // whitened coordinates, Sigma^(1/2) beta_hat
  int iterations = 0;              // full coordinate sweeps
  bool converged = false;
  double objective = 0.0;
  double kkt_residual = 0.0;  // max stationarity violation, see kkt_check
  std::vector<double> objective_trace;  // only when record_trace
};

/// Subgradient check of the stationarity system
///   X'y - (X'X + eta Sigma) beta_hat = (lambda/2) z.
/// active_gap: max |z_j - sign(beta_hat_j)| over the non-zero coordinates;
/// bound_gap: max(0, |z_j| - 1) over the zero coordinates. With lambda == 0
/// the report holds the raw gradient and both gaps are gradient magnitudes.
struct KktReport {
  Eigen::VectorXd z;
  double active_gap = 0.0;
  double bound_gap = 0.0;
};

/// min |y - X b|^2 + lambda |b|_1
GenEnFit fit_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   double lambda, const SolverOptions& opts = {});

/// min |y - X b|^2 + lambda |b|_1 + eta |b|^2
GenEnFit fit_elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const PenaltyConfig& penalty,
                         const SolverOptions& opts = {});

/// Generalized elastic net. In whitened coordinates the criterion is
///   |y - Xw bw|^2 + lambda |Sigma^(-1/2) bw|_1 + eta |bw|^2,
/// solved through its augmented least-squares form (y stacked over a zero
/// block, the whitened design over sqrt(eta) I); after the change of
/// variables beta = Sigma^(-1/2) bw the augmented normal equations are
///   X'y - (X'X + eta Sigma) beta = (lambda/2) z,
/// which is the system coordinate descent works on directly. beta_hat
/// minimizes |y - X b|^2 + lambda |b|_1 + eta b' Sigma b.
GenEnFit fit_gen_elastic_net(const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, const SymMatrix& Sigma,
                             const PenaltyConfig& penalty,
                             const SolverOptions& opts = {});

/// Sigma is only consulted for Method::gen fits; lasso/en use eta I.
KktReport kkt_check(const GenEnFit& fit, const Eigen::MatrixXd& X,
                    const Eigen::VectorXd& y, const SymMatrix& Sigma);

/// One fit per (eta, lambda) grid cell, ordered eta-major in the given grid
/// order: fits[j * lambda_grid.size() + i] is (lambda_grid[i], eta_grid[j]).
/// Within one eta the lambda cells are solved largest-first with warm starts;
/// every fit still satisfies the cold-start KKT tolerance. Per-cell
/// non-convergence is recorded on the fit, the grid always completes.
std::vector<GenEnFit> solve_path(const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& y,
                                 const SymMatrix& Sigma,
                                 const std::vector<double>& lambda_grid,
                                 const std::vector<double>& eta_grid,
                                 Method method, const SolverOptions& opts = {});

/// {method, lambda, eta, beta_hat, iterations, converged, objective,
///  kkt_residual}
std::string fit_to_json(const GenEnFit& fit);

}  // namespace genen
