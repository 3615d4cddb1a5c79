// Test-only oracles, kept independent of the library's solver and
// eigensolver code paths.
#pragma once

#include <vector>

#include <Eigen/Dense>

namespace genen::testing {

/// f(beta) = beta' G beta - 2 c' beta + lambda |beta|_1 + constant.
double l1_quadratic_objective(const Eigen::MatrixXd& G,
                              const Eigen::VectorXd& c, double lambda,
                              double constant, const Eigen::VectorXd& beta);

struct OracleSolution {
  Eigen::VectorXd beta;
  double objective;
};

/// Global minimizer of the l1-penalized quadratic by exhaustive sign-pattern
/// enumeration: every pattern in {-1,0,+1}^p fixes an orthant face whose
/// stationary point is a linear solve; consistent candidates are compared
/// exactly. Exponential in p, intended for p <= 10.
OracleSolution enumerate_l1_quadratic(const Eigen::MatrixXd& G,
                                      const Eigen::VectorXd& c, double lambda,
                                      double constant);

/// Largest eigenvalue of a symmetric PSD matrix by plain power iteration
/// from a fixed start vector.
double power_iteration_lmax(const Eigen::MatrixXd& sym, int max_iters = 20000,
                            double tol = 1e-13);

/// Determinant by Laplace expansion along the first row (no LU), n <= 8.
double det_laplace(const Eigen::MatrixXd& a);

/// Real symmetric eigenvalues located as characteristic polynomial roots:
/// sign-change scan over the Gershgorin interval plus bisection. Requires
/// distinct roots. Returned descending.
std::vector<double> charpoly_roots_sym(const Eigen::MatrixXd& m,
                                       int scan_points = 200000);

}  // namespace genen::testing
