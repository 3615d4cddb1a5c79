#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "genen/linalg.hpp"
#include "genen/rng.hpp"

namespace genen {

/// Block-constant correlation matrix: unit diagonal, alpha1 between the
/// first q (active) coordinates, alpha3 between the remaining p-q, alpha2
/// across the two groups.
struct CovarianceSpec {
  int p = 0;
  int q = 0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
};

/// Realizes the spec and verifies positive definiteness (smallest eigenvalue
/// must be strictly positive).
SymMatrix build_covariance(const CovarianceSpec& spec);

/// Sigma with its symmetric square root and inverse square root: one
/// eigendecomposition serving both sampling (X = Z Sigma^(1/2)) and
/// whitening (X Sigma^(-1/2)).
struct CovarianceFactors {
  SymMatrix sigma;
  SymMatrix sqrt;
  SymMatrix inv_sqrt;

  static CovarianceFactors from(const SymMatrix& sigma);
};

/// Sparse truth: q leading non-zero coefficients of magnitude b. The sign
/// pattern defaults to all +1; a custom pattern must have q entries in
/// {-1, +1}.
struct TruthSpec {
  int q = 0;
  double b = 1.0;
  std::vector<int> sign_pattern;  // empty means all +1

  Eigen::VectorXd beta_star(int p) const;
};

/// One simulated draw of the linear model y = X beta* + eps with Gaussian
/// rows X_i ~ N(0, Sigma) and eps ~ N(0, sigma^2 I).
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd beta_star;
  Eigen::VectorXd epsilon;
  double sigma = 0.0;
  SeedSpec seed;
};

Dataset sample_dataset(const CovarianceSpec& spec, const TruthSpec& truth,
                       int n, double sigma, SeedSpec seed);
/// Variant reusing a precomputed factorization (replication loops).
Dataset sample_dataset(const CovarianceFactors& cov, const TruthSpec& truth,
                       int n, double sigma, SeedSpec seed);

/// X * Sigma^(-1/2).
Eigen::MatrixXd whiten_design(const Eigen::MatrixXd& X,
                              const SymMatrix& sigma_inv_half);

/// Dataset CSV: columns x1..xp, y, beta; max(n, p) rows, short columns are
/// padded with empty fields. 17 significant digits throughout.
std::string dataset_to_csv(const Dataset& ds);
void write_dataset_csv(const Dataset& ds, const std::string& path);

/// The portion of a dataset recoverable from its CSV.
struct LoadedDataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd beta_star;
};
LoadedDataset read_dataset_csv(const std::string& path);

/// JSON sidecar recording the generating configuration.
std::string dataset_sidecar_json(const Dataset& ds, const CovarianceSpec& spec,
                                 const TruthSpec& truth);

/// Plain numeric p x p CSV (no header).
void write_covariance_csv(const SymMatrix& sigma, const std::string& path);
SymMatrix read_covariance_csv(const std::string& path);

}  // namespace genen
