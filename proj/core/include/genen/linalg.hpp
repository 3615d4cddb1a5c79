#pragma once

#include <Eigen/Dense>

#include "genen/error.hpp"

namespace genen {

/// Relative eigenvalue floor: an SPD operation fails (instead of silently
/// regularizing) when an eigenvalue is at or below kEigFloorRel * lambda_max.
inline constexpr double kEigFloorRel = 1e-10;

/// Dense symmetric matrix. The constructor symmetrizes its argument as
/// (m + m') / 2, so entries (i,j) and (j,i) compare equal bitwise.
class SymMatrix {
 public:
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix identity(Eigen::Index dim);

  Eigen::Index dim() const noexcept { return mat_.rows(); }
  const Eigen::MatrixXd& mat() const noexcept { return mat_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return mat_(i, j); }

 private:
  Eigen::MatrixXd mat_;
};

/// Spectral decomposition U diag(d) U' with eigenvalues sorted descending and
/// orthonormal eigenvector columns in matching order.
struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

EigenDecomposition eigen_sym(const SymMatrix& m);

enum class HalfPower { plus, minus };

/// m^(+1/2) or m^(-1/2) through the spectral decomposition U d^(±1/2) U'.
/// For HalfPower::minus every eigenvalue must clear the relative floor;
/// for HalfPower::plus eigenvalues must be nonnegative (tiny negative
/// round-off below the floor is clamped to zero).
SymMatrix mat_power_half(const SymMatrix& m, HalfPower exponent);

double lambda_max(const SymMatrix& m);
double lambda_min(const SymMatrix& m);

/// Solves m * result = rhs for SPD m without forming an explicit inverse.
/// Fails with the smallest eigenvalue when m is near-singular or indefinite.
Eigen::MatrixXd solve_sym(const SymMatrix& m, const Eigen::MatrixXd& rhs);

}  // namespace genen
