#include "genen/linalg.hpp"

#include <cmath>
#include <string>

namespace genen {

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("SymMatrix: input is " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()) + ", expected square");
  }
  if (m.rows() < 1) {
    throw DimensionError("SymMatrix: dimension must be >= 1");
  }
  mat_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index dim) {
  return SymMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

EigenDecomposition eigen_sym(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.mat());
  if (solver.info() != Eigen::Success) {
    throw Error("eigen_sym: eigendecomposition did not converge for a " +
                std::to_string(m.dim()) + "x" + std::to_string(m.dim()) +
                " matrix");
  }
  // Eigen returns ascending order; flip to descending.
  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

namespace {

double eig_floor(const Eigen::VectorXd& descending_eigenvalues) {
  const double lmax = std::max(descending_eigenvalues(0), 0.0);
  return kEigFloorRel * lmax;
}

}  // namespace

SymMatrix mat_power_half(const SymMatrix& m, HalfPower exponent) {
  EigenDecomposition ed = eigen_sym(m);
  const double floor = eig_floor(ed.eigenvalues);
  const Eigen::Index p = m.dim();
  Eigen::VectorXd d(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double ev = ed.eigenvalues(i);
    if (exponent == HalfPower::minus) {
      if (ev <= floor) {
        throw NearSingularError(
            "mat_power_half: near-singular covariance, eigenvalue " +
                std::to_string(ev) + " at or below floor " +
                std::to_string(floor),
            ev);
      }
      d(i) = 1.0 / std::sqrt(ev);
    } else {
      if (ev < -floor) {
        throw NearSingularError(
            "mat_power_half: negative eigenvalue " + std::to_string(ev) +
                " in +1/2 power",
            ev);
      }
      d(i) = std::sqrt(std::max(ev, 0.0));
    }
  }
  Eigen::MatrixXd r =
      ed.eigenvectors * d.asDiagonal() * ed.eigenvectors.transpose();
  return SymMatrix(r);
}

double lambda_max(const SymMatrix& m) { return eigen_sym(m).eigenvalues(0); }

double lambda_min(const SymMatrix& m) {
  return eigen_sym(m).eigenvalues(m.dim() - 1);
}

Eigen::MatrixXd solve_sym(const SymMatrix& m, const Eigen::MatrixXd& rhs) {
  if (rhs.rows() != m.dim()) {
    throw DimensionError("solve_sym: rhs has " + std::to_string(rhs.rows()) +
                         " rows, matrix dimension is " +
                         std::to_string(m.dim()));
  }
  EigenDecomposition ed = eigen_sym(m);
  const double floor = eig_floor(ed.eigenvalues);
  const double smallest = ed.eigenvalues(m.dim() - 1);
  if (smallest <= floor) {
    throw NearSingularError(
        "solve_sym: smallest eigenvalue " + std::to_string(smallest) +
            " at or below floor " + std::to_string(floor),
        smallest);
  }
  return ed.eigenvectors *
         (ed.eigenvalues.cwiseInverse().asDiagonal() *
          (ed.eigenvectors.transpose() * rhs));
}

}  // namespace genen
