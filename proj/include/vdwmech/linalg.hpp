#pragma once

#include <Eigen/Dense>

namespace vdwmech {

struct SymEigen {
  Eigen::VectorXd values;  // ascending
  Eigen::MatrixXd vectors; // orthonormal columns, vectors.col(p) <-> values[p]
};

/// Dense symmetric eigendecomposition (LAPACK divide and conquer).
/// Throws InvalidInput if `a` is not symmetric to 1e-10 relative to its
/// largest entry, NumericalError if the solver fails to converge.
SymEigen sym_eigen(const Eigen::MatrixXd& a);

} // namespace vdwmech
