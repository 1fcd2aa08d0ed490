#pragma once

#include <Eigen/Dense>

namespace so3cert {

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi rotation method,
/// returned in ascending order.
///
/// Deliberately independent of Eigen's eigensolvers so that certificate
/// verification does not share an algorithm with the solver-side linear
/// algebra. Converges quadratically; suitable for the dense blocks used here
/// (dimension up to a few dozen). Throws NoConvergence if the off-diagonal
/// mass has not vanished after max_sweeps.
Eigen::VectorXd jacobi_eigenvalues(Eigen::MatrixXd A, int max_sweeps = 64);

/// Smallest eigenvalue via jacobi_eigenvalues. Throws NotSymmetric when
/// |A - A'| exceeds sym_tol.
double min_eig_sym(const Eigen::MatrixXd& A, double sym_tol = 1e-9);

}  // namespace so3cert
