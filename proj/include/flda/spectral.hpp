#pragma once

#include "flda/fem.hpp"

namespace flda {

// Discrete Laplace-Beltrami eigenpairs: S e = theta M e, M-orthonormal,
// eigenvalues ascending. On a closed surface theta_1 = 0 with constant e_1.
struct EigenBasis {
    Eigen::VectorXd eigenvalues;   // length k, ascending
    Eigen::MatrixXd eigenvectors;  // s x k, column l pairs with eigenvalues(l)

    Eigen::Index size() const { return eigenvalues.size(); }
};

// k smallest generalized eigenpairs via dense reduction (Cholesky of M,
// standard symmetric eigensolve). Deterministic: first coefficient with
// magnitude above 1e-12 of the column max is made positive.
EigenBasis laplace_beltrami_eigs(const FemOperators& ops, Eigen::Index k);

}  // namespace flda
