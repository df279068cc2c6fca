#pragma once

#include <Eigen/Sparse>
#include <string>

#include "flda/mesh.hpp"

namespace flda {

// Compressed sparse row storage; symmetric operators keep both triangles.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Linear FE operators on a triangle mesh: consistent mass M, stiffness S,
// lumped mass diagonal (row sums of M), and the shrinkage weight epsilon
// of the differential penalty S M~^-1 S + eps M.
struct FemOperators {
    SparseMatrix mass;
    SparseMatrix stiffness;
    Eigen::VectorXd lumped_mass_diag;
    double epsilon = 0.0;

    Eigen::Index size() const { return mass.rows(); }
};

// (M)_jj' = integral of psi_j psi_j'; per triangle (area/12)*[[2,1,1],[1,2,1],[1,1,2]].
SparseMatrix assemble_mass(const TriangleMesh& mesh);

// (S)_jj' = integral of grad psi_j . grad psi_j', in-plane gradients per triangle.
// Throws DegenerateTriangle below the area threshold.
SparseMatrix assemble_stiffness(const TriangleMesh& mesh);

// Bundles M, S, lumped diagonal. epsilon < 0 selects the data-scaled
// default 1e-3 * trace(S)/trace(M).
FemOperators assemble_operators(const TriangleMesh& mesh, double epsilon = -1.0);

// S M~^-1 S c + eps M c, applied as composed sparse products.
Eigen::VectorXd penalty_apply(const FemOperators& ops, const Eigen::VectorXd& c);

// c' * penalty_apply(c); the discrete J(beta).
double penalty_value(const FemOperators& ops, const Eigen::VectorXd& c);

// a' M b.
double l2_inner(const FemOperators& ops, const Eigen::VectorXd& a,
                const Eigen::VectorXd& b);

// MatrixMarket coordinate export (symmetric, lower triangle).
void save_matrix_market(const SparseMatrix& m, const std::string& path);

}  // namespace flda
