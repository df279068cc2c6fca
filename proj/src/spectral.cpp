#include "flda/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace flda {

EigenBasis laplace_beltrami_eigs(const FemOperators& ops, Eigen::Index k) {
    const Eigen::Index s = ops.size();
    if (k < 1 || k > s) {
        throw DimensionMismatch("laplace_beltrami_eigs: k = " + std::to_string(k) +
                                " out of range for s = " + std::to_string(s));
    }

    // M = L L', then S e = theta M e becomes (L^-1 S L^-T) u = theta u, e = L^-T u.
    Eigen::MatrixXd mass(ops.mass);
    Eigen::LLT<Eigen::MatrixXd> llt(mass);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("laplace_beltrami_eigs: mass matrix not SPD");
    }
    Eigen::MatrixXd chol_l = llt.matrixL();
    Eigen::MatrixXd b(ops.stiffness);
    b = chol_l.triangularView<Eigen::Lower>().solve(b);
    b = chol_l.triangularView<Eigen::Lower>().solve(b.transpose().eval());
    // Symmetrize away factorization round-off.
    b = 0.5 * (b + b.transpose().eval());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
    if (eig.info() != Eigen::Success) {
        throw ConvergenceFailure("laplace_beltrami_eigs: dense eigensolver failed");
    }

    EigenBasis basis;
    basis.eigenvalues = eig.eigenvalues().head(k);
    basis.eigenvectors =
        chol_l.transpose().triangularView<Eigen::Upper>().solve(eig.eigenvectors().leftCols(k));

    // Sign convention: first coefficient of non-negligible magnitude positive.
    for (Eigen::Index c = 0; c < k; ++c) {
        const double tol = 1e-12 * basis.eigenvectors.col(c).cwiseAbs().maxCoeff();
        for (Eigen::Index r = 0; r < s; ++r) {
            const double v = basis.eigenvectors(r, c);
            if (std::abs(v) > tol) {
                if (v < 0) basis.eigenvectors.col(c) *= -1.0;
                break;
            }
        }
    }
    return basis;
}

}  // namespace flda
