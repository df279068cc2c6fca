#include "flda/lsqr.hpp"

#include <cmath>

namespace flda {

Eigen::MatrixXd LinearOperator::to_dense() const {
    Eigen::MatrixXd dense(rows(), cols());
    Eigen::VectorXd e = Eigen::VectorXd::Zero(cols());
    for (Eigen::Index c = 0; c < cols(); ++c) {
        e[c] = 1.0;
        dense.col(c) = apply(e);
        e[c] = 0.0;
    }
    return dense;
}

LsqrResult lsqr_solve(const LinearOperator& op, const Eigen::VectorXd& rhs,
                      double tol, int max_iter) {
    if (rhs.size() != op.rows()) {
        throw DimensionMismatch("lsqr_solve: rhs length " + std::to_string(rhs.size()) +
                                " vs operator rows " + std::to_string(op.rows()));
    }
    if (!(tol > 0)) throw DataError("lsqr_solve: tol must be positive");
    if (max_iter <= 0) max_iter = static_cast<int>(10 * (op.rows() + op.cols()));

    LsqrResult result;
    result.x = Eigen::VectorXd::Zero(op.cols());

    const double bnorm = rhs.norm();
    if (bnorm == 0.0) {
        result.converged = true;
        return result;
    }

    // Golub-Kahan bidiagonalization start.
    double beta = bnorm;
    Eigen::VectorXd u = rhs / beta;
    Eigen::VectorXd v = op.apply_transpose(u);
    double alpha = v.norm();
    if (alpha == 0.0) {
        // b orthogonal to the range of A; x = 0 is optimal.
        result.converged = true;
        result.residual_norm = bnorm;
        return result;
    }
    v /= alpha;

    Eigen::VectorXd w = v;
    double phibar = beta;
    double rhobar = alpha;
    double anorm2 = alpha * alpha;
    double arnorm = alpha * beta;

    for (int iter = 1; iter <= max_iter; ++iter) {
        u = op.apply(v) - alpha * u;
        beta = u.norm();
        if (beta > 0) {
            u /= beta;
            v = op.apply_transpose(u) - beta * v;
            alpha = v.norm();
            if (alpha > 0) v /= alpha;
        }
        anorm2 += beta * beta + alpha * alpha;

        // Plane rotation eliminating beta.
        const double rho = std::hypot(rhobar, beta);
        const double c = rhobar / rho;
        const double s = beta / rho;
        const double theta = s * alpha;
        rhobar = -c * alpha;
        const double phi = c * phibar;
        phibar = s * phibar;

        result.x += (phi / rho) * w;
        w = v - (theta / rho) * w;

        const double rnorm = phibar;
        arnorm = phibar * alpha * std::abs(c);
        result.iterations = iter;
        result.residual_norm = rnorm;
        result.normal_residual_norm = arnorm;

        const double anorm = std::sqrt(anorm2);
        const double xnorm = result.x.norm();
        // S1: consistent-system residual test. S2: least-squares optimality test.
        if (rnorm <= tol * bnorm + tol * anorm * xnorm) {
            result.converged = true;
            break;
        }
        if (anorm * rnorm > 0 && arnorm <= tol * anorm * rnorm) {
            result.converged = true;
            break;
        }
        if (alpha == 0.0) {
            result.converged = true;
            break;
        }
    }
    return result;
}

}  // namespace flda
