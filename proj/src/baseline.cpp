#include "flda/baseline.hpp"

#include <Eigen/Eigenvalues>

namespace flda {

FpcaModel fpca_fit(const Eigen::MatrixXd& coeffs, const FemOperators& ops,
                   Eigen::Index k) {
    const Eigen::Index n = coeffs.rows(), s = coeffs.cols();
    if (s != ops.size()) throw DimensionMismatch("fpca_fit: coefficient columns vs mesh");
    if (k < 1 || k > std::min(n, s)) {
        throw DimensionMismatch("fpca_fit: k out of range");
    }

    FpcaModel model;
    model.mean_coeffs = coeffs.colwise().mean().transpose();
    Eigen::MatrixXd centered = coeffs.rowwise() - model.mean_coeffs.transpose();

    // Dual problem: G w = nu w with G = (1/n) Xc M Xc'. Component
    // phi = Xc' w / sqrt(n nu) is M-orthonormal with variance nu.
    Eigen::MatrixXd dual = centered * (ops.mass * centered.transpose()) /
                           static_cast<double>(n);
    dual = 0.5 * (dual + dual.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dual);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("fpca_fit: dual eigendecomposition failed");
    }

    const double rank_floor = 1e-12 * std::max(eig.eigenvalues().maxCoeff(), 0.0);
    Eigen::Index available = 0;
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        if (eig.eigenvalues()[i] > rank_floor) ++available;
        else break;
    }
    const Eigen::Index kept = std::min(k, available);
    if (kept == 0) throw RankDeficiency("fpca_fit: data has numerical rank 0");
    model.rank_deficient = kept < k;

    model.components.resize(s, kept);
    model.variances.resize(kept);
    for (Eigen::Index l = 0; l < kept; ++l) {
        const Eigen::Index src = n - 1 - l;  // descending order
        const double nu = eig.eigenvalues()[src];
        model.variances[l] = nu;
        model.components.col(l) = centered.transpose() * eig.eigenvectors().col(src) /
                                  std::sqrt(static_cast<double>(n) * nu);
    }
    return model;
}

Eigen::MatrixXd fpca_scores(const FpcaModel& model, const FemOperators& ops,
                            const Eigen::MatrixXd& coeffs) {
    if (coeffs.cols() != model.components.rows()) {
        throw DimensionMismatch("fpca_scores: coefficient length");
    }
    Eigen::MatrixXd centered = coeffs.rowwise() - model.mean_coeffs.transpose();
    return centered * (ops.mass * model.components);
}

LdaModel lda_fit(const Eigen::MatrixXd& scores, const std::vector<int>& labels,
                 double ridge) {
    const Eigen::Index n = scores.rows(), k = scores.cols();
    if (static_cast<Eigen::Index>(labels.size()) != n) {
        throw DimensionMismatch("lda_fit: label count");
    }
    Eigen::Index n1 = 0, n2 = 0;
    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(k), m2 = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (labels[i] == 0) {
            ++n1;
            m1 += scores.row(i).transpose();
        } else {
            ++n2;
            m2 += scores.row(i).transpose();
        }
    }
    if (n1 == 0 || n2 == 0) throw SingleClassError("lda_fit: both classes required");
    m1 /= static_cast<double>(n1);
    m2 /= static_cast<double>(n2);

    Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd d =
            scores.row(i).transpose() - (labels[i] == 0 ? m1 : m2);
        pooled += d * d.transpose();
    }
    pooled /= static_cast<double>(n - 2);

    if (ridge < 0) ridge = 1e-8 * pooled.trace() / static_cast<double>(k);
    pooled.diagonal().array() += ridge;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(pooled);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw SingularCovariance("lda_fit: pooled covariance singular");
    }
    LdaModel model;
    model.weight = ldlt.solve(m2 - m1);
    model.midpoint = 0.5 * (m1 + m2);
    model.prior_g1 = static_cast<double>(n1) / static_cast<double>(n);
    model.prior_g2 = static_cast<double>(n2) / static_cast<double>(n);
    return model;
}

double lda_score(const LdaModel& model, const Eigen::VectorXd& score_row) {
    if (score_row.size() != model.weight.size()) {
        throw DimensionMismatch("lda_score: score row length");
    }
    return model.weight.dot(score_row - model.midpoint);
}

Eigen::VectorXd lda_scores(const LdaModel& model, const Eigen::MatrixXd& rows) {
    return (rows.rowwise() - model.midpoint.transpose()) * model.weight;
}

}  // namespace flda
