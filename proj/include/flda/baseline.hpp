#pragma once

#include <vector>

#include "flda/fem.hpp"

namespace flda {

// Principal components of the sample covariance in the M-weighted inner
// product, computed through the n x n dual problem.
struct FpcaModel {
    Eigen::MatrixXd components;  // s x k, M-orthonormal columns
    Eigen::VectorXd variances;   // k, descending
    Eigen::VectorXd mean_coeffs;
    bool rank_deficient = false;  // requested k exceeded numerical rank

    Eigen::Index component_count() const { return components.cols(); }
};

struct LdaModel {
    Eigen::VectorXd weight;
    Eigen::VectorXd midpoint;  // (m1 + m2) / 2 in score space
    double prior_g1 = 0.5;
    double prior_g2 = 0.5;
};

FpcaModel fpca_fit(const Eigen::MatrixXd& coeffs, const FemOperators& ops,
                   Eigen::Index k);

// scores_il = (x_i - x_bar)' M comp_l.
Eigen::MatrixXd fpca_scores(const FpcaModel& model, const FemOperators& ops,
                            const Eigen::MatrixXd& coeffs);

// Two-class LDA on PC scores: weight = (pooled covariance + ridge I)^-1 (m2 - m1).
// ridge < 0 selects the default 1e-8 * trace / k; ridge = 0 disables it.
LdaModel lda_fit(const Eigen::MatrixXd& scores, const std::vector<int>& labels,
                 double ridge = -1.0);

// weight' (z - midpoint); higher means class g2.
double lda_score(const LdaModel& model, const Eigen::VectorXd& score_row);

Eigen::VectorXd lda_scores(const LdaModel& model, const Eigen::MatrixXd& rows);

}  // namespace flda
