#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "flda/baseline.hpp"
#include "flda/mesh.hpp"
#include "flda/rng.hpp"

using namespace flda;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, uint64_t seed) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = counter_normal(draw_key(seed, i, j));
    }
    return m;
}

}  // namespace

TEST_CASE("principal components are M-orthonormal with descending variances") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, -1.0);
    const Eigen::MatrixXd coeffs = random_matrix(15, ops.size(), 1);
    const FpcaModel model = fpca_fit(coeffs, ops, 6);

    CHECK(model.component_count() == 6);
    CHECK_FALSE(model.rank_deficient);
    const Eigen::MatrixXd gram = model.components.transpose() *
                                 (Eigen::MatrixXd(ops.mass) * model.components);
    CHECK((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-9);
    for (Eigen::Index l = 1; l < 6; ++l) {
        CHECK(model.variances[l] <= model.variances[l - 1]);
    }
    CHECK(model.variances.minCoeff() > 0);
}

TEST_CASE("variances match a dense covariance oracle") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, -1.0);
    const Eigen::Index n = 12;
    const Eigen::MatrixXd coeffs = random_matrix(n, ops.size(), 3);
    const FpcaModel model = fpca_fit(coeffs, ops, 5);

    // Independent route: eigenvalues of the symmetrized covariance
    // M^{1/2} C M^{1/2} with C = (1/n) Xc' Xc, computed fully densely.
    const Eigen::MatrixXd mass(ops.mass);
    const Eigen::MatrixXd centered =
        coeffs.rowwise() - coeffs.colwise().mean();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> msqrt_solver(mass);
    const Eigen::MatrixXd msqrt = msqrt_solver.operatorSqrt();
    const Eigen::MatrixXd sym = msqrt * centered.transpose() * centered * msqrt /
                                static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    const Eigen::VectorXd all = eig.eigenvalues();
    for (Eigen::Index l = 0; l < 5; ++l) {
        CHECK(model.variances[l] ==
              doctest::Approx(all[all.size() - 1 - l]).epsilon(1e-9));
    }
}

TEST_CASE("score columns are uncorrelated with variance nu") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, -1.0);
    const Eigen::Index n = 20;
    const Eigen::MatrixXd coeffs = random_matrix(n, ops.size(), 7);
    const FpcaModel model = fpca_fit(coeffs, ops, 4);
    const Eigen::MatrixXd scores = fpca_scores(model, ops, coeffs);

    CHECK(scores.colwise().mean().cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::MatrixXd cov = scores.transpose() * scores / static_cast<double>(n);
    for (Eigen::Index a = 0; a < 4; ++a) {
        for (Eigen::Index b = 0; b < 4; ++b) {
            const double expected = a == b ? model.variances[a] : 0.0;
            CHECK(cov(a, b) == doctest::Approx(expected).epsilon(1e-8).scale(1.0));
        }
    }
}

TEST_CASE("low-rank data is reconstructed exactly") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, -1.0);
    const Eigen::Index s = ops.size();

    // Data spanned by three fixed smooth directions.
    const Eigen::MatrixXd directions = random_matrix(3, s, 11);
    const Eigen::MatrixXd weights = random_matrix(10, 3, 12);
    const Eigen::MatrixXd coeffs = weights * directions;

    const FpcaModel model = fpca_fit(coeffs, ops, 3);
    const Eigen::MatrixXd scores = fpca_scores(model, ops, coeffs);
    const Eigen::MatrixXd recon =
        (scores * model.components.transpose()).rowwise() +
        model.mean_coeffs.transpose();
    CHECK((recon - coeffs).cwiseAbs().maxCoeff() <
          1e-8 * coeffs.cwiseAbs().maxCoeff());
}

TEST_CASE("requesting more components than the rank sets the flag") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, -1.0);
    const Eigen::MatrixXd directions = random_matrix(2, ops.size(), 21);
    const Eigen::MatrixXd coeffs = random_matrix(8, 2, 22) * directions;
    const FpcaModel model = fpca_fit(coeffs, ops, 6);
    CHECK(model.rank_deficient);
    CHECK(model.component_count() == 2);
}

TEST_CASE("fpca rejects bad k and mismatched sizes") {
    const TriangleMesh mesh = icosphere(0, 1.0);
    const FemOperators ops = assemble_operators(mesh, -1.0);
    const Eigen::MatrixXd coeffs = random_matrix(5, ops.size(), 31);
    CHECK_THROWS_AS(fpca_fit(coeffs, ops, 0), DimensionMismatch);
    CHECK_THROWS_AS(fpca_fit(coeffs, ops, 6), DimensionMismatch);
    CHECK_THROWS_AS(fpca_fit(random_matrix(5, 7, 32), ops, 2), DimensionMismatch);
    CHECK_THROWS_AS(fpca_fit(Eigen::MatrixXd::Zero(5, ops.size()), ops, 1),
                    RankDeficiency);
}

TEST_CASE("one-dimensional LDA has a closed form") {
    // g1 scores {0, 2}, g2 scores {4, 6}: pooled var = (2+2)/(4-2) = 2,
    // weight = (5 - 1)/2 = 2, midpoint = 3.
    Eigen::MatrixXd scores(4, 1);
    scores << 0, 2, 4, 6;
    const LdaModel model = lda_fit(scores, {0, 0, 1, 1}, 0.0);
    CHECK(model.weight[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(model.midpoint[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(lda_score(model, Eigen::VectorXd::Constant(1, 3.0)) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(lda_score(model, Eigen::VectorXd::Constant(1, 6.0)) > 0);
    CHECK(lda_score(model, Eigen::VectorXd::Constant(1, 0.0)) < 0);
}

TEST_CASE("LDA weight solves the pooled system") {
    const Eigen::Index n = 30, k = 5;
    Eigen::MatrixXd scores = random_matrix(n, k, 41);
    std::vector<int> labels;
    for (Eigen::Index i = 0; i < n; ++i) {
        labels.push_back(i < n / 2 ? 0 : 1);
        if (i >= n / 2) scores(i, 0) += 2.0;
    }
    const LdaModel model = lda_fit(scores, labels, 0.0);

    // Recompute the pooled covariance and mean gap independently.
    const Eigen::MatrixXd g1 = scores.topRows(n / 2);
    const Eigen::MatrixXd g2 = scores.bottomRows(n / 2);
    const Eigen::VectorXd m1 = g1.colwise().mean(), m2 = g2.colwise().mean();
    const Eigen::MatrixXd c1 =
        (g1.rowwise() - m1.transpose()).transpose() * (g1.rowwise() - m1.transpose());
    const Eigen::MatrixXd c2 =
        (g2.rowwise() - m2.transpose()).transpose() * (g2.rowwise() - m2.transpose());
    const Eigen::MatrixXd pooled = (c1 + c2) / static_cast<double>(n - 2);
    CHECK((pooled * model.weight - (m2 - m1)).norm() < 1e-10 * (m2 - m1).norm());
    CHECK((model.midpoint - 0.5 * (m1 + m2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("default ridge survives a singular pooled covariance") {
    // Duplicate every sample: within-class scatter is rank deficient.
    Eigen::MatrixXd scores(8, 3);
    scores << 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1, 0,
              2, 0, 1, 2, 0, 1, 1, 1, 1, 1, 1, 1;
    const std::vector<int> labels = {0, 0, 0, 0, 1, 1, 1, 1};
    const LdaModel model = lda_fit(scores, labels);  // default ridge
    CHECK(model.weight.allFinite());
    CHECK(lda_scores(model, scores).allFinite());
}

TEST_CASE("lda_scores matches lda_score row by row") {
    const Eigen::MatrixXd scores = random_matrix(12, 4, 51);
    std::vector<int> labels;
    for (Eigen::Index i = 0; i < 12; ++i) labels.push_back(i % 2);
    const LdaModel model = lda_fit(scores, labels);
    const Eigen::VectorXd batch = lda_scores(model, scores);
    for (Eigen::Index i = 0; i < 12; ++i) {
        CHECK(batch[i] ==
              doctest::Approx(lda_score(model, scores.row(i).transpose())).epsilon(1e-12));
    }
    CHECK_THROWS_AS(lda_fit(scores, {0, 1}), DimensionMismatch);
    CHECK_THROWS_AS(lda_fit(scores, std::vector<int>(12, 0)), SingleClassError);
}
