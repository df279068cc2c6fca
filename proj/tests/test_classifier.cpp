#include <doctest.h>

#include <cmath>

#include "flda/classifier.hpp"
#include "flda/eval.hpp"
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

// Two groups of smooth functions separated along the z-coordinate harmonic.
LabeledFunctionalData separable_data(const TriangleMesh& mesh, Eigen::Index n_per_group,
                                     double gap, uint64_t seed) {
    const Eigen::Index s = mesh.vertex_count();
    LabeledFunctionalData data;
    data.coeffs = 0.1 * random_matrix(2 * n_per_group, s, seed);
    const Eigen::RowVectorXd direction = mesh.vertices.col(2).transpose();
    for (Eigen::Index i = 0; i < 2 * n_per_group; ++i) {
        const int label = i < n_per_group ? 0 : 1;
        data.labels.push_back(label);
        if (label == 1) data.coeffs.row(i) += gap * direction;
    }
    return data;
}

VectorFieldRepr random_field(Eigen::Index m, const KernelSpec& spec, uint64_t seed) {
    VectorFieldRepr f;
    f.control_points = random_matrix(m, 3, seed);
    f.momenta = random_matrix(m, 3, seed + 1);
    f.kernel = spec;
    return f;
}

GeometrySet shifted_geometry(Eigen::Index n_per_group, double shift, uint64_t seed) {
    const KernelSpec spec{1.0};
    GeometrySet geo;
    const Eigen::MatrixX3d controls = random_matrix(6, 3, seed);
    for (Eigen::Index i = 0; i < 2 * n_per_group; ++i) {
        VectorFieldRepr f;
        f.control_points = controls;
        f.momenta = 0.1 * random_matrix(6, 3, seed + 10 + i);
        f.kernel = spec;
        if (i >= n_per_group) f.momenta.col(0).array() += shift;
        geo.fields.push_back(std::move(f));
    }
    geo.gram = gram_matrix(geo.fields);
    return geo;
}

}  // namespace

TEST_CASE("label encoding") {
    const Eigen::VectorXd y = encode_labels({0, 0, 0, 1});
    CHECK(y[0] == doctest::Approx(-4.0 / 3.0).epsilon(1e-15));
    CHECK(y[3] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(y.sum() == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(encode_labels({0, 0}), SingleClassError);
    CHECK_THROWS_AS(encode_labels({0, 2}), DataError);
}

TEST_CASE("augmented system normal equations match the penalized objective") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, -1.0);
    const Eigen::Index s = ops.size();
    const Eigen::MatrixXd x = random_matrix(9, s, 3);
    const double lambda2 = 0.7;

    const AugmentedSystem system(x, ops, std::nullopt, lambda2, nullptr);
    const Eigen::MatrixXd a = system.to_dense();
    CHECK(a.rows() == 9 + 2 * s);
    CHECK(a.cols() == s);

    // Independent oracle: the normal matrix must equal (XM)'(XM) + lambda2 *
    // (S Mlump^-1 S + eps M) regardless of how the square roots are realized.
    const Eigen::MatrixXd mass(ops.mass);
    const Eigen::MatrixXd stiff(ops.stiffness);
    const Eigen::MatrixXd xm = x * mass;
    const Eigen::MatrixXd expected =
        xm.transpose() * x * mass +
        lambda2 * (stiff * ops.lumped_mass_diag.cwiseInverse().asDiagonal() * stiff +
                   ops.epsilon * mass);
    CHECK((a.transpose() * a - expected).cwiseAbs().maxCoeff() <
          1e-12 * expected.cwiseAbs().maxCoeff());
}

TEST_CASE("augmented system adjoint consistency") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, -1.0);
    const Eigen::MatrixXd x = random_matrix(7, ops.size(), 5);
    const Eigen::MatrixXd gram =
        (random_matrix(7, 7, 6) * random_matrix(7, 7, 6).transpose()).eval();
    const AugmentedSystem system(x, ops, 0.3, 0.9, &gram);

    for (uint64_t probe = 0; probe < 4; ++probe) {
        const Eigen::VectorXd u = random_matrix(system.cols(), 1, 50 + probe).col(0);
        const Eigen::VectorXd v = random_matrix(system.rows(), 1, 60 + probe).col(0);
        const double lhs = system.apply(u).dot(v);
        const double rhs = u.dot(system.apply_transpose(v));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    }
}

TEST_CASE("augmented system rejects bad penalties and shapes") {
    const TriangleMesh mesh = icosphere(0, 1.0);
    const FemOperators ops = assemble_operators(mesh, -1.0);
    const Eigen::MatrixXd x = random_matrix(4, ops.size(), 9);
    CHECK_THROWS_AS(AugmentedSystem(x, ops, std::nullopt, 0.0, nullptr),
                    NonPositivePenalty);
    const Eigen::MatrixXd bad_gram = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(AugmentedSystem(x, ops, 0.1, 1.0, &bad_gram), DimensionMismatch);
    CHECK_THROWS_AS(AugmentedSystem(x, ops, std::nullopt, 1.0, &bad_gram), DataError);
}

TEST_CASE("univariate fit separates smooth classes") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, -1.0);
    const LabeledFunctionalData data = separable_data(mesh, 10, 1.0, 71);

    const DiscriminantModel model = fit(data, ops, std::nullopt, 1e-4);
    CHECK(model.solver.converged);
    CHECK_FALSE(model.bivariate());

    const Eigen::VectorXd scores = training_scores(model, ops, data);
    CHECK(auc(scores, data.labels) == doctest::Approx(1.0).epsilon(1e-12));

    // The Youden threshold must separate the training classes.
    for (Eigen::Index i = 0; i < data.sample_count(); ++i) {
        if (data.labels[i] == 0) CHECK(scores[i] <= model.threshold);
        else CHECK(scores[i] > model.threshold);
    }
}

TEST_CASE("fit satisfies the normal equations of the augmented system") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, -1.0);
    const LabeledFunctionalData data = separable_data(mesh, 6, 0.5, 81);
    const double lambda2 = 0.01;

    const DiscriminantModel model = fit(data, ops, std::nullopt, lambda2, {1e-12, 0});

    const Eigen::MatrixXd centered =
        data.coeffs.rowwise() - model.mean_coeffs.transpose();
    const AugmentedSystem system(centered, ops, std::nullopt, lambda2, nullptr);
    const Eigen::VectorXd b = system.rhs(encode_labels(data.labels));
    const Eigen::VectorXd normal_res =
        system.apply_transpose(b - system.apply(model.c_F));
    CHECK(normal_res.norm() < 1e-8 * b.norm());
}

TEST_CASE("larger lambda2 yields a smoother discriminant") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, -1.0);
    const LabeledFunctionalData data = separable_data(mesh, 8, 0.8, 91);

    double prev = std::numeric_limits<double>::infinity();
    for (double lambda2 : {1e-5, 1e-3, 1e-1, 1e1}) {
        const DiscriminantModel model = fit(data, ops, std::nullopt, lambda2);
        const double roughness = penalty_value(ops, model.c_F);
        CHECK(roughness <= prev * (1.0 + 1e-8));
        prev = roughness;
    }
}

TEST_CASE("score agrees with training_scores row by row") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, -1.0);
    const LabeledFunctionalData data = separable_data(mesh, 5, 0.6, 101);
    const DiscriminantModel model = fit(data, ops, std::nullopt, 1e-3);
    const Eigen::VectorXd batch = training_scores(model, ops, data);
    for (Eigen::Index i = 0; i < data.sample_count(); ++i) {
        CHECK(score(model, ops, data.coeffs.row(i).transpose()) ==
              doctest::Approx(batch[i]).epsilon(1e-12));
    }
}

TEST_CASE("bivariate fit uses geometry to separate identical functions") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, -1.0);
    const Eigen::Index n_per_group = 8;

    LabeledFunctionalData data;
    data.coeffs = 0.05 * random_matrix(2 * n_per_group, ops.size(), 111);
    for (Eigen::Index i = 0; i < 2 * n_per_group; ++i) {
        data.labels.push_back(i < n_per_group ? 0 : 1);
    }
    data.geometry = shifted_geometry(n_per_group, 0.5, 121);

    const DiscriminantModel model = fit(data, ops, 1e-6, 1e-2);
    CHECK(model.bivariate());
    CHECK(model.c_G->size() == 2 * n_per_group);
    CHECK(model.mean_field.has_value());

    const Eigen::VectorXd scores = training_scores(model, ops, data);
    CHECK(auc(scores, data.labels) > 0.99);

    // Held-out scoring path matches the batch path on a training sample.
    const Eigen::VectorXd row =
        pairing_row(model, *data.geometry, data.geometry->fields[3]);
    CHECK(score(model, ops, data.coeffs.row(3).transpose(), &row) ==
          doctest::Approx(scores[3]).epsilon(1e-10));
}

TEST_CASE("lambda1 = +inf removes the geometric component") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, -1.0);
    LabeledFunctionalData data = separable_data(mesh, 6, 0.5, 131);
    data.geometry = shifted_geometry(6, 0.3, 141);

    const double inf = std::numeric_limits<double>::infinity();
    const DiscriminantModel with_geo = fit(data, ops, 1e-4, 1e-3);
    const DiscriminantModel without = fit(data, ops, inf, 1e-3);
    CHECK(with_geo.bivariate());
    CHECK_FALSE(without.bivariate());

    LabeledFunctionalData plain = data;
    plain.geometry.reset();
    const DiscriminantModel reference = fit(plain, ops, std::nullopt, 1e-3);
    CHECK((without.c_F - reference.c_F).norm() < 1e-10 * reference.c_F.norm());
}

TEST_CASE("bivariate scoring demands a pairing row") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, -1.0);
    LabeledFunctionalData data = separable_data(mesh, 5, 0.5, 151);
    data.geometry = shifted_geometry(5, 0.3, 161);
    const DiscriminantModel model = fit(data, ops, 1e-4, 1e-3);
    CHECK_THROWS_AS(score(model, ops, data.coeffs.row(0).transpose()), MissingGeometry);
}

TEST_CASE("Youden threshold on separable scores") {
    Eigen::VectorXd scores(6);
    scores << 1, 2, 3, 10, 11, 12;
    const std::vector<int> labels = {0, 0, 0, 1, 1, 1};
    const ThresholdResult t =
        choose_threshold(scores, labels, ThresholdCriterion::Youden);
    CHECK_FALSE(t.degenerate);
    CHECK(t.value == doctest::Approx(6.5).epsilon(1e-14));
}

TEST_CASE("Youden threshold handles interleaved scores") {
    Eigen::VectorXd scores(8);
    scores << 0, 1, 2, 5, 3, 4, 6, 7;
    const std::vector<int> labels = {0, 0, 0, 0, 1, 1, 1, 1};
    const ThresholdResult t =
        choose_threshold(scores, labels, ThresholdCriterion::Youden);
    // Best split: t in (2,3) gives sens 1, spec 3/4.
    CHECK(t.value == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("tied scores are flagged degenerate") {
    const Eigen::VectorXd scores = Eigen::VectorXd::Constant(4, 1.5);
    const ThresholdResult t =
        choose_threshold(scores, {0, 0, 1, 1}, ThresholdCriterion::Youden);
    CHECK(t.degenerate);
}

TEST_CASE("fixed-specificity threshold") {
    Eigen::VectorXd scores(8);
    scores << 1, 2, 3, 4, 2.5, 3.5, 9, 10;
    const std::vector<int> labels = {0, 0, 0, 0, 1, 1, 1, 1};
    // Smallest g1 score with at least 75% of g1 at or below it is 3.
    const ThresholdResult t = choose_threshold(
        scores, labels, ThresholdCriterion::FixedSpecificity, 0.75);
    CHECK(t.value == doctest::Approx(3.0).epsilon(1e-14));
    // Demanding full specificity moves it to the g1 maximum.
    const ThresholdResult strict = choose_threshold(
        scores, labels, ThresholdCriterion::FixedSpecificity, 1.0);
    CHECK(strict.value == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("model JSON round trip") {
    const TriangleMesh mesh = icosphere(0, 1.0);
    const FemOperators ops = assemble_operators(mesh, -1.0);
    LabeledFunctionalData data;
    data.coeffs = random_matrix(8, ops.size(), 171);
    for (Eigen::Index i = 0; i < 8; ++i) data.labels.push_back(i < 4 ? 0 : 1);
    data.geometry = shifted_geometry(4, 0.4, 181);

    const DiscriminantModel model = fit(data, ops, 1e-3, 1e-2);
    const DiscriminantModel loaded = model_from_json(to_json(model));
    CHECK(loaded.lambda2 == model.lambda2);
    CHECK(loaded.epsilon == model.epsilon);
    CHECK(loaded.threshold == model.threshold);
    CHECK((loaded.c_F - model.c_F).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(loaded.c_G.has_value());
    CHECK((*loaded.c_G - *model.c_G).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(loaded.mean_field.has_value());
    CHECK((loaded.mean_field->momenta - model.mean_field->momenta).cwiseAbs().maxCoeff() ==
          0.0);

    CHECK_THROWS_AS(model_from_json("not json"), ParseError);
}
