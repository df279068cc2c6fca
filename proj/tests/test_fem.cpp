#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "flda/fem.hpp"
#include "flda/rng.hpp"
#include "flda/mesh.hpp"

using namespace flda;

namespace {

TriangleMesh right_triangle() {
    TriangleMesh mesh;
    mesh.vertices.resize(3, 3);
    mesh.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0;
    mesh.faces.resize(1, 3);
    mesh.faces << 0, 1, 2;
    return mesh;
}

Eigen::VectorXd random_vector(Eigen::Index n, uint64_t seed) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = counter_normal(draw_key(seed, i));
    return v;
}

}  // namespace

TEST_CASE("mass matrix on a single right triangle") {
    const SparseMatrix m = assemble_mass(right_triangle());
    Eigen::Matrix3d expected;
    expected << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    expected /= 24.0;
    CHECK((Eigen::MatrixXd(m) - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("stiffness matrix on a single right triangle") {
    const SparseMatrix s = assemble_stiffness(right_triangle());
    Eigen::Matrix3d expected;
    expected << 1, -0.5, -0.5, -0.5, 0.5, 0, -0.5, 0, 0.5;
    CHECK((Eigen::MatrixXd(s) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("mass entries sum to surface area; sphere approaches 4 pi") {
    const TriangleMesh mesh = icosphere(3, 1.0);
    const SparseMatrix m = assemble_mass(mesh);
    const double total = Eigen::MatrixXd(m).sum();
    CHECK(total == doctest::Approx(4.0 * std::numbers::pi).epsilon(0.005));
}

TEST_CASE("stiffness row sums vanish and the matrix is symmetric PSD") {
    const TriangleMesh mesh = icosphere(2, 1.0);
    const SparseMatrix s = assemble_stiffness(mesh);
    const Eigen::VectorXd row_sums = s * Eigen::VectorXd::Ones(s.cols());
    CHECK(row_sums.cwiseAbs().maxCoeff() < 1e-10);

    const Eigen::MatrixXd dense(s);
    CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() < 1e-12 * dense.cwiseAbs().maxCoeff());

    const Eigen::VectorXd z = mesh.vertices.col(2);
    CHECK(z.dot(dense * z) > 0);
}

TEST_CASE("stiffness rejects degenerate triangles") {
    TriangleMesh mesh = right_triangle();
    mesh.vertices.row(2) = mesh.vertices.row(1);  // collapse
    mesh.vertices(2, 0) += 1e-16;
    CHECK_THROWS_AS(assemble_stiffness(mesh), DegenerateTriangle);
}

TEST_CASE("lumped mass preserves total mass") {
    const TriangleMesh mesh = icosphere(2, 1.0);
    const FemOperators ops = assemble_operators(mesh, 0.0);
    const double lumped_total = ops.lumped_mass_diag.sum();
    const double full_total = Eigen::MatrixXd(ops.mass).sum();
    CHECK(lumped_total == doctest::Approx(full_total).epsilon(1e-12));
    CHECK((ops.lumped_mass_diag.array() > 0).all());
}

TEST_CASE("penalty annihilates constants when eps = 0") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, 0.0);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(ops.size());
    CHECK(penalty_apply(ops, ones).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("penalty with eps = 1 on constants reduces to M 1") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, 1.0);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(ops.size());
    const Eigen::VectorXd expected = ops.mass * ones;
    CHECK((penalty_apply(ops, ones) - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("penalty matches dense oracle on random input") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, 0.37);
    const Eigen::VectorXd c = random_vector(ops.size(), 11);

    const Eigen::MatrixXd s(ops.stiffness);
    const Eigen::MatrixXd m(ops.mass);
    const Eigen::MatrixXd dense_penalty =
        s * ops.lumped_mass_diag.cwiseInverse().asDiagonal() * s + ops.epsilon * m;
    CHECK((penalty_apply(ops, c) - dense_penalty * c).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("penalty quadratic form is PSD, zero only on constants") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const FemOperators ops = assemble_operators(mesh, 0.0);
    for (uint64_t seed = 0; seed < 8; ++seed) {
        const Eigen::VectorXd c = random_vector(ops.size(), 100 + seed);
        CHECK(penalty_value(ops, c) >= 0.0);
    }
    const Eigen::VectorXd nonconst = random_vector(ops.size(), 5);
    CHECK(penalty_value(ops, nonconst) > 1e-6);
}

TEST_CASE("l2 inner product") {
    const TriangleMesh tri = right_triangle();
    const FemOperators ops = assemble_operators(tri, 0.0);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
    CHECK(l2_inner(ops, ones, ones) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(l2_inner(ops, Eigen::VectorXd::Zero(3), ones) == 0.0);

    const TriangleMesh sphere = icosphere(3, 1.0);
    const FemOperators sops = assemble_operators(sphere, 0.0);
    const Eigen::VectorXd s_ones = Eigen::VectorXd::Ones(sops.size());
    CHECK(l2_inner(sops, s_ones, s_ones) ==
          doctest::Approx(4.0 * std::numbers::pi).epsilon(0.005));

    CHECK_THROWS_AS(l2_inner(ops, Eigen::VectorXd::Zero(2), ones), DimensionMismatch);
}

TEST_CASE("assembly is permutation-equivariant") {
    const TriangleMesh mesh = icosphere(1, 1.0);
    const Eigen::Index s = mesh.vertex_count();

    // Deterministic permutation: reverse order.
    std::vector<int> perm(s);
    for (Eigen::Index i = 0; i < s; ++i) perm[i] = static_cast<int>(s - 1 - i);

    TriangleMesh permuted;
    permuted.vertices.resize(s, 3);
    for (Eigen::Index i = 0; i < s; ++i) permuted.vertices.row(perm[i]) = mesh.vertices.row(i);
    permuted.faces = mesh.faces;
    for (Eigen::Index f = 0; f < mesh.face_count(); ++f) {
        for (int k = 0; k < 3; ++k) permuted.faces(f, k) = perm[mesh.faces(f, k)];
    }

    const Eigen::MatrixXd m_orig(assemble_mass(mesh));
    const Eigen::MatrixXd m_perm(assemble_mass(permuted));
    const Eigen::MatrixXd s_orig(assemble_stiffness(mesh));
    const Eigen::MatrixXd s_perm(assemble_stiffness(permuted));
    for (Eigen::Index i = 0; i < s; ++i) {
        for (Eigen::Index j = 0; j < s; ++j) {
            CHECK(m_perm(perm[i], perm[j]) == doctest::Approx(m_orig(i, j)).epsilon(1e-14));
            CHECK(s_perm(perm[i], perm[j]) == doctest::Approx(s_orig(i, j)).epsilon(1e-12));
        }
    }
}

TEST_CASE("Rayleigh quotient of degree-1 spherical harmonics is near 2") {
    const TriangleMesh mesh = icosphere(3, 1.0);
    const FemOperators ops = assemble_operators(mesh, 0.0);
    for (int axis = 0; axis < 3; ++axis) {
        const Eigen::VectorXd c = mesh.vertices.col(axis);
        const double rayleigh = c.dot(ops.stiffness * c) / c.dot(ops.mass * c);
        CHECK(rayleigh == doctest::Approx(2.0).epsilon(0.02));
    }
}

TEST_CASE("matrix market export") {
    const TriangleMesh tri = right_triangle();
    const SparseMatrix m = assemble_mass(tri);
    const auto path =
        (std::filesystem::temp_directory_path() / "flda_m.mtx").string();
    save_matrix_market(m, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real symmetric");
    std::remove(path.c_str());
}
