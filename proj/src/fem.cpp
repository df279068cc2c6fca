#include "flda/fem.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

namespace flda {

namespace {

using Triplet = Eigen::Triplet<double>;

double triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                     const Eigen::Vector3d& c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

}  // namespace

SparseMatrix assemble_mass(const TriangleMesh& mesh) {
    const Eigen::Index s = mesh.vertex_count();
    std::vector<Triplet> trips;
    trips.reserve(9 * mesh.face_count());
    for (Eigen::Index f = 0; f < mesh.face_count(); ++f) {
        const int i = mesh.faces(f, 0), j = mesh.faces(f, 1), k = mesh.faces(f, 2);
        const double area = triangle_area(mesh.vertices.row(i), mesh.vertices.row(j),
                                          mesh.vertices.row(k));
        const double off = area / 12.0;
        const double diag = area / 6.0;
        const int idx[3] = {i, j, k};
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                trips.emplace_back(idx[a], idx[b], a == b ? diag : off);
            }
        }
    }
    SparseMatrix m(s, s);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

SparseMatrix assemble_stiffness(const TriangleMesh& mesh) {
    const Eigen::Index s = mesh.vertex_count();
    const double mel = mesh.mean_edge_length();
    const double area_floor = 1e-12 * mel * mel;

    std::vector<Triplet> trips;
    trips.reserve(9 * mesh.face_count());
    for (Eigen::Index f = 0; f < mesh.face_count(); ++f) {
        const int i = mesh.faces(f, 0), j = mesh.faces(f, 1), k = mesh.faces(f, 2);
        const Eigen::Vector3d p0 = mesh.vertices.row(i);
        const Eigen::Vector3d p1 = mesh.vertices.row(j);
        const Eigen::Vector3d p2 = mesh.vertices.row(k);
        const double area = triangle_area(p0, p1, p2);
        if (!(area > area_floor)) {
            throw DegenerateTriangle("stiffness: triangle " + std::to_string(f) +
                                     " area below threshold");
        }
        // Local orthonormal 2D frame in the triangle plane.
        const Eigen::Vector3d e1 = p1 - p0;
        const Eigen::Vector3d u = e1.normalized();
        const Eigen::Vector3d normal = e1.cross(p2 - p0).normalized();
        const Eigen::Vector3d w = normal.cross(u);
        const Eigen::Vector2d q0(0.0, 0.0);
        const Eigen::Vector2d q1(e1.dot(u), 0.0);
        const Eigen::Vector2d q2((p2 - p0).dot(u), (p2 - p0).dot(w));
        // Barycentric gradient of vertex a is the rotated opposite edge / 2A.
        auto grad = [&](const Eigen::Vector2d& opp_a,
                        const Eigen::Vector2d& opp_b) -> Eigen::Vector2d {
            const Eigen::Vector2d edge = opp_b - opp_a;
            return Eigen::Vector2d(-edge.y(), edge.x()) / (2.0 * area);
        };
        const Eigen::Vector2d g[3] = {grad(q1, q2), grad(q2, q0), grad(q0, q1)};
        const int idx[3] = {i, j, k};
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                trips.emplace_back(idx[a], idx[b], area * g[a].dot(g[b]));
            }
        }
    }
    SparseMatrix m(s, s);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

FemOperators assemble_operators(const TriangleMesh& mesh, double epsilon) {
    FemOperators ops;
    ops.mass = assemble_mass(mesh);
    ops.stiffness = assemble_stiffness(mesh);
    ops.lumped_mass_diag = ops.mass * Eigen::VectorXd::Ones(ops.mass.cols());
    if (epsilon < 0) {
        double tr_s = 0.0, tr_m = 0.0;
        for (Eigen::Index i = 0; i < ops.mass.rows(); ++i) {
            tr_s += ops.stiffness.coeff(i, i);
            tr_m += ops.mass.coeff(i, i);
        }
        ops.epsilon = 1e-3 * tr_s / tr_m;
    } else {
        ops.epsilon = epsilon;
    }
    return ops;
}

Eigen::VectorXd penalty_apply(const FemOperators& ops, const Eigen::VectorXd& c) {
    if (c.size() != ops.size()) {
        throw DimensionMismatch("penalty_apply: vector length " + std::to_string(c.size()) +
                                " vs operator size " + std::to_string(ops.size()));
    }
    Eigen::VectorXd sc = ops.stiffness * c;
    sc.array() /= ops.lumped_mass_diag.array();
    return ops.stiffness * sc + ops.epsilon * (ops.mass * c);
}

double penalty_value(const FemOperators& ops, const Eigen::VectorXd& c) {
    return c.dot(penalty_apply(ops, c));
}

double l2_inner(const FemOperators& ops, const Eigen::VectorXd& a,
                const Eigen::VectorXd& b) {
    if (a.size() != ops.size() || b.size() != ops.size()) {
        throw DimensionMismatch("l2_inner: dimension mismatch");
    }
    return a.dot(ops.mass * b);
}

void save_matrix_market(const SparseMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    long nnz_lower = 0;
    for (int r = 0; r < m.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
            if (it.col() <= it.row()) ++nnz_lower;
        }
    }
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << m.rows() << " " << m.cols() << " " << nnz_lower << "\n";
    char buf[64];
    for (int r = 0; r < m.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
            if (it.col() > it.row()) continue;
            std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n",
                          static_cast<long>(it.row()) + 1, static_cast<long>(it.col()) + 1,
                          it.value());
            out << buf;
        }
    }
}

}  // namespace flda
