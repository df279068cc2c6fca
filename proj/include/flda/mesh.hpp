#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "flda/errors.hpp"

namespace flda {

// Indexed triangle mesh. Vertices are rows of V, faces rows of F.
// Instances produced by this module are validated: indices in range,
// no degenerate faces, edge-manifold.
struct TriangleMesh {
    Eigen::MatrixX3d vertices;
    Eigen::MatrixX3i faces;

    Eigen::Index vertex_count() const { return vertices.rows(); }
    Eigen::Index face_count() const { return faces.rows(); }
    Eigen::Index edge_count() const;

    // V - E + F; 2 for connected closed genus-0 meshes.
    long euler_characteristic() const;

    Eigen::Vector3d centroid() const;
    // Root-sum-square of centered vertex coordinates.
    double centroid_size() const;
    double mean_edge_length() const;
};

enum class MeshFormat { OFF, OBJ };

// Throws ValidationError (with offending element index) on bad indices,
// degenerate faces, or non-manifold edges.
void validate_mesh(const TriangleMesh& mesh);

TriangleMesh load_mesh(const std::string& path, MeshFormat format);
// Format is inferred from the extension (.off / .obj), defaulting to OFF.
TriangleMesh load_mesh(const std::string& path);

// OFF only; 17 significant digits.
void save_mesh(const TriangleMesh& mesh, const std::string& path);

// Subdivided icosahedron projected to the given radius.
// V = 10*4^subdivisions + 2, F = 20*4^subdivisions.
TriangleMesh icosphere(int subdivisions, double radius);

struct ProcrustesResult {
    std::vector<TriangleMesh> aligned;
    TriangleMesh template_mesh;
    int iterations = 0;
    double final_change = 0.0;
};

// Classical GPA: remove translation, scale (centroid size) and rotation
// (no reflections), iterating alignment to the running mean until the
// mean shape moves less than tol.
ProcrustesResult generalized_procrustes(const std::vector<TriangleMesh>& meshes,
                                        double tol = 1e-10, int max_iter = 100);

}  // namespace flda
