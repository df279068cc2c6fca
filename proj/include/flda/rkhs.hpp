#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "flda/mesh.hpp"

namespace flda {

// Gaussian kernel exp(-|p-q|^2 / sigma^2) times the 3x3 identity.
struct KernelSpec {
    double sigma = 1.0;

    bool operator==(const KernelSpec&) const = default;
};

// Smooth vector field v(.) = sum_k K(x_k, .) a_k with control points x_k
// and momenta a_k.
struct VectorFieldRepr {
    Eigen::MatrixX3d control_points;
    Eigen::MatrixX3d momenta;
    KernelSpec kernel;

    Eigen::Vector3d evaluate(const Eigen::Vector3d& p) const;
    double squared_norm() const;  // RKHS norm^2 = sum_kl a_k' K(x_k,x_l) a_l
};

// n fields sharing one kernel, with the precomputed pairing matrix Sigma.
struct GeometrySet {
    std::vector<VectorFieldRepr> fields;
    Eigen::MatrixXd gram;  // n x n symmetric PSD

    Eigen::Index size() const { return static_cast<Eigen::Index>(fields.size()); }
};

double kernel_eval(const KernelSpec& spec, const Eigen::Vector3d& p,
                   const Eigen::Vector3d& q);

// Pairing of two momenta fields: sum_kl a_k^i' K(x_k^i, x_l^j) a_l^j.
double field_pairing(const VectorFieldRepr& a, const VectorFieldRepr& b);

// Sigma_ij = field_pairing(fields[i], fields[j]). Throws KernelMismatch
// if the fields do not share a kernel.
Eigen::MatrixXd gram_matrix(const std::vector<VectorFieldRepr>& fields);

// 0.2 x bounding-box diagonal of the template.
double default_bandwidth(const TriangleMesh& mesh);

// Greedy farthest-point subset of the rows of points; starts from row 0.
std::vector<Eigen::Index> farthest_point_sample(const Eigen::MatrixX3d& points,
                                                Eigen::Index count);

// Kernel ridge fit of the displacement field target - template on a
// farthest-point subsample of the template landmarks: (K + lambda I) A = dX.
VectorFieldRepr register_small_deformation(const Eigen::MatrixX3d& template_points,
                                           const Eigen::MatrixX3d& target_points,
                                           const KernelSpec& spec, double lambda,
                                           Eigen::Index subsample);

// Forward Euler integration of dx/dt = v(x) from t=0 to t=1 on the mesh
// vertices, field held stationary. Connectivity unchanged.
TriangleMesh flow_deform(const TriangleMesh& mesh, const VectorFieldRepr& field,
                         int steps);

std::string to_json(const VectorFieldRepr& field);
VectorFieldRepr vector_field_from_json(const std::string& text);

}  // namespace flda
