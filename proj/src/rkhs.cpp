#include "flda/rkhs.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace flda {

double kernel_eval(const KernelSpec& spec, const Eigen::Vector3d& p,
                   const Eigen::Vector3d& q) {
    const double d2 = (p - q).squaredNorm();
    return std::exp(-d2 / (spec.sigma * spec.sigma));
}

Eigen::Vector3d VectorFieldRepr::evaluate(const Eigen::Vector3d& p) const {
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    for (Eigen::Index k = 0; k < control_points.rows(); ++k) {
        v += kernel_eval(kernel, control_points.row(k), p) * momenta.row(k).transpose();
    }
    return v;
}

double field_pairing(const VectorFieldRepr& a, const VectorFieldRepr& b) {
    if (!(a.kernel == b.kernel)) {
        throw KernelMismatch("field_pairing: fields use different kernels");
    }
    double total = 0.0;
    for (Eigen::Index k = 0; k < a.control_points.rows(); ++k) {
        for (Eigen::Index l = 0; l < b.control_points.rows(); ++l) {
            total += kernel_eval(a.kernel, a.control_points.row(k), b.control_points.row(l)) *
                     a.momenta.row(k).dot(b.momenta.row(l));
        }
    }
    return total;
}

double VectorFieldRepr::squared_norm() const { return field_pairing(*this, *this); }

Eigen::MatrixXd gram_matrix(const std::vector<VectorFieldRepr>& fields) {
    const Eigen::Index n = static_cast<Eigen::Index>(fields.size());
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = field_pairing(fields[i], fields[j]);
            gram(i, j) = v;
            gram(j, i) = v;
        }
    }
    return gram;
}

double default_bandwidth(const TriangleMesh& mesh) {
    const Eigen::Vector3d lo = mesh.vertices.colwise().minCoeff();
    const Eigen::Vector3d hi = mesh.vertices.colwise().maxCoeff();
    return 0.2 * (hi - lo).norm();
}

std::vector<Eigen::Index> farthest_point_sample(const Eigen::MatrixX3d& points,
                                                Eigen::Index count) {
    const Eigen::Index n = points.rows();
    if (count < 1 || count > n) {
        throw DimensionMismatch("farthest_point_sample: count out of range");
    }
    std::vector<Eigen::Index> chosen;
    chosen.reserve(count);
    Eigen::VectorXd dist =
        Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    Eigen::Index current = 0;
    chosen.push_back(current);
    for (Eigen::Index step = 1; step < count; ++step) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = (points.row(i) - points.row(current)).squaredNorm();
            if (d < dist[i]) dist[i] = d;
        }
        Eigen::Index best = 0;
        double best_d = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (dist[i] > best_d) {
                best_d = dist[i];
                best = i;
            }
        }
        current = best;
        chosen.push_back(current);
    }
    return chosen;
}

VectorFieldRepr register_small_deformation(const Eigen::MatrixX3d& template_points,
                                           const Eigen::MatrixX3d& target_points,
                                           const KernelSpec& spec, double lambda,
                                           Eigen::Index subsample) {
    if (template_points.rows() != target_points.rows()) {
        throw DimensionMismatch("register_small_deformation: point counts differ");
    }
    if (lambda < 0) throw DataError("register_small_deformation: lambda < 0");
    const auto picked = farthest_point_sample(template_points, subsample);
    const Eigen::Index m = static_cast<Eigen::Index>(picked.size());

    Eigen::MatrixX3d ctrl(m, 3), delta(m, 3);
    for (Eigen::Index i = 0; i < m; ++i) {
        ctrl.row(i) = template_points.row(picked[i]);
        delta.row(i) = target_points.row(picked[i]) - template_points.row(picked[i]);
    }

    Eigen::MatrixXd kmat(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = kernel_eval(spec, ctrl.row(i), ctrl.row(j));
            kmat(i, j) = v;
            kmat(j, i) = v;
        }
    }
    kmat.diagonal().array() += lambda;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(kmat);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw SingularSystem("register_small_deformation: kernel system singular "
                             "(duplicate control points with lambda = 0?)");
    }
    Eigen::MatrixX3d momenta = ldlt.solve(delta);
    if (!momenta.allFinite() ||
        (kmat * momenta - delta).norm() > 1e-8 * (delta.norm() + 1.0)) {
        throw SingularSystem("register_small_deformation: kernel system singular "
                             "(duplicate control points with lambda = 0?)");
    }
    return VectorFieldRepr{ctrl, momenta, spec};
}

TriangleMesh flow_deform(const TriangleMesh& mesh, const VectorFieldRepr& field,
                         int steps) {
    if (steps < 1) throw DataError("flow_deform: steps must be >= 1");
    const double dt = 1.0 / static_cast<double>(steps);
    TriangleMesh out = mesh;
    for (int t = 0; t < steps; ++t) {
        for (Eigen::Index v = 0; v < out.vertex_count(); ++v) {
            out.vertices.row(v) +=
                dt * field.evaluate(out.vertices.row(v)).transpose();
        }
    }
    return out;
}

std::string to_json(const VectorFieldRepr& field) {
    nlohmann::json j;
    j["kernel"] = {{"family", "Gaussian"}, {"sigma", field.kernel.sigma}};
    auto points = nlohmann::json::array();
    auto momenta = nlohmann::json::array();
    for (Eigen::Index k = 0; k < field.control_points.rows(); ++k) {
        points.push_back({field.control_points(k, 0), field.control_points(k, 1),
                          field.control_points(k, 2)});
        momenta.push_back({field.momenta(k, 0), field.momenta(k, 1), field.momenta(k, 2)});
    }
    j["control_points"] = std::move(points);
    j["momenta"] = std::move(momenta);
    return j.dump();
}

VectorFieldRepr vector_field_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("vector field JSON: ") + e.what());
    }
    VectorFieldRepr field;
    field.kernel.sigma = j.at("kernel").at("sigma").get<double>();
    const auto& points = j.at("control_points");
    const auto& momenta = j.at("momenta");
    if (points.size() != momenta.size()) {
        throw ParseError("vector field JSON: control point / momenta count mismatch");
    }
    const Eigen::Index m = static_cast<Eigen::Index>(points.size());
    field.control_points.resize(m, 3);
    field.momenta.resize(m, 3);
    for (Eigen::Index k = 0; k < m; ++k) {
        for (int d = 0; d < 3; ++d) {
            field.control_points(k, d) = points[k][d].get<double>();
            field.momenta(k, d) = momenta[k][d].get<double>();
        }
    }
    return field;
}

}  // namespace flda
