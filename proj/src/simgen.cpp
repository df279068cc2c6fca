#include "flda/simgen.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flda/rng.hpp"

namespace flda {

SimConfig resolve_config(SimConfig config) {
    if (config.basis_size < 1) throw DataError("sim config: basis size must be >= 1");
    if (config.mean_index < 1 || config.mean_index > config.basis_size) {
        throw DataError("sim config: mean index out of range");
    }
    if (config.alpha < 0) throw DataError("sim config: alpha must be >= 0");
    if (config.n_per_group < 1) throw DataError("sim config: n must be >= 1");
    if (config.sigma.size() == 0) {
        config.sigma.resize(config.basis_size);
        for (int j = 0; j < config.basis_size; ++j) {
            config.sigma[j] = 1.0 / static_cast<double>(j + 1);
        }
    }
    if (config.sigma.size() != config.basis_size) {
        throw DataError("sim config: sigma schedule length");
    }
    for (Eigen::Index j = 0; j < config.sigma.size(); ++j) {
        if (!(config.sigma[j] > 0)) throw DataError("sim config: sigma must be positive");
        if (j > 0 && config.sigma[j] > config.sigma[j - 1]) {
            throw DataError("sim config: sigma must be non-increasing");
        }
    }
    return config;
}

LabeledFunctionalData generate_dataset(const SimConfig& raw, const EigenBasis& basis) {
    const SimConfig config = resolve_config(raw);
    const int big_l = config.basis_size;
    // Skip the constant mode: modes used are basis columns 1..L.
    if (basis.size() < big_l + 1) {
        throw BasisTooSmall("generate_dataset: need " + std::to_string(big_l + 1) +
                            " eigenfunctions, have " + std::to_string(basis.size()));
    }
    const Eigen::Index n = config.n_per_group;
    const Eigen::Index s = basis.eigenvectors.rows();

    LabeledFunctionalData data;
    data.coeffs.resize(2 * n, s);
    data.labels.resize(2 * n);
    for (int group = 0; group < 2; ++group) {
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXd modal(big_l);
            for (int j = 0; j < big_l; ++j) {
                modal[j] = config.sigma[j] *
                           counter_normal(draw_key(config.seed, group, i, j));
            }
            if (group == 1) modal[config.mean_index - 1] += config.alpha;
            data.coeffs.row(group * n + i) =
                (basis.eigenvectors.middleCols(1, big_l) * modal).transpose();
            data.labels[group * n + i] = group;
        }
    }
    return data;
}

GeometrySet generate_geometry(Eigen::Index n, const TriangleMesh& template_mesh,
                              const KernelSpec& spec, double momentum_scale,
                              const std::optional<VectorFieldRepr>& class_shift,
                              uint64_t seed, Eigen::Index control_points) {
    if (momentum_scale < 0) throw DataError("generate_geometry: momentum_scale < 0");
    const auto picked = farthest_point_sample(template_mesh.vertices, control_points);
    Eigen::MatrixX3d ctrl(control_points, 3);
    for (Eigen::Index i = 0; i < control_points; ++i) {
        ctrl.row(i) = template_mesh.vertices.row(picked[i]);
    }
    if (class_shift.has_value() &&
        (class_shift->control_points.rows() != control_points ||
         !(class_shift->kernel == spec))) {
        throw KernelMismatch("generate_geometry: class shift structure mismatch");
    }

    GeometrySet set;
    set.fields.reserve(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::MatrixX3d momenta(control_points, 3);
        for (Eigen::Index k = 0; k < control_points; ++k) {
            for (int d = 0; d < 3; ++d) {
                momenta(k, d) =
                    momentum_scale * counter_normal(draw_key(seed, i, k, d));
            }
        }
        if (class_shift.has_value() && i >= n / 2) momenta += class_shift->momenta;
        set.fields.push_back(VectorFieldRepr{ctrl, momenta, spec});
    }
    set.gram = gram_matrix(set.fields);
    return set;
}

void save_dataset_csv(const LabeledFunctionalData& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    char buf[48];
    for (Eigen::Index i = 0; i < data.sample_count(); ++i) {
        out << data.labels[i];
        for (Eigen::Index j = 0; j < data.coeffs.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), ",%.17g", data.coeffs(i, j));
            out << buf;
        }
        out << "\n";
    }
}

LabeledFunctionalData load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        if (!std::getline(ss, cell, ',')) throw ParseError(path + ": empty row");
        labels.push_back(std::stoi(cell));
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError(path + ": ragged rows");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path + ": no data rows");
    LabeledFunctionalData data;
    data.labels = std::move(labels);
    data.coeffs.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(rows.front().size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = 0; j < rows[i].size(); ++j) data.coeffs(i, j) = rows[i][j];
    }
    return data;
}

std::string to_json(const SimConfig& raw) {
    const SimConfig config = resolve_config(raw);
    nlohmann::json j;
    j["icosphere_level"] = config.icosphere_level;
    j["radius"] = config.radius;
    j["basis_size"] = config.basis_size;
    j["mean_index"] = config.mean_index;
    j["alpha"] = config.alpha;
    j["n_per_group"] = config.n_per_group;
    j["sigma"] = std::vector<double>(config.sigma.data(),
                                     config.sigma.data() + config.sigma.size());
    j["seed"] = config.seed;
    return j.dump();
}

}  // namespace flda
