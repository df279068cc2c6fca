#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "flda/classifier.hpp"
#include "flda/spectral.hpp"

namespace flda {

// Two-group synthetic functional data in a Laplace-Beltrami eigenbasis.
// Group 1: sum_j w_ij v_j; group 2 adds alpha * v_mean_index. The constant
// eigenfunction is excluded: v_1..v_L are eigenfunctions 2..L+1 of the
// basis. sigma_j defaults to j^-1.
struct SimConfig {
    int icosphere_level = 3;
    double radius = 1.0;
    int basis_size = 40;     // L
    int mean_index = 10;     // mu = v_mean_index
    double alpha = 0.2;
    Eigen::Index n_per_group = 128;
    Eigen::VectorXd sigma;   // length L, positive non-increasing; empty -> j^-1
    uint64_t seed = 0;
};

// Fills sigma with j^-1 if empty; validates the schedule.
SimConfig resolve_config(SimConfig config);

// 2n samples (group 1 then group 2, labels 0/1), scores drawn from the
// counter-based generator keyed by (seed, group, sample, mode).
LabeledFunctionalData generate_dataset(const SimConfig& config, const EigenBasis& basis);

// n random momenta fields at farthest-point-sampled control points;
// class_shift, when present, is added to the last n/2 fields.
GeometrySet generate_geometry(Eigen::Index n, const TriangleMesh& template_mesh,
                              const KernelSpec& spec, double momentum_scale,
                              const std::optional<VectorFieldRepr>& class_shift,
                              uint64_t seed, Eigen::Index control_points = 32);

// CSV: one row per sample, "label,c_1,...,c_s" with 17 significant digits.
void save_dataset_csv(const LabeledFunctionalData& data, const std::string& path);
LabeledFunctionalData load_dataset_csv(const std::string& path);

std::string to_json(const SimConfig& config);

}  // namespace flda
