#include "flda/classifier.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace flda {

Eigen::VectorXd encode_labels(const std::vector<int>& labels) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    Eigen::Index n1 = 0, n2 = 0;
    for (int g : labels) {
        if (g == 0) ++n1;
        else if (g == 1) ++n2;
        else throw DataError("encode_labels: labels must be 0 or 1");
    }
    if (n1 == 0 || n2 == 0) {
        throw SingleClassError("encode_labels: both classes must be present");
    }
    Eigen::VectorXd y(n);
    const double y1 = -static_cast<double>(n) / static_cast<double>(n1);
    const double y2 = static_cast<double>(n) / static_cast<double>(n2);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[i] == 0 ? y1 : y2;
    return y;
}

namespace {

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("symmetric_sqrt: eigendecomposition failed");
    }
    const double floor = -1e-10 * std::abs(m.trace());
    Eigen::VectorXd vals = eig.eigenvalues();
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals[i] < floor) {
            throw NumericalError("symmetric_sqrt: matrix is not PSD (eigenvalue " +
                                 std::to_string(vals[i]) + ")");
        }
        vals[i] = vals[i] > 0 ? std::sqrt(vals[i]) : 0.0;
    }
    return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

AugmentedSystem::AugmentedSystem(const Eigen::MatrixXd& centered_coeffs,
                                 const FemOperators& ops, std::optional<double> lambda1,
                                 double lambda2, const Eigen::MatrixXd* gram)
    : coeffs_(centered_coeffs), ops_(ops), gram_(gram) {
    if (centered_coeffs.cols() != ops.size()) {
        throw DimensionMismatch("AugmentedSystem: coefficient columns vs mesh size");
    }
    if (!(lambda2 > 0)) throw NonPositivePenalty("AugmentedSystem: lambda2 must be > 0");
    if (gram_ != nullptr) {
        if (!lambda1.has_value()) {
            throw DataError("AugmentedSystem: lambda1 required with geometry");
        }
        if (*lambda1 < 0) throw NonPositivePenalty("AugmentedSystem: lambda1 < 0");
        if (gram_->rows() != centered_coeffs.rows() || gram_->cols() != gram_->rows()) {
            throw DimensionMismatch("AugmentedSystem: gram matrix shape");
        }
        sqrt_l1_ = std::sqrt(*lambda1);
        gram_sqrt_ = symmetric_sqrt(*gram_);
    }
    sqrt_l2_ = std::sqrt(lambda2);
    sqrt_l2e_ = std::sqrt(lambda2 * ops.epsilon);
    inv_sqrt_lumped_ = ops.lumped_mass_diag.cwiseSqrt().cwiseInverse();
    mass_chol_.compute(Eigen::SparseMatrix<double>(ops.mass));
    if (mass_chol_.info() != Eigen::Success) {
        throw NumericalError("AugmentedSystem: mass Cholesky failed");
    }
}

Eigen::Index AugmentedSystem::rows() const {
    const Eigen::Index n = coeffs_.rows(), s = ops_.size();
    return bivariate() ? n + 2 * s + n : n + 2 * s;
}

Eigen::Index AugmentedSystem::cols() const {
    return bivariate() ? coeffs_.rows() + ops_.size() : ops_.size();
}

// R c with R'R = M, via the permuted sparse factor: R = L' P.
Eigen::VectorXd AugmentedSystem::mass_sqrt(const Eigen::VectorXd& c) const {
    Eigen::VectorXd permuted = mass_chol_.permutationP() * c;
    return mass_chol_.matrixU() * permuted;
}

Eigen::VectorXd AugmentedSystem::mass_sqrt_transpose(const Eigen::VectorXd& c) const {
    Eigen::VectorXd lower = mass_chol_.matrixL() * c;
    return mass_chol_.permutationPinv() * lower;
}

Eigen::VectorXd AugmentedSystem::apply(const Eigen::VectorXd& x) const {
    if (x.size() != cols()) throw DimensionMismatch("AugmentedSystem::apply");
    const Eigen::Index n = coeffs_.rows(), s = ops_.size();
    Eigen::VectorXd out(rows());
    const Eigen::VectorXd c_f = bivariate() ? x.tail(s).eval() : x;

    Eigen::VectorXd fit = coeffs_ * (ops_.mass * c_f);
    if (bivariate()) fit += (*gram_) * x.head(n);
    out.head(n) = fit;
    out.segment(n, s) =
        sqrt_l2_ * (inv_sqrt_lumped_.asDiagonal() * (ops_.stiffness * c_f));
    out.segment(n + s, s) = sqrt_l2e_ * mass_sqrt(c_f);
    if (bivariate()) out.tail(n) = sqrt_l1_ * (gram_sqrt_ * x.head(n));
    return out;
}

Eigen::VectorXd AugmentedSystem::apply_transpose(const Eigen::VectorXd& y) const {
    if (y.size() != rows()) throw DimensionMismatch("AugmentedSystem::apply_transpose");
    const Eigen::Index n = coeffs_.rows(), s = ops_.size();
    Eigen::VectorXd grad_f =
        ops_.mass * (coeffs_.transpose() * y.head(n)) +
        sqrt_l2_ * (ops_.stiffness * (inv_sqrt_lumped_.asDiagonal() * y.segment(n, s))) +
        sqrt_l2e_ * mass_sqrt_transpose(y.segment(n + s, s));
    if (!bivariate()) return grad_f;

    Eigen::VectorXd out(cols());
    out.head(n) = (*gram_) * y.head(n) + sqrt_l1_ * (gram_sqrt_ * y.tail(n));
    out.tail(s) = grad_f;
    return out;
}

Eigen::VectorXd AugmentedSystem::rhs(const Eigen::VectorXd& y) const {
    if (y.size() != coeffs_.rows()) throw DimensionMismatch("AugmentedSystem::rhs");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(rows());
    b.head(y.size()) = y;
    return b;
}

namespace {

// Momenta-wise mean; all fields must share control-point structure.
VectorFieldRepr mean_field_of(const std::vector<VectorFieldRepr>& fields) {
    VectorFieldRepr mean = fields[0];
    for (size_t i = 1; i < fields.size(); ++i) {
        if (fields[i].control_points.rows() != mean.control_points.rows() ||
            !(fields[i].kernel == mean.kernel)) {
            throw KernelMismatch("mean field: control structures differ");
        }
        mean.momenta += fields[i].momenta;
    }
    mean.momenta /= static_cast<double>(fields.size());
    return mean;
}

std::vector<VectorFieldRepr> center_fields(const std::vector<VectorFieldRepr>& fields,
                                           const VectorFieldRepr& mean) {
    std::vector<VectorFieldRepr> centered = fields;
    for (auto& f : centered) f.momenta -= mean.momenta;
    return centered;
}

}  // namespace

DiscriminantModel fit(const LabeledFunctionalData& data, const FemOperators& ops,
                      std::optional<double> lambda1, double lambda2,
                      const SolverConfig& config) {
    const Eigen::Index n = data.sample_count(), s = ops.size();
    if (static_cast<Eigen::Index>(data.labels.size()) != n) {
        throw DimensionMismatch("fit: label count vs sample count");
    }
    const Eigen::VectorXd y = encode_labels(data.labels);

    DiscriminantModel model;
    model.lambda2 = lambda2;
    model.epsilon = ops.epsilon;
    model.mean_coeffs = data.coeffs.colwise().mean().transpose();
    Eigen::MatrixXd centered = data.coeffs.rowwise() - model.mean_coeffs.transpose();

    // lambda1 = +inf is the structural removal of the geometric component.
    const bool use_geometry = data.geometry.has_value() &&
                              !(lambda1.has_value() && std::isinf(*lambda1));
    Eigen::MatrixXd gram;
    if (use_geometry) {
        if (data.geometry->size() != n) {
            throw DimensionMismatch("fit: geometry count vs sample count");
        }
        model.mean_field = mean_field_of(data.geometry->fields);
        gram = gram_matrix(center_fields(data.geometry->fields, *model.mean_field));
        model.lambda1 = lambda1;
    }

    AugmentedSystem system(centered, ops, use_geometry ? lambda1 : std::nullopt, lambda2,
                           use_geometry ? &gram : nullptr);
    LsqrResult sol = lsqr_solve(system, system.rhs(y), config.tol, config.max_iter);
    model.solver = {sol.iterations, sol.residual_norm, sol.converged};

    if (use_geometry) {
        model.c_G = sol.x.head(n);
        model.c_F = sol.x.tail(s);
    } else {
        model.c_F = sol.x;
    }

    const Eigen::VectorXd scores = training_scores(model, ops, data);
    model.threshold =
        choose_threshold(scores, data.labels, ThresholdCriterion::Youden).value;
    return model;
}

double score(const DiscriminantModel& model, const FemOperators& ops,
             const Eigen::VectorXd& x_new, const Eigen::VectorXd* pairing) {
    if (x_new.size() != model.c_F.size()) throw DimensionMismatch("score: coefficient length");
    double value = (x_new - model.mean_coeffs).dot(ops.mass * model.c_F);
    if (model.bivariate()) {
        if (pairing == nullptr) {
            throw MissingGeometry("score: bivariate model requires a pairing row");
        }
        if (pairing->size() != model.c_G->size()) {
            throw DimensionMismatch("score: pairing row length");
        }
        value += pairing->dot(*model.c_G);
    }
    return value;
}

Eigen::VectorXd pairing_row(const DiscriminantModel& model, const GeometrySet& training,
                            const VectorFieldRepr& v_new) {
    if (!model.bivariate() || !model.mean_field.has_value()) {
        throw MissingGeometry("pairing_row: model has no geometric component");
    }
    VectorFieldRepr centered_new = v_new;
    centered_new.momenta -= model.mean_field->momenta;
    const auto centered = center_fields(training.fields, *model.mean_field);
    Eigen::VectorXd row(training.size());
    for (Eigen::Index i = 0; i < training.size(); ++i) {
        row[i] = field_pairing(centered_new, centered[i]);
    }
    return row;
}

Eigen::VectorXd training_scores(const DiscriminantModel& model, const FemOperators& ops,
                                const LabeledFunctionalData& data) {
    Eigen::MatrixXd centered = data.coeffs.rowwise() - model.mean_coeffs.transpose();
    Eigen::VectorXd scores = centered * (ops.mass * model.c_F);
    if (model.bivariate()) {
        if (!data.geometry.has_value()) {
            throw MissingGeometry("training_scores: bivariate model without geometry");
        }
        const auto centered_fields =
            center_fields(data.geometry->fields, *model.mean_field);
        scores += gram_matrix(centered_fields) * (*model.c_G);
    }
    return scores;
}

ThresholdResult choose_threshold(const Eigen::VectorXd& scores,
                                 const std::vector<int>& labels,
                                 ThresholdCriterion criterion, double specificity) {
    const Eigen::Index n = scores.size();
    if (static_cast<Eigen::Index>(labels.size()) != n) {
        throw DimensionMismatch("choose_threshold: label count");
    }
    Eigen::Index n1 = 0, n2 = 0;
    for (int g : labels) (g == 0 ? n1 : n2)++;
    if (n1 == 0 || n2 == 0) {
        throw SingleClassError("choose_threshold: both classes must be present");
    }

    std::vector<double> sorted(scores.data(), scores.data() + n);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    const auto m = static_cast<Eigen::Index>(sorted.size());

    if (m == 1) {
        if (criterion == ThresholdCriterion::Youden) return {sorted[0], true};
        return {sorted[0], true};
    }

    if (criterion == ThresholdCriterion::FixedSpecificity) {
        // Specificity is a step function jumping at the g1 score values;
        // return the smallest threshold reaching the requested level.
        std::vector<double> neg;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (labels[i] == 0) neg.push_back(scores[i]);
        }
        std::sort(neg.begin(), neg.end());
        for (double t : neg) {
            const auto below = std::upper_bound(neg.begin(), neg.end(), t) - neg.begin();
            if (static_cast<double>(below) / static_cast<double>(n1) >= specificity) {
                return {t, false};
            }
        }
        return {neg.back(), false};
    }

    // Youden: evaluate sens + spec - 1 on each threshold interval; the rule
    // is score > t -> predict g2.
    auto youden = [&](double t) {
        Eigen::Index tp = 0, tn = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (labels[i] == 1 && scores[i] > t) ++tp;
            if (labels[i] == 0 && scores[i] <= t) ++tn;
        }
        return static_cast<double>(tp) / n2 + static_cast<double>(tn) / n1 - 1.0;
    };

    double best_j = -2.0, best_t = sorted[0];
    for (Eigen::Index i = 0; i <= m; ++i) {
        double t;
        if (i == 0) t = sorted[0] - 1.0;
        else if (i == m) t = sorted[m - 1] + 1.0;
        else t = 0.5 * (sorted[i - 1] + sorted[i]);
        const double j = youden(t);
        if (j > best_j + 1e-15) {
            best_j = j;
            best_t = t;
        }
    }
    return {best_t, best_j <= 1e-15 && best_j >= -1e-15};
}

std::string to_json(const DiscriminantModel& model) {
    nlohmann::json j;
    if (model.lambda1.has_value()) j["lambda1"] = *model.lambda1;
    else j["lambda1"] = nullptr;
    j["lambda2"] = model.lambda2;
    j["epsilon"] = model.epsilon;
    j["threshold"] = model.threshold;
    j["c_F"] = std::vector<double>(model.c_F.data(), model.c_F.data() + model.c_F.size());
    if (model.c_G.has_value()) {
        j["c_G"] = std::vector<double>(model.c_G->data(), model.c_G->data() + model.c_G->size());
    } else {
        j["c_G"] = nullptr;
    }
    j["mean_coeffs"] = std::vector<double>(model.mean_coeffs.data(),
                                           model.mean_coeffs.data() + model.mean_coeffs.size());
    if (model.mean_field.has_value()) {
        j["mean_field"] = nlohmann::json::parse(to_json(*model.mean_field));
    }
    j["solver"] = {{"iters", model.solver.iterations},
                   {"residual", model.solver.residual},
                   {"converged", model.solver.converged}};
    return j.dump();
}

DiscriminantModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
    DiscriminantModel model;
    if (!j.at("lambda1").is_null()) model.lambda1 = j["lambda1"].get<double>();
    model.lambda2 = j.at("lambda2").get<double>();
    model.epsilon = j.at("epsilon").get<double>();
    model.threshold = j.at("threshold").get<double>();
    const auto cf = j.at("c_F").get<std::vector<double>>();
    model.c_F = Eigen::Map<const Eigen::VectorXd>(cf.data(), cf.size());
    if (!j.at("c_G").is_null()) {
        const auto cg = j["c_G"].get<std::vector<double>>();
        model.c_G = Eigen::Map<const Eigen::VectorXd>(cg.data(), cg.size());
    }
    const auto mean = j.at("mean_coeffs").get<std::vector<double>>();
    model.mean_coeffs = Eigen::Map<const Eigen::VectorXd>(mean.data(), mean.size());
    if (j.contains("mean_field")) {
        model.mean_field = vector_field_from_json(j["mean_field"].dump());
    }
    model.solver.iterations = j.at("solver").at("iters").get<int>();
    model.solver.residual = j.at("solver").at("residual").get<double>();
    model.solver.converged = j.at("solver").value("converged", true);
    return model;
}

}  // namespace flda
