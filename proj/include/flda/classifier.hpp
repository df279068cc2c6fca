#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flda/fem.hpp"
#include "flda/lsqr.hpp"
#include "flda/rkhs.hpp"

namespace flda {

// Class labels: 0 is g1 (negative, e.g. control), 1 is g2 (positive).
struct LabeledFunctionalData {
    Eigen::MatrixXd coeffs;  // n x s, one sample per row
    std::vector<int> labels;
    std::optional<GeometrySet> geometry;

    Eigen::Index sample_count() const { return coeffs.rows(); }
};

// y_i = -n/n1 for class g1, +n/n2 for class g2; sums to zero.
Eigen::VectorXd encode_labels(const std::vector<int>& labels);

struct SolverConfig {
    double tol = 1e-10;
    int max_iter = 0;  // 0 -> 10 * (rows + cols)
};

struct SolverInfo {
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

struct DiscriminantModel {
    Eigen::VectorXd c_F;                    // FE coefficients of beta^F
    std::optional<Eigen::VectorXd> c_G;     // representer coefficients of beta^G
    Eigen::VectorXd mean_coeffs;            // training mean x-bar
    std::optional<VectorFieldRepr> mean_field;  // momenta-wise mean v-bar
    std::optional<double> lambda1;
    double lambda2 = 0.0;
    double epsilon = 0.0;
    double threshold = 0.0;
    SolverInfo solver;

    bool bivariate() const { return c_G.has_value(); }
};

// The block least-squares operator of the penalized discriminant problem.
// Unknown is [c_G; c_F] (c_F only in the univariate case); rows stack the
// data-fit block [Sigma | X M] over the penalty blocks sqrt(lambda2) *
// Mlump^{-1/2} S, sqrt(lambda2 eps) M^{1/2}, and sqrt(lambda1) Sigma^{1/2}.
// M^{1/2} is realized via sparse Cholesky, Sigma^{1/2} via dense
// eigendecomposition with negative eigenvalues clamped to zero.
class AugmentedSystem : public LinearOperator {
 public:
    // centered_coeffs must outlive the operator. gram is null for the
    // univariate model; lambda1 is required iff gram is present.
    AugmentedSystem(const Eigen::MatrixXd& centered_coeffs, const FemOperators& ops,
                    std::optional<double> lambda1, double lambda2,
                    const Eigen::MatrixXd* gram);

    Eigen::Index rows() const override;
    Eigen::Index cols() const override;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const override;
    Eigen::VectorXd apply_transpose(const Eigen::VectorXd& y) const override;

    Eigen::VectorXd rhs(const Eigen::VectorXd& y) const;
    bool bivariate() const { return gram_ != nullptr; }

 private:
    const Eigen::MatrixXd& coeffs_;
    const FemOperators& ops_;
    const Eigen::MatrixXd* gram_;
    Eigen::MatrixXd gram_sqrt_;
    Eigen::VectorXd inv_sqrt_lumped_;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> mass_chol_;
    double sqrt_l1_ = 0.0, sqrt_l2_ = 0.0, sqrt_l2e_ = 0.0;

    Eigen::VectorXd mass_sqrt(const Eigen::VectorXd& c) const;
    Eigen::VectorXd mass_sqrt_transpose(const Eigen::VectorXd& c) const;
};

DiscriminantModel fit(const LabeledFunctionalData& data, const FemOperators& ops,
                      std::optional<double> lambda1, double lambda2,
                      const SolverConfig& config = {});

// (x_new - x_bar)' M c_F [+ pairing_row' c_G]. pairing_row holds
// <v_new - v_bar, v_i - v_bar> against the centered training fields.
double score(const DiscriminantModel& model, const FemOperators& ops,
             const Eigen::VectorXd& x_new,
             const Eigen::VectorXd* pairing_row = nullptr);

// Kernel pairings of (v_new - v_bar) against the centered training fields
// stored in the model's geometry set.
Eigen::VectorXd pairing_row(const DiscriminantModel& model, const GeometrySet& training,
                            const VectorFieldRepr& v_new);

// Training scores of all samples (used for the default threshold).
Eigen::VectorXd training_scores(const DiscriminantModel& model, const FemOperators& ops,
                                const LabeledFunctionalData& data);

enum class ThresholdCriterion { Youden, FixedSpecificity };

struct ThresholdResult {
    double value = 0.0;
    bool degenerate = false;  // all scores tied
};

ThresholdResult choose_threshold(const Eigen::VectorXd& scores,
                                 const std::vector<int>& labels,
                                 ThresholdCriterion criterion,
                                 double specificity = 0.95);

std::string to_json(const DiscriminantModel& model);
DiscriminantModel model_from_json(const std::string& text);

}  // namespace flda
