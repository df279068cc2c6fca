#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flda/baseline.hpp"
#include "flda/classifier.hpp"
#include "flda/simgen.hpp"

namespace flda {

// Mann-Whitney AUC: P(score_g2 > score_g1) + 0.5 P(tie).
double auc(const Eigen::VectorXd& scores, const std::vector<int>& labels);

// Data-scaled penalty reference: trace(X M X') / (n * trace of the
// penalty operator). Grids are specified as multiples of this.
double lambda_reference(const Eigen::MatrixXd& coeffs, const FemOperators& ops);

enum class Method { FLDA, FPCA_LDA };

std::string method_name(Method method);

struct GridSearchResult {
    Method method = Method::FLDA;
    double lambda2 = 0.0;        // FLDA
    Eigen::Index k = 0;          // FPCA_LDA
    double validation_auc = 0.0;
    std::optional<DiscriminantModel> flda;
    std::optional<FpcaModel> fpca;
    std::optional<LdaModel> lda;
};

// Fits one model per grid point on train, picks the best validation AUC.
// Ties break toward larger lambda2 (FLDA) or smaller k (FPCA_LDA).
GridSearchResult grid_search(const LabeledFunctionalData& train,
                             const LabeledFunctionalData& validation, Method method,
                             const FemOperators& ops,
                             const std::vector<double>& lambda2_grid,
                             const std::vector<Eigen::Index>& k_grid,
                             const SolverConfig& solver = {});

// Scores of an arbitrary sample set under either fitted pipeline
// (univariate models only).
Eigen::VectorXd method_scores(const GridSearchResult& fitted, const FemOperators& ops,
                              const Eigen::MatrixXd& coeffs);

struct ExperimentConfig {
    std::vector<double> alphas = {0.2, 0.4};
    std::vector<Eigen::Index> train_sizes = {128, 256};  // total samples n
    int replicates = 10;
    Eigen::Index test_size = 2000;
    int icosphere_level = 3;
    double radius = 1.0;
    int basis_size = 40;
    int mean_index = 10;
    // Multiples of lambda_reference; resolved per training set.
    std::vector<double> lambda2_multipliers = {1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4};
    std::vector<Eigen::Index> k_grid = {5, 10, 20, 40};
    uint64_t base_seed = 42;
    int jobs = 1;
};

struct ResultRow {
    Method method = Method::FLDA;
    double alpha = 0.0;
    Eigen::Index n = 0;
    int replicate = 0;
    double lambda2 = 0.0;
    Eigen::Index k = 0;
    double auc = 0.0;
    double seconds = 0.0;
    bool failed = false;
    std::string error;
};

struct ResultTable {
    std::vector<ResultRow> rows;

    double mean_auc(Method method, double alpha, Eigen::Index n) const;
};

// Replicated comparison harness. Replicate-specific counter-based seeds;
// output independent of jobs and execution order.
ResultTable run_experiment(const ExperimentConfig& config);

// Header "method,alpha,n,replicate,lambda1,lambda2,k,auc,seconds".
// Wall-clock seconds are written only when include_timings is set, so the
// default output is byte-reproducible across runs and job counts.
void write_result_csv(const ResultTable& table, const std::string& path,
                      bool include_timings = false);

ResultTable load_result_csv(const std::string& path);

// Per-(method, alpha, n) mean/sd AUC.
std::string summary_json(const ResultTable& table);

// Box plots of test AUC, one panel per alpha, grouped by n and method.
void write_boxplot_svg(const ResultTable& table, const std::string& path);

}  // namespace flda
