// Command-line surface for the discriminant-analysis library. Every
// subcommand writes its primary artifact plus a JSON run manifest recording
// the resolved configuration, seeds, and output hashes.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "flda/baseline.hpp"
#include "flda/classifier.hpp"
#include "flda/eval.hpp"
#include "flda/simgen.hpp"
#include "flda/spectral.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

// Single-line diagnostics name the concrete error class.
std::string error_label(const flda::Error& e) {
    if (dynamic_cast<const flda::ParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const flda::ValidationError*>(&e)) return "ValidationError";
    if (dynamic_cast<const flda::ConnectivityMismatch*>(&e)) return "ConnectivityMismatch";
    if (dynamic_cast<const flda::DimensionMismatch*>(&e)) return "DimensionMismatch";
    if (dynamic_cast<const flda::LimitExceeded*>(&e)) return "LimitExceeded";
    if (dynamic_cast<const flda::SingleClassError*>(&e)) return "SingleClassError";
    if (dynamic_cast<const flda::KernelMismatch*>(&e)) return "KernelMismatch";
    if (dynamic_cast<const flda::BasisTooSmall*>(&e)) return "BasisTooSmall";
    if (dynamic_cast<const flda::NonPositivePenalty*>(&e)) return "NonPositivePenalty";
    if (dynamic_cast<const flda::MissingGeometry*>(&e)) return "MissingGeometry";
    if (dynamic_cast<const flda::DegenerateTriangle*>(&e)) return "DegenerateTriangle";
    if (dynamic_cast<const flda::SingularSystem*>(&e)) return "SingularSystem";
    if (dynamic_cast<const flda::SingularCovariance*>(&e)) return "SingularCovariance";
    if (dynamic_cast<const flda::ConvergenceFailure*>(&e)) return "ConvergenceFailure";
    if (dynamic_cast<const flda::MaxIterations*>(&e)) return "MaxIterations";
    if (dynamic_cast<const flda::RankDeficiency*>(&e)) return "RankDeficiency";
    if (dynamic_cast<const flda::NumericalError*>(&e)) return "NumericalError";
    return "DataError";
}

std::string fnv1a_hex(const std::string& bytes) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw flda::DataError(path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw flda::DataError(path + ": cannot open for writing");
    out << text;
}

// One manifest per run: configuration, inputs, outputs with content hashes.
struct Manifest {
    json doc;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    explicit Manifest(const std::string& command) {
        doc["command"] = command;
        doc["inputs"] = json::object();
        doc["outputs"] = json::object();
    }

    void config(const json& j) { doc["config"] = j; }
    void input(const std::string& name, const std::string& path) {
        doc["inputs"][name] = path;
    }
    void output(const std::string& name, const std::string& path) {
        doc["outputs"][name] = {{"path", path}, {"fnv1a", fnv1a_hex(slurp(path))}};
    }

    void save(const std::string& path) {
        doc["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        write_text(path, doc.dump(2) + "\n");
    }
};

// Shared mesh selection: either a file or a generated icosphere.
struct MeshArgs {
    std::string path;
    int level = 3;
    double radius = 1.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--mesh", path, "Mesh file (OFF or OBJ)");
        cmd->add_option("--level", level, "Icosphere subdivision level")
            ->capture_default_str();
        cmd->add_option("--radius", radius, "Icosphere radius")->capture_default_str();
    }

    flda::TriangleMesh resolve() const {
        if (!path.empty()) return flda::load_mesh(path);
        return flda::icosphere(level, radius);
    }

    json describe() const {
        if (!path.empty()) return {{"mesh", path}};
        return {{"level", level}, {"radius", radius}};
    }
};

void save_scores_csv(const std::string& path, const Eigen::VectorXd& scores,
                     const std::vector<int>* predictions) {
    std::ofstream out(path);
    if (!out) throw flda::DataError(path + ": cannot open for writing");
    out << (predictions ? "score,predicted\n" : "score\n");
    char buf[40];
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", scores[i]);
        out << buf;
        if (predictions) out << "," << (*predictions)[i];
        out << "\n";
    }
}

Eigen::VectorXd load_scores_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw flda::ParseError(path + ": cannot open file");
    std::vector<double> values;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        values.push_back(std::stod(line.substr(0, line.find(','))));
    }
    return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                             static_cast<Eigen::Index>(values.size()));
}

std::string default_manifest(const std::string& primary_output) {
    return primary_output + ".manifest.json";
}

// ---- subcommand implementations -------------------------------------------

int cmd_icosphere(int level, double radius, const std::string& out,
                  std::string manifest_path) {
    Manifest manifest("icosphere");
    manifest.config({{"level", level}, {"radius", radius}});
    flda::save_mesh(flda::icosphere(level, radius), out);
    manifest.output("mesh", out);
    if (manifest_path.empty()) manifest_path = default_manifest(out);
    manifest.save(manifest_path);
    return kExitOk;
}

int cmd_mesh_info(const std::string& path) {
    const flda::TriangleMesh mesh = flda::load_mesh(path);
    flda::validate_mesh(mesh);
    json info;
    info["vertices"] = mesh.vertex_count();
    info["faces"] = mesh.face_count();
    info["edges"] = mesh.edge_count();
    info["euler_characteristic"] = mesh.euler_characteristic();
    info["centroid_size"] = mesh.centroid_size();
    info["mean_edge_length"] = mesh.mean_edge_length();
    const Eigen::MatrixXd mass(flda::assemble_mass(mesh));
    info["surface_area"] = mass.sum();
    std::cout << info.dump(2) << "\n";
    return kExitOk;
}

int cmd_eig(const MeshArgs& mesh_args, int k, double epsilon,
            const std::string& values_out, const std::string& vectors_out,
            std::string manifest_path) {
    Manifest manifest("eig");
    json config = mesh_args.describe();
    config["k"] = k;
    config["epsilon"] = epsilon;
    manifest.config(config);

    const flda::TriangleMesh mesh = mesh_args.resolve();
    const flda::FemOperators ops = flda::assemble_operators(mesh, epsilon);
    const flda::EigenBasis basis = flda::laplace_beltrami_eigs(ops, k);

    char buf[40];
    std::ostringstream values;
    for (Eigen::Index i = 0; i < basis.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", basis.eigenvalues[i]);
        values << buf;
    }
    write_text(values_out, values.str());
    manifest.output("eigenvalues", values_out);

    if (!vectors_out.empty()) {
        std::ostringstream vectors;
        for (Eigen::Index r = 0; r < basis.eigenvectors.rows(); ++r) {
            for (Eigen::Index c = 0; c < basis.eigenvectors.cols(); ++c) {
                std::snprintf(buf, sizeof(buf), c ? ",%.17g" : "%.17g",
                              basis.eigenvectors(r, c));
                vectors << buf;
            }
            vectors << "\n";
        }
        write_text(vectors_out, vectors.str());
        manifest.output("eigenvectors", vectors_out);
    }
    if (manifest_path.empty()) manifest_path = default_manifest(values_out);
    manifest.save(manifest_path);
    return kExitOk;
}

int cmd_simulate(const flda::SimConfig& raw, const std::string& out,
                 std::string manifest_path) {
    Manifest manifest("simulate");
    const flda::SimConfig config = flda::resolve_config(raw);
    manifest.config(json::parse(flda::to_json(config)));

    const flda::TriangleMesh mesh =
        flda::icosphere(config.icosphere_level, config.radius);
    const flda::FemOperators ops = flda::assemble_operators(mesh);
    const flda::EigenBasis basis =
        flda::laplace_beltrami_eigs(ops, config.basis_size + 1);
    const flda::LabeledFunctionalData data = flda::generate_dataset(config, basis);
    flda::save_dataset_csv(data, out);
    manifest.output("dataset", out);
    if (manifest_path.empty()) manifest_path = default_manifest(out);
    manifest.save(manifest_path);
    return kExitOk;
}

int cmd_fit(const std::string& data_path, const MeshArgs& mesh_args, double lambda2,
            double lambda2_mult, double epsilon, double tol, const std::string& out,
            std::string manifest_path) {
    Manifest manifest("fit");
    manifest.input("dataset", data_path);

    const flda::LabeledFunctionalData data = flda::load_dataset_csv(data_path);
    const flda::TriangleMesh mesh = mesh_args.resolve();
    const flda::FemOperators ops = flda::assemble_operators(mesh, epsilon);
    if (lambda2 <= 0) {
        lambda2 = lambda2_mult * flda::lambda_reference(data.coeffs, ops);
    }

    json config = mesh_args.describe();
    config["lambda2"] = lambda2;
    config["epsilon"] = ops.epsilon;
    config["tol"] = tol;
    manifest.config(config);

    flda::SolverConfig solver;
    solver.tol = tol;
    const flda::DiscriminantModel model =
        flda::fit(data, ops, std::nullopt, lambda2, solver);
    write_text(out, flda::to_json(model) + "\n");
    manifest.output("model", out);

    const Eigen::VectorXd scores = flda::training_scores(model, ops, data);
    manifest.doc["training_scores"] =
        std::vector<double>(scores.data(), scores.data() + scores.size());
    manifest.doc["solver"] = {{"iterations", model.solver.iterations},
                              {"converged", model.solver.converged}};
    if (manifest_path.empty()) manifest_path = default_manifest(out);
    manifest.save(manifest_path);
    return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const MeshArgs& mesh_args, const std::string& out,
                std::string manifest_path) {
    Manifest manifest("predict");
    manifest.input("model", model_path);
    manifest.input("dataset", data_path);
    manifest.config(mesh_args.describe());

    const flda::DiscriminantModel model = flda::model_from_json(slurp(model_path));
    if (model.bivariate()) {
        throw flda::MissingGeometry(
            "predict: bivariate models need the training geometry and are not "
            "supported from the command line");
    }
    const flda::LabeledFunctionalData data = flda::load_dataset_csv(data_path);
    const flda::TriangleMesh mesh = mesh_args.resolve();
    const flda::FemOperators ops = flda::assemble_operators(mesh, model.epsilon);

    Eigen::VectorXd scores(data.sample_count());
    std::vector<int> predicted(data.sample_count());
    for (Eigen::Index i = 0; i < data.sample_count(); ++i) {
        scores[i] = flda::score(model, ops, data.coeffs.row(i).transpose());
        predicted[i] = scores[i] > model.threshold ? 1 : 0;
    }
    save_scores_csv(out, scores, &predicted);
    manifest.output("scores", out);
    if (manifest_path.empty()) manifest_path = default_manifest(out);
    manifest.save(manifest_path);
    return kExitOk;
}

int cmd_threshold(const std::string& scores_path, const std::string& data_path,
                  const std::string& criterion, double specificity) {
    const Eigen::VectorXd scores = load_scores_csv(scores_path);
    const flda::LabeledFunctionalData data = flda::load_dataset_csv(data_path);
    if (scores.size() != data.sample_count()) {
        throw flda::DimensionMismatch("threshold: score and label counts differ");
    }
    const auto mode = criterion == "youden"
                          ? flda::ThresholdCriterion::Youden
                          : flda::ThresholdCriterion::FixedSpecificity;
    const flda::ThresholdResult result =
        flda::choose_threshold(scores, data.labels, mode, specificity);
    json j = {{"criterion", criterion},
              {"threshold", result.value},
              {"degenerate", result.degenerate},
              {"auc", flda::auc(scores, data.labels)}};
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_experiment(const flda::ExperimentConfig& config, const std::string& out,
                   const std::string& summary_out, bool timings,
                   std::string manifest_path) {
    Manifest manifest("experiment");
    json cj;
    cj["alphas"] = config.alphas;
    cj["train_sizes"] = std::vector<long>(config.train_sizes.begin(),
                                          config.train_sizes.end());
    cj["replicates"] = config.replicates;
    cj["test_size"] = config.test_size;
    cj["icosphere_level"] = config.icosphere_level;
    cj["radius"] = config.radius;
    cj["basis_size"] = config.basis_size;
    cj["mean_index"] = config.mean_index;
    cj["lambda2_multipliers"] = config.lambda2_multipliers;
    cj["k_grid"] = std::vector<long>(config.k_grid.begin(), config.k_grid.end());
    cj["base_seed"] = config.base_seed;
    cj["jobs"] = config.jobs;
    manifest.config(cj);

    const flda::ResultTable table = flda::run_experiment(config);
    flda::write_result_csv(table, out, timings);
    manifest.output("results", out);
    if (!summary_out.empty()) {
        write_text(summary_out, flda::summary_json(table) + "\n");
        manifest.output("summary", summary_out);
    }
    if (manifest_path.empty()) manifest_path = default_manifest(out);
    manifest.save(manifest_path);
    return kExitOk;
}

int cmd_deform(const std::string& mesh_path, const std::string& field_path,
               double scale, int steps, const std::string& out,
               std::string manifest_path) {
    Manifest manifest("deform");
    manifest.input("mesh", mesh_path);
    manifest.input("field", field_path);
    manifest.config({{"scale", scale}, {"steps", steps}});

    const flda::TriangleMesh mesh = flda::load_mesh(mesh_path);
    flda::VectorFieldRepr field = flda::vector_field_from_json(slurp(field_path));
    field.momenta *= scale;
    flda::save_mesh(flda::flow_deform(mesh, field, steps), out);
    manifest.output("mesh", out);
    if (manifest_path.empty()) manifest_path = default_manifest(out);
    manifest.save(manifest_path);
    return kExitOk;
}

int cmd_plot(const std::string& results_path, const std::string& out,
             std::string manifest_path) {
    Manifest manifest("plot");
    manifest.input("results", results_path);
    manifest.config(json::object());
    flda::write_boxplot_svg(flda::load_result_csv(results_path), out);
    manifest.output("plot", out);
    if (manifest_path.empty()) manifest_path = default_manifest(out);
    manifest.save(manifest_path);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Penalized functional discriminant analysis on triangulated "
                 "surface domains"};
    app.require_subcommand(1);

    std::string manifest_path;
    app.add_option("--manifest", manifest_path,
                   "Run manifest path (default: <output>.manifest.json)");

    // icosphere
    auto* ico = app.add_subcommand("icosphere", "Generate a subdivided icosphere");
    int ico_level = 3;
    double ico_radius = 1.0;
    std::string ico_out;
    ico->add_option("--level", ico_level, "Subdivision level")->capture_default_str();
    ico->add_option("--radius", ico_radius, "Radius")->capture_default_str();
    ico->add_option("-o,--output", ico_out, "Output OFF file")->required();

    // mesh-info
    auto* info = app.add_subcommand("mesh-info", "Validate a mesh and print stats");
    std::string info_path;
    info->add_option("mesh", info_path, "Mesh file")->required();

    // eig
    auto* eig = app.add_subcommand("eig", "Surface eigenfunctions");
    MeshArgs eig_mesh;
    eig_mesh.attach(eig);
    int eig_k = 10;
    double eig_epsilon = -1.0;
    std::string eig_values, eig_vectors;
    eig->add_option("-k,--count", eig_k, "Number of eigenpairs")->capture_default_str();
    eig->add_option("--epsilon", eig_epsilon,
                    "Penalty shrinkage weight (negative: data-scaled default)")
        ->capture_default_str();
    eig->add_option("-o,--values", eig_values, "Eigenvalue CSV")->required();
    eig->add_option("--vectors", eig_vectors, "Optional eigenvector CSV");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
    flda::SimConfig sim_config;
    std::string sim_out;
    sim->add_option("--level", sim_config.icosphere_level, "Icosphere level")
        ->capture_default_str();
    sim->add_option("--radius", sim_config.radius, "Icosphere radius")
        ->capture_default_str();
    sim->add_option("--basis-size", sim_config.basis_size, "Number of modes")
        ->capture_default_str();
    sim->add_option("--mean-index", sim_config.mean_index,
                    "Mode carrying the group mean difference")
        ->capture_default_str();
    sim->add_option("--alpha", sim_config.alpha, "Mean difference magnitude")
        ->capture_default_str();
    Eigen::Index sim_n = 128;
    sim->add_option("-n,--per-group", sim_n, "Samples per group")->capture_default_str();
    uint64_t sim_seed = 0;
    sim->add_option("--seed", sim_seed, "Generator seed")->capture_default_str();
    sim->add_option("-o,--output", sim_out, "Output dataset CSV")->required();

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Fit the penalized discriminant");
    MeshArgs fit_mesh;
    fit_mesh.attach(fit_cmd);
    std::string fit_data, fit_out;
    double fit_lambda2 = 0.0, fit_mult = 1.0, fit_epsilon = -1.0, fit_tol = 1e-10;
    fit_cmd->add_option("--data", fit_data, "Training dataset CSV")->required();
    fit_cmd->add_option("--lambda2", fit_lambda2,
                        "Absolute roughness penalty (0: use --lambda2-mult)")
        ->capture_default_str();
    fit_cmd->add_option("--lambda2-mult", fit_mult,
                        "Penalty as a multiple of the data-scaled reference")
        ->capture_default_str();
    fit_cmd->add_option("--epsilon", fit_epsilon,
                        "Penalty shrinkage weight (negative: data-scaled default)")
        ->capture_default_str();
    fit_cmd->add_option("--tol", fit_tol, "Solver tolerance")->capture_default_str();
    fit_cmd->add_option("-o,--output", fit_out, "Output model JSON")->required();

    // predict
    auto* pred = app.add_subcommand("predict", "Score samples with a fitted model");
    MeshArgs pred_mesh;
    pred_mesh.attach(pred);
    std::string pred_model, pred_data, pred_out;
    pred->add_option("--model", pred_model, "Model JSON")->required();
    pred->add_option("--data", pred_data, "Dataset CSV")->required();
    pred->add_option("-o,--output", pred_out, "Output scores CSV")->required();

    // threshold
    auto* thr = app.add_subcommand("threshold", "Pick a decision threshold");
    std::string thr_scores, thr_data, thr_criterion = "youden";
    double thr_spec = 0.95;
    thr->add_option("--scores", thr_scores, "Scores CSV (from predict)")->required();
    thr->add_option("--data", thr_data, "Labeled dataset CSV")->required();
    thr->add_option("--criterion", thr_criterion, "youden or specificity")
        ->check(CLI::IsMember({"youden", "specificity"}))
        ->capture_default_str();
    thr->add_option("--specificity", thr_spec, "Target specificity level")
        ->capture_default_str();

    // experiment
    auto* exp = app.add_subcommand("experiment", "Replicated method comparison");
    flda::ExperimentConfig exp_config;
    exp_config.jobs = static_cast<int>(std::thread::hardware_concurrency());
    std::string exp_out, exp_summary;
    bool exp_timings = false;
    std::vector<long> exp_sizes = {128, 256}, exp_k = {5, 10, 20, 40};
    exp->add_option("--alphas", exp_config.alphas, "Mean-difference magnitudes")
        ->delimiter(',')
        ->capture_default_str();
    exp->add_option("--train-sizes", exp_sizes, "Total training sample counts")
        ->delimiter(',')
        ->capture_default_str();
    exp->add_option("--replicates", exp_config.replicates, "Replicates per cell")
        ->capture_default_str();
    exp->add_option("--test-size", exp_config.test_size, "Test samples per replicate")
        ->capture_default_str();
    exp->add_option("--level", exp_config.icosphere_level, "Icosphere level")
        ->capture_default_str();
    exp->add_option("--radius", exp_config.radius, "Icosphere radius")
        ->capture_default_str();
    exp->add_option("--basis-size", exp_config.basis_size, "Number of modes")
        ->capture_default_str();
    exp->add_option("--mean-index", exp_config.mean_index,
                    "Mode carrying the group mean difference")
        ->capture_default_str();
    exp->add_option("--lambda2-mults", exp_config.lambda2_multipliers,
                    "Penalty grid as multiples of the reference")
        ->delimiter(',')
        ->capture_default_str();
    exp->add_option("--k-grid", exp_k, "Component-count grid for the baseline")
        ->delimiter(',')
        ->capture_default_str();
    exp->add_option("--seed", exp_config.base_seed, "Base seed")->capture_default_str();
    exp->add_option("--jobs", exp_config.jobs, "Worker threads")->capture_default_str();
    exp->add_flag("--timings", exp_timings,
                  "Record wall times (breaks byte-reproducibility)");
    exp->add_option("-o,--output", exp_out, "Results CSV")->required();
    exp->add_option("--summary", exp_summary, "Optional summary JSON");

    // deform
    auto* def = app.add_subcommand("deform", "Flow a mesh along a vector field");
    std::string def_mesh, def_field, def_out;
    double def_scale = 1.0;
    int def_steps = 32;
    def->add_option("--mesh", def_mesh, "Template mesh")->required();
    def->add_option("--field", def_field, "Vector field JSON")->required();
    def->add_option("--scale", def_scale, "Momenta scaling factor")
        ->capture_default_str();
    def->add_option("--steps", def_steps, "Euler steps")->capture_default_str();
    def->add_option("-o,--output", def_out, "Output OFF file")->required();

    // plot
    auto* plot = app.add_subcommand("plot", "Box plot from a results CSV");
    std::string plot_results, plot_out;
    plot->add_option("--results", plot_results, "Results CSV")->required();
    plot->add_option("-o,--output", plot_out, "Output SVG")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (ico->parsed()) return cmd_icosphere(ico_level, ico_radius, ico_out, manifest_path);
        if (info->parsed()) return cmd_mesh_info(info_path);
        if (eig->parsed()) {
            return cmd_eig(eig_mesh, eig_k, eig_epsilon, eig_values, eig_vectors,
                           manifest_path);
        }
        if (sim->parsed()) {
            sim_config.n_per_group = sim_n;
            sim_config.seed = sim_seed;
            return cmd_simulate(sim_config, sim_out, manifest_path);
        }
        if (fit_cmd->parsed()) {
            return cmd_fit(fit_data, fit_mesh, fit_lambda2, fit_mult, fit_epsilon,
                           fit_tol, fit_out, manifest_path);
        }
        if (pred->parsed()) {
            return cmd_predict(pred_model, pred_data, pred_mesh, pred_out, manifest_path);
        }
        if (thr->parsed()) {
            return cmd_threshold(thr_scores, thr_data, thr_criterion, thr_spec);
        }
        if (exp->parsed()) {
            exp_config.train_sizes.assign(exp_sizes.begin(), exp_sizes.end());
            exp_config.k_grid.assign(exp_k.begin(), exp_k.end());
            return cmd_experiment(exp_config, exp_out, exp_summary, exp_timings,
                                  manifest_path);
        }
        if (def->parsed()) {
            return cmd_deform(def_mesh, def_field, def_scale, def_steps, def_out,
                              manifest_path);
        }
        if (plot->parsed()) return cmd_plot(plot_results, plot_out, manifest_path);
    } catch (const flda::NumericalError& e) {
        std::cerr << error_label(e) << ": " << e.what() << "\n";
        return kExitNumerical;
    } catch (const flda::DataError& e) {
        std::cerr << error_label(e) << ": " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
