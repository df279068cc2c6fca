#include "flda/eval.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "flda/rng.hpp"

namespace flda {

double auc(const Eigen::VectorXd& scores, const std::vector<int>& labels) {
    const Eigen::Index n = scores.size();
    if (static_cast<Eigen::Index>(labels.size()) != n) {
        throw DimensionMismatch("auc: label count");
    }
    Eigen::Index n1 = 0, n2 = 0;
    for (int g : labels) (g == 0 ? n1 : n2)++;
    if (n1 == 0 || n2 == 0) throw SingleClassError("auc: both classes required");

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return scores[a] < scores[b]; });

    // Average ranks over tie groups; AUC from the positive-class rank sum.
    double rank_sum_pos = 0.0;
    Eigen::Index i = 0;
    while (i < n) {
        Eigen::Index j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (Eigen::Index k = i; k <= j; ++k) {
            if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
        }
        i = j + 1;
    }
    const double u = rank_sum_pos - 0.5 * static_cast<double>(n2) * (n2 + 1);
    return u / (static_cast<double>(n1) * static_cast<double>(n2));
}

double lambda_reference(const Eigen::MatrixXd& coeffs, const FemOperators& ops) {
    const Eigen::Index n = coeffs.rows();
    double data_trace = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        data_trace += coeffs.row(i).dot((ops.mass * coeffs.row(i).transpose()).transpose());
    }
    // trace(S Mlump^-1 S) = sum_ij S_ij^2 / Mlump_jj, plus eps * trace(M).
    double penalty_trace = 0.0;
    for (int r = 0; r < ops.stiffness.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(ops.stiffness, r); it; ++it) {
            penalty_trace += it.value() * it.value() / ops.lumped_mass_diag[it.col()];
        }
    }
    for (Eigen::Index r = 0; r < ops.size(); ++r) {
        penalty_trace += ops.epsilon * ops.mass.coeff(r, r);
    }
    return data_trace / (static_cast<double>(n) * penalty_trace);
}

std::string method_name(Method method) {
    return method == Method::FLDA ? "FLDA" : "FPCA_LDA";
}

GridSearchResult grid_search(const LabeledFunctionalData& train,
                             const LabeledFunctionalData& validation, Method method,
                             const FemOperators& ops,
                             const std::vector<double>& lambda2_grid,
                             const std::vector<Eigen::Index>& k_grid,
                             const SolverConfig& solver) {
    GridSearchResult best;
    best.method = method;
    best.validation_auc = -1.0;

    if (method == Method::FLDA) {
        if (lambda2_grid.empty()) throw DataError("grid_search: empty lambda2 grid");
        for (double l2 : lambda2_grid) {
            DiscriminantModel model = fit(train, ops, std::nullopt, l2, solver);
            Eigen::VectorXd scores =
                (validation.coeffs.rowwise() - model.mean_coeffs.transpose()) *
                (ops.mass * model.c_F);
            const double a = auc(scores, validation.labels);
            // >= breaks ties toward larger lambda2 (grid scanned ascending).
            if (a >= best.validation_auc) {
                best.validation_auc = a;
                best.lambda2 = l2;
                best.flda = std::move(model);
            }
        }
    } else {
        if (k_grid.empty()) throw DataError("grid_search: empty k grid");
        const Eigen::Index max_k = std::min(train.sample_count(), ops.size());
        for (Eigen::Index k : k_grid) {
            const Eigen::Index k_eff = std::min(k, max_k);
            FpcaModel fpca = fpca_fit(train.coeffs, ops, k_eff);
            Eigen::MatrixXd train_scores = fpca_scores(fpca, ops, train.coeffs);
            LdaModel lda = lda_fit(train_scores, train.labels);
            Eigen::VectorXd val =
                lda_scores(lda, fpca_scores(fpca, ops, validation.coeffs));
            const double a = auc(val, validation.labels);
            // strict > keeps smaller k on ties (grid scanned ascending).
            if (a > best.validation_auc) {
                best.validation_auc = a;
                best.k = k_eff;
                best.fpca = std::move(fpca);
                best.lda = std::move(lda);
            }
        }
    }
    return best;
}

Eigen::VectorXd method_scores(const GridSearchResult& fitted, const FemOperators& ops,
                              const Eigen::MatrixXd& coeffs) {
    if (fitted.method == Method::FLDA) {
        const DiscriminantModel& model = fitted.flda.value();
        return (coeffs.rowwise() - model.mean_coeffs.transpose()) *
               (ops.mass * model.c_F);
    }
    return lda_scores(*fitted.lda, fpca_scores(*fitted.fpca, ops, coeffs));
}

double ResultTable::mean_auc(Method method, double alpha, Eigen::Index n) const {
    double total = 0.0;
    int count = 0;
    for (const auto& row : rows) {
        if (row.method == method && row.alpha == alpha && row.n == n && !row.failed) {
            total += row.auc;
            ++count;
        }
    }
    return count > 0 ? total / count : std::nan("");
}

ResultTable run_experiment(const ExperimentConfig& config) {
    if (config.alphas.empty() || config.train_sizes.empty() || config.replicates < 1) {
        throw DataError("run_experiment: empty configuration");
    }
    const TriangleMesh mesh = icosphere(config.icosphere_level, config.radius);
    const FemOperators ops = assemble_operators(mesh);
    const EigenBasis basis = laplace_beltrami_eigs(ops, config.basis_size + 1);

    struct Task {
        size_t a_idx, n_idx;
        int rep;
    };
    std::vector<Task> tasks;
    for (size_t a = 0; a < config.alphas.size(); ++a) {
        for (size_t n = 0; n < config.train_sizes.size(); ++n) {
            for (int r = 0; r < config.replicates; ++r) tasks.push_back({a, n, r});
        }
    }

    // Two rows (one per method) per task; assembled in fixed task order so
    // the output is independent of scheduling.
    std::vector<std::array<ResultRow, 2>> results(tasks.size());

    auto run_task = [&](size_t t) {
        const Task& task = tasks[t];
        const double alpha = config.alphas[task.a_idx];
        const Eigen::Index n_total = config.train_sizes[task.n_idx];

        for (int m = 0; m < 2; ++m) {
            ResultRow& row = results[t][m];
            row.method = m == 0 ? Method::FLDA : Method::FPCA_LDA;
            row.alpha = alpha;
            row.n = n_total;
            row.replicate = task.rep;
        }

        try {
            SimConfig sim;
            sim.icosphere_level = config.icosphere_level;
            sim.radius = config.radius;
            sim.basis_size = config.basis_size;
            sim.mean_index = config.mean_index;
            sim.alpha = alpha;

            auto make = [&](Eigen::Index total, uint64_t role) {
                SimConfig c = sim;
                c.n_per_group = total / 2;
                c.seed = draw_key(config.base_seed, task.a_idx, task.n_idx,
                                  static_cast<uint64_t>(task.rep), role);
                return generate_dataset(c, basis);
            };
            const LabeledFunctionalData train = make(n_total, 0);
            const LabeledFunctionalData validation = make(n_total, 1);
            const LabeledFunctionalData test = make(config.test_size, 2);

            const double l_ref = lambda_reference(train.coeffs, ops);
            std::vector<double> l2_grid;
            for (double mult : config.lambda2_multipliers) l2_grid.push_back(mult * l_ref);

            for (int m = 0; m < 2; ++m) {
                ResultRow& row = results[t][m];
                const auto start = std::chrono::steady_clock::now();
                try {
                    GridSearchResult fitted =
                        grid_search(train, validation, row.method, ops, l2_grid,
                                    config.k_grid);
                    row.lambda2 = fitted.lambda2;
                    row.k = fitted.k;
                    row.auc = auc(method_scores(fitted, ops, test.coeffs), test.labels);
                } catch (const std::exception& e) {
                    row.failed = true;
                    row.error = e.what();
                }
                row.seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                        .count();
            }
        } catch (const std::exception& e) {
            for (int m = 0; m < 2; ++m) {
                results[t][m].failed = true;
                results[t][m].error = e.what();
            }
        }
    };

    const int jobs = std::max(1, config.jobs);
    if (jobs == 1) {
        for (size_t t = 0; t < tasks.size(); ++t) run_task(t);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> workers;
        for (int w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (size_t t = next.fetch_add(1); t < tasks.size();
                     t = next.fetch_add(1)) {
                    run_task(t);
                }
            });
        }
        for (auto& w : workers) w.join();
    }

    ResultTable table;
    table.rows.reserve(2 * tasks.size());
    for (const auto& pair : results) {
        table.rows.push_back(pair[0]);
        table.rows.push_back(pair[1]);
    }
    return table;
}

void write_result_csv(const ResultTable& table, const std::string& path,
                      bool include_timings) {
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << "method,alpha,n,replicate,lambda1,lambda2,k,auc,seconds\n";
    char buf[64];
    const auto fmt = [&buf](const char* format, auto value) {
        std::snprintf(buf, sizeof(buf), format, value);
        return std::string(buf);
    };
    for (const auto& row : table.rows) {
        // Nine cells; lambda1 stays empty (experiments are univariate) and
        // failed rows leave the model columns blank.
        std::array<std::string, 9> cells;
        cells[0] = method_name(row.method);
        cells[1] = fmt("%.17g", row.alpha);
        cells[2] = fmt("%ld", static_cast<long>(row.n));
        cells[3] = fmt("%d", row.replicate);
        if (!row.failed) {
            if (row.method == Method::FLDA) cells[5] = fmt("%.17g", row.lambda2);
            else cells[6] = fmt("%ld", static_cast<long>(row.k));
            cells[7] = fmt("%.17g", row.auc);
        }
        if (include_timings) cells[8] = fmt("%.3f", row.seconds);
        for (size_t c = 0; c < cells.size(); ++c) {
            out << cells[c] << (c + 1 < cells.size() ? "," : "\n");
        }
    }
}

ResultTable load_result_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    ResultTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        cells.resize(9);
        ResultRow row;
        row.method = cells[0] == "FLDA" ? Method::FLDA : Method::FPCA_LDA;
        row.alpha = std::stod(cells[1]);
        row.n = std::stol(cells[2]);
        row.replicate = std::stoi(cells[3]);
        if (!cells[5].empty()) row.lambda2 = std::stod(cells[5]);
        if (!cells[6].empty()) row.k = std::stol(cells[6]);
        if (cells[7].empty()) {
            row.failed = true;
        } else {
            row.auc = std::stod(cells[7]);
        }
        if (!cells[8].empty()) row.seconds = std::stod(cells[8]);
        table.rows.push_back(row);
    }
    return table;
}

std::string summary_json(const ResultTable& table) {
    struct Cell {
        std::vector<double> aucs;
    };
    std::map<std::tuple<std::string, double, Eigen::Index>, Cell> cells;
    for (const auto& row : table.rows) {
        if (row.failed) continue;
        cells[{method_name(row.method), row.alpha, row.n}].aucs.push_back(row.auc);
    }
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [key, cell] : cells) {
        const auto& [method, alpha, n] = key;
        const double mean = std::accumulate(cell.aucs.begin(), cell.aucs.end(), 0.0) /
                            static_cast<double>(cell.aucs.size());
        double var = 0.0;
        for (double a : cell.aucs) var += (a - mean) * (a - mean);
        const double sd =
            cell.aucs.size() > 1 ? std::sqrt(var / (cell.aucs.size() - 1.0)) : 0.0;
        j.push_back({{"method", method},
                     {"alpha", alpha},
                     {"n", n},
                     {"replicates", cell.aucs.size()},
                     {"mean_auc", mean},
                     {"sd_auc", sd}});
    }
    return j.dump(2);
}

void write_boxplot_svg(const ResultTable& table, const std::string& path) {
    // Group AUCs by (alpha) panel, then (n, method) box.
    std::vector<double> alphas;
    std::vector<Eigen::Index> sizes;
    for (const auto& row : table.rows) {
        if (std::find(alphas.begin(), alphas.end(), row.alpha) == alphas.end()) {
            alphas.push_back(row.alpha);
        }
        if (std::find(sizes.begin(), sizes.end(), row.n) == sizes.end()) {
            sizes.push_back(row.n);
        }
    }
    std::sort(alphas.begin(), alphas.end());
    std::sort(sizes.begin(), sizes.end());

    const double panel_w = 280, panel_h = 260, margin = 45;
    const double width = margin + alphas.size() * panel_w;
    const double height = panel_h + 70;

    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
        << height << "'>\n<rect width='100%' height='100%' fill='white'/>\n";

    auto ypos = [&](double a) { return 20.0 + (1.0 - a) * panel_h; };

    for (size_t p = 0; p < alphas.size(); ++p) {
        const double x0 = margin + p * panel_w;
        out << "<text x='" << x0 + panel_w / 2 << "' y='15' text-anchor='middle' "
            << "font-size='13'>alpha = " << alphas[p] << "</text>\n";
        // Axis with 0.5 and 1.0 gridlines.
        for (double tick : {0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
            out << "<line x1='" << x0 << "' y1='" << ypos(tick) << "' x2='"
                << x0 + panel_w - 20 << "' y2='" << ypos(tick)
                << "' stroke='#dddddd'/>\n";
            out << "<text x='" << x0 - 4 << "' y='" << ypos(tick) + 4
                << "' text-anchor='end' font-size='9'>" << tick << "</text>\n";
        }
        const double slot = (panel_w - 40.0) / (sizes.size() * 2.0);
        for (size_t ni = 0; ni < sizes.size(); ++ni) {
            for (int m = 0; m < 2; ++m) {
                std::vector<double> vals;
                for (const auto& row : table.rows) {
                    if (row.failed || row.alpha != alphas[p] || row.n != sizes[ni]) continue;
                    if ((m == 0) != (row.method == Method::FLDA)) continue;
                    vals.push_back(row.auc);
                }
                if (vals.empty()) continue;
                std::sort(vals.begin(), vals.end());
                auto quantile = [&](double q) {
                    const double pos = q * (vals.size() - 1);
                    const size_t lo = static_cast<size_t>(pos);
                    const size_t hi = std::min(lo + 1, vals.size() - 1);
                    return vals[lo] + (pos - lo) * (vals[hi] - vals[lo]);
                };
                const double q1 = quantile(0.25), q2 = quantile(0.5), q3 = quantile(0.75);
                const double cx = x0 + 10 + (ni * 2 + m) * slot + slot / 2;
                const double bw = slot * 0.6;
                const std::string color = m == 0 ? "#4477aa" : "#ee6677";
                out << "<line x1='" << cx << "' y1='" << ypos(vals.front()) << "' x2='"
                    << cx << "' y2='" << ypos(vals.back()) << "' stroke='" << color
                    << "'/>\n";
                out << "<rect x='" << cx - bw / 2 << "' y='" << ypos(q3) << "' width='"
                    << bw << "' height='" << ypos(q1) - ypos(q3) << "' fill='" << color
                    << "' fill-opacity='0.5' stroke='" << color << "'/>\n";
                out << "<line x1='" << cx - bw / 2 << "' y1='" << ypos(q2) << "' x2='"
                    << cx + bw / 2 << "' y2='" << ypos(q2) << "' stroke='" << color
                    << "' stroke-width='2'/>\n";
                if (m == 0) {
                    out << "<text x='" << cx + slot / 2 << "' y='" << 20.0 + panel_h + 14
                        << "' text-anchor='middle' font-size='10'>n=" << sizes[ni]
                        << "</text>\n";
                }
            }
        }
    }
    out << "<text x='" << margin << "' y='" << height - 8
        << "' font-size='11' fill='#4477aa'>FLDA</text>\n";
    out << "<text x='" << margin + 50 << "' y='" << height - 8
        << "' font-size='11' fill='#ee6677'>FPCA_LDA</text>\n";
    out << "</svg>\n";
}

}  // namespace flda
