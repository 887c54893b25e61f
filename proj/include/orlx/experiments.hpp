#pragma once

// Experiment drivers. Each experiment runs seeded trials (optionally across
// threads, gathered in trial order), and emits a results document: rows CSV,
// summary CSV, and a JSON document {config, rows, summary, version}. Output is
// byte-for-byte reproducible for a fixed config.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "orlx/lowrank.hpp"
#include "orlx/matrix_io.hpp"
#include "orlx/oracle.hpp"
#include "orlx/parallel.hpp"
#include "orlx/regression.hpp"
#include "orlx/simulate.hpp"

namespace orlx {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { control, delta_sweep, g15, lowrank, ratio };

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::control: return "control";
        case ExperimentKind::delta_sweep: return "delta_sweep";
        case ExperimentKind::g15: return "g15";
        case ExperimentKind::lowrank: return "lowrank";
        case ExperimentKind::ratio: return "ratio";
    }
    return "?";
}

inline ExperimentKind experiment_from_string(const std::string& s) {
    if (s == "control") return ExperimentKind::control;
    if (s == "delta_sweep") return ExperimentKind::delta_sweep;
    if (s == "g15") return ExperimentKind::g15;
    if (s == "lowrank") return ExperimentKind::lowrank;
    if (s == "ratio") return ExperimentKind::ratio;
    throw std::invalid_argument("unknown experiment '" + s + "'");
}

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::control;
    Eigen::Index n = 200, d = 10, k = 5;
    std::string family = "huber";   // Orlicz family for control
    double family_param = 0.75;
    NoiseSpec noise = NoiseSpec::mixed(5.0, 0.03, 1.0);
    int trials = 50;
    SeedSpec seed;
    std::string out_path;           // prefix; empty = no files written
    int threads = 0;                // <= 0: machine parallelism
    std::vector<double> delta_grid{0.05, 0.1, 0.2, 0.4, 1.0, 2.0};
    std::vector<double> scale_grid{0.0, 0.5, 1.0, 2.0};
    // low-rank settings
    LowRankVariant variant = LowRankVariant::experimental;
    int restarts = 50;
    Eigen::Index outliers = 100;
    double outlier_scale = 100.0;
    double p = 1.0;
    std::string input_matrix;             // UCI-style ingestion instead of synthetic
    double ingest_outlier_fraction = 0.01;

    void validate() const {
        if (trials < 1) throw std::invalid_argument("config: trials >= 1 required");
        if (n < 1 || d < 1 || k < 1) throw std::invalid_argument("config: dimensions must be positive");
        noise.validate();
    }
};

struct ResultRow {
    std::string method;
    long trial = 0;
    std::optional<double> param_a;  // experiment-specific (scale s, ...)
    std::optional<double> param_b;  // experiment-specific (delta, ...)
    double value = 0.0;
    bool failed = false;
};

struct ResultsDocument {
    nlohmann::json doc;
    std::string rows_csv;
    std::string summary_csv;

    void write(const std::string& prefix) const {
        {
            std::ofstream f(prefix + ".json");
            if (!f) throw IoError("cannot write " + prefix + ".json");
            f << doc.dump(2) << '\n';
        }
        {
            std::ofstream f(prefix + ".csv");
            if (!f) throw IoError("cannot write " + prefix + ".csv");
            f << rows_csv;
        }
        {
            std::ofstream f(prefix + "_summary.csv");
            if (!f) throw IoError("cannot write " + prefix + "_summary.csv");
            f << summary_csv;
        }
    }
};

namespace detail {

inline std::string fmt(double v) { return format_double(v); }

inline double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return (v.size() % 2) ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline nlohmann::json config_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["experiment"] = to_string(c.experiment);
    j["n"] = c.n;
    j["d"] = c.d;
    j["k"] = c.k;
    j["family"] = c.family;
    j["family_param"] = c.family_param;
    j["noise"] = {{"kind", c.noise.kind == NoiseSpec::Kind::gaussian  ? "gaussian"
                           : c.noise.kind == NoiseSpec::Kind::sparse ? "sparse"
                                                                     : "mixed"},
                  {"sigma", c.noise.sigma},
                  {"fraction", c.noise.fraction},
                  {"scale", c.noise.scale}};
    j["trials"] = c.trials;
    j["seed"] = c.seed.seed;
    j["stream"] = c.seed.stream;
    j["delta_grid"] = c.delta_grid;
    j["scale_grid"] = c.scale_grid;
    j["variant"] = c.variant == LowRankVariant::experimental ? "experimental" : "theoretical";
    j["restarts"] = c.restarts;
    j["outliers"] = c.outliers;
    j["outlier_scale"] = c.outlier_scale;
    j["p"] = c.p;
    if (!c.input_matrix.empty()) j["input_matrix"] = c.input_matrix;
    return j;
}

inline std::string rows_csv(const std::vector<ResultRow>& rows, const std::string& pa_name,
                            const std::string& pb_name, const std::string& value_name) {
    std::ostringstream out;
    out << "method,trial";
    if (!pa_name.empty()) out << ',' << pa_name;
    if (!pb_name.empty()) out << ',' << pb_name;
    out << ',' << value_name << ",failed\n";
    for (const auto& r : rows) {
        out << r.method << ',' << r.trial;
        if (!pa_name.empty()) out << ',' << (r.param_a ? fmt(*r.param_a) : "");
        if (!pb_name.empty()) out << ',' << (r.param_b ? fmt(*r.param_b) : "");
        out << ',' << fmt(r.value) << ',' << (r.failed ? 1 : 0) << '\n';
    }
    return out.str();
}

inline nlohmann::json rows_json(const std::vector<ResultRow>& rows, const std::string& pa_name,
                                const std::string& pb_name, const std::string& value_name) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json o;
        o["method"] = r.method;
        o["trial"] = r.trial;
        if (r.param_a) o[pa_name] = *r.param_a;
        if (r.param_b) o[pb_name] = *r.param_b;
        o[value_name] = r.value;
        if (r.failed) o["failed"] = true;
        arr.push_back(o);
    }
    return arr;
}

// Means grouped by (method, param_a, param_b), insertion-ordered by first use.
struct GroupMeans {
    std::vector<std::string> keys;
    std::map<std::string, std::vector<double>> values;
    void add(const ResultRow& r) {
        if (r.failed) return;
        std::string key = r.method;
        if (r.param_a) key += "|" + fmt(*r.param_a);
        if (r.param_b) key += "|" + fmt(*r.param_b);
        if (!values.count(key)) keys.push_back(key);
        values[key].push_back(r.value);
    }
};

}  // namespace detail

/// The classical baselines used in the comparisons: exact least squares and
/// direct l1 regression on the unsketched data.
inline Eigen::VectorXd classic_l2(const MatrixHandle& A, const Eigen::VectorXd& b) {
    return least_squares(A.to_dense(), b);
}
inline Eigen::VectorXd classic_l1(const MatrixHandle& A, const Eigen::VectorXd& b) {
    return l1_regress(A.to_dense(), b);
}

inline ResultsDocument run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<ResultRow> rows;
    std::string pa_name, pb_name, value_name = "error";
    nlohmann::json summary;

    switch (cfg.experiment) {
        case ExperimentKind::control: {
            // l1 / l2 / Orlicz errors ||x - x*||_2 under the configured noise.
            const auto G = make_orlicz(cfg.family + ":" + std::to_string(cfg.family_param));
            struct TrialOut {
                double e1, e2, eg;
                bool failed = false;
            };
            std::vector<TrialOut> outs(cfg.trials);
            parallel_for(0, cfg.trials, cfg.threads, [&](long t) {
                const SeedSpec ts = cfg.seed.child(t);
                RandomEngine data_rng(ts.child(0));
                auto inst = simulate_regression(cfg.n, cfg.d, cfg.noise, data_rng);
                TrialOut o{};
                try {
                    o.e1 = (classic_l1(inst.A, inst.b) - inst.x_star).norm();
                    o.e2 = (classic_l2(inst.A, inst.b) - inst.x_star).norm();
                    o.eg = (orlicz_regress(G, inst.A, inst.b, {}, ts.child(1)).solution - inst.x_star).norm();
                } catch (const std::exception&) {
                    o.failed = true;
                }
                outs[t] = o;
            });
            for (long t = 0; t < cfg.trials; ++t) {
                rows.push_back({"l1", t, {}, {}, outs[t].e1, outs[t].failed});
                rows.push_back({"l2", t, {}, {}, outs[t].e2, outs[t].failed});
                rows.push_back({"orlicz", t, {}, {}, outs[t].eg, outs[t].failed});
            }
            break;
        }

        case ExperimentKind::delta_sweep: {
            // Huber-delta sweep across sparse-noise scales; all deltas see the
            // same per-trial instance so the argmin comparison is paired.
            pa_name = "s";
            pb_name = "delta";
            const auto S = cfg.scale_grid.size();
            const auto D = cfg.delta_grid.size();
            std::vector<double> errs(S * D * cfg.trials, 0.0);
            std::vector<char> fails(S * D * cfg.trials, 0);
            parallel_for(0, long(S) * cfg.trials, cfg.threads, [&](long idx) {
                const std::size_t si = idx / cfg.trials;
                const long t = idx % cfg.trials;
                const SeedSpec ts = cfg.seed.child(si * 100003 + t);
                RandomEngine data_rng(ts.child(0));
                auto inst = simulate_regression(
                    cfg.n, cfg.d, NoiseSpec::mixed(cfg.noise.sigma, cfg.noise.fraction, cfg.scale_grid[si]),
                    data_rng);
                for (std::size_t di = 0; di < D; ++di) {
                    const std::size_t slot = (si * D + di) * cfg.trials + t;
                    try {
                        const auto G = OrliczFunction::huber(cfg.delta_grid[di]);
                        errs[slot] =
                            (orlicz_regress(G, inst.A, inst.b, {}, ts.child(1 + di)).solution - inst.x_star)
                                .norm();
                    } catch (const std::exception&) {
                        fails[slot] = 1;
                    }
                }
            });
            for (std::size_t si = 0; si < S; ++si)
                for (std::size_t di = 0; di < D; ++di)
                    for (long t = 0; t < cfg.trials; ++t) {
                        const std::size_t slot = (si * D + di) * cfg.trials + t;
                        rows.push_back({"huber", t, cfg.scale_grid[si], cfg.delta_grid[di], errs[slot],
                                        fails[slot] != 0});
                    }
            break;
        }

        case ExperimentKind::g15: {
            // One large outlier plus Gaussian noise; compare generators.
            const std::vector<std::pair<std::string, std::string>> methods = {
                {"l1", ""},         {"l15_power", "power:1.5"}, {"l2", ""},
                {"huber_0.25", "huber:0.25"}, {"huber_0.75", "huber:0.75"}, {"g_l15", "l15:0.25"}};
            const auto M = methods.size();
            std::vector<double> errs(M * cfg.trials, 0.0);
            std::vector<char> fails(M * cfg.trials, 0);
            const NoiseSpec noise = NoiseSpec::mixed(cfg.noise.sigma, 1.0 / double(cfg.n), cfg.noise.scale);
            parallel_for(0, cfg.trials, cfg.threads, [&](long t) {
                const SeedSpec ts = cfg.seed.child(t);
                RandomEngine data_rng(ts.child(0));
                auto inst = simulate_regression(cfg.n, cfg.d, noise, data_rng);
                for (std::size_t m = 0; m < M; ++m) {
                    const std::size_t slot = m * cfg.trials + t;
                    try {
                        Eigen::VectorXd x;
                        if (methods[m].first == "l1")
                            x = classic_l1(inst.A, inst.b);
                        else if (methods[m].first == "l2")
                            x = classic_l2(inst.A, inst.b);
                        else
                            x = orlicz_regress(make_orlicz(methods[m].second), inst.A, inst.b, {},
                                               ts.child(1 + m))
                                    .solution;
                        errs[slot] = (x - inst.x_star).norm();
                    } catch (const std::exception&) {
                        fails[slot] = 1;
                    }
                }
            });
            for (std::size_t m = 0; m < M; ++m)
                for (long t = 0; t < cfg.trials; ++t)
                    rows.push_back({methods[m].first, t, {}, {}, errs[m * cfg.trials + t],
                                    fails[m * cfg.trials + t] != 0});
            break;
        }

        case ExperimentKind::lowrank: {
            value_name = "loss_1";
            LowRankOptions lr;
            lr.variant = cfg.variant;
            lr.restarts = cfg.restarts;
            if (!cfg.input_matrix.empty()) {
                // Ingested matrix: apply the outlier recipe once, then sweep ranks.
                MatrixHandle base = load_matrix(cfg.input_matrix);
                RandomEngine rng(cfg.seed.child(0));
                Eigen::MatrixXd Ad = base.to_dense();
                const auto count = static_cast<Eigen::Index>(
                    std::ceil(cfg.ingest_outlier_fraction * double(Ad.size())));
                for (Eigen::Index flat : detail::distinct_indices(Ad.size(), count, rng)) {
                    const Eigen::Index i = flat / Ad.cols(), j = flat % Ad.cols();
                    Ad(i, j) += rng.uniform(-cfg.outlier_scale, cfg.outlier_scale);
                }
                const MatrixHandle A = MatrixHandle::dense(std::move(Ad));
                pa_name = "k";
                for (Eigen::Index kk = 1; kk <= cfg.k; ++kk) {
                    const auto ours = lp_lowrank(A, kk, cfg.p, lr, cfg.seed.child(1 + kk));
                    const auto pca = pca_baseline(A, kk, cfg.p);
                    rows.push_back({"ours", 0, double(kk), {}, ours.loss_p, false});
                    rows.push_back({"pca", 0, double(kk), {}, pca.loss_p, false});
                }
            } else {
                struct TrialOut {
                    double ours, pca, planted;
                    bool failed = false;
                };
                std::vector<TrialOut> outs(cfg.trials);
                parallel_for(0, cfg.trials, cfg.threads, [&](long t) {
                    const SeedSpec ts = cfg.seed.child(t);
                    RandomEngine data_rng(ts.child(0));
                    Eigen::MatrixXd planted;
                    auto A = simulate_lowrank(cfg.n, cfg.d, cfg.k, cfg.outliers, cfg.outlier_scale,
                                              data_rng, &planted);
                    TrialOut o{};
                    try {
                        o.ours = lp_lowrank(A, cfg.k, cfg.p, lr, ts.child(1)).loss_p;
                        o.pca = pca_baseline(A, cfg.k, cfg.p).loss_p;
                        o.planted = std::pow(entrywise_lp(
                            Eigen::MatrixXd(A.dense_data() - planted), cfg.p), cfg.p);
                    } catch (const std::exception&) {
                        o.failed = true;
                    }
                    outs[t] = o;
                });
                for (long t = 0; t < cfg.trials; ++t) {
                    rows.push_back({"ours", t, {}, {}, outs[t].ours, outs[t].failed});
                    rows.push_back({"pca", t, {}, {}, outs[t].pca, outs[t].failed});
                    rows.push_back({"planted", t, {}, {}, outs[t].planted, outs[t].failed});
                }
            }
            break;
        }

        case ExperimentKind::ratio: {
            pa_name = "s";
            pb_name = "delta";
            value_name = "ratio";
            const std::vector<double> scales = cfg.scale_grid;
            const std::vector<double> deltas = cfg.delta_grid;
            const auto S = scales.size(), D = deltas.size();
            std::vector<double> ratios(S * D * cfg.trials, 0.0);
            std::vector<char> fails(S * D * cfg.trials, 0);
            parallel_for(0, long(S * D) * cfg.trials, cfg.threads, [&](long idx) {
                const std::size_t cell = idx / cfg.trials;
                const long t = idx % cfg.trials;
                const std::size_t si = cell / D, di = cell % D;
                const SeedSpec ts = cfg.seed.child(cell * 100003 + t);
                RandomEngine data_rng(ts.child(0));
                auto inst = simulate_regression(
                    cfg.n, cfg.d, NoiseSpec::mixed(cfg.noise.sigma, cfg.noise.fraction, scales[si]),
                    data_rng);
                const std::size_t slot = cell * cfg.trials + t;
                try {
                    const auto G = OrliczFunction::huber(deltas[di]);
                    const auto out = orlicz_regress(G, inst.A, inst.b, {}, ts.child(1));
                    const auto opt = oracle_solve(G, inst.A, inst.b);
                    ratios[slot] = approximation_ratio(G, inst.A, inst.b, out.solution, opt);
                } catch (const std::exception&) {
                    fails[slot] = 1;
                }
            });
            std::vector<double> all;
            for (std::size_t cell = 0; cell < S * D; ++cell)
                for (long t = 0; t < cfg.trials; ++t) {
                    const std::size_t slot = cell * cfg.trials + t;
                    rows.push_back({"huber", t, scales[cell / D], deltas[cell % D], ratios[slot],
                                    fails[slot] != 0});
                    if (!fails[slot]) all.push_back(ratios[slot]);
                }
            if (!all.empty()) {
                summary["worst_ratio"] = *std::max_element(all.begin(), all.end());
                summary["median_ratio"] = detail::median_of(all);
            }
            break;
        }
    }

    // Group means (the per-cell numbers the tables and plots are built from).
    detail::GroupMeans gm;
    for (const auto& r : rows) gm.add(r);
    std::ostringstream sum_csv;
    sum_csv << "group,mean_" << value_name << ",count\n";
    nlohmann::json means;
    for (const auto& key : gm.keys) {
        const double m = detail::mean_of(gm.values[key]);
        sum_csv << key << ',' << detail::fmt(m) << ',' << gm.values[key].size() << '\n';
        means[key] = m;
    }
    summary["means"] = means;

    ResultsDocument doc;
    doc.doc["config"] = detail::config_json(cfg);
    doc.doc["rows"] = detail::rows_json(rows, pa_name, pb_name, value_name);
    doc.doc["summary"] = summary;
    doc.doc["version"] = kVersion;
    doc.rows_csv = detail::rows_csv(rows, pa_name, pb_name, value_name);
    doc.summary_csv = sum_csv.str();
    if (!cfg.out_path.empty()) doc.write(cfg.out_path);
    return doc;
}

/// Flat key=value config file ('#' comments allowed) mirroring ExperimentConfig.
inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config: " + path);
    ExperimentConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    std::string noise_kind = "mixed";
    double sigma = cfg.noise.sigma, fraction = cfg.noise.fraction, scale = cfg.noise.scale;
    while (std::getline(f, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw IoError(path + ":" + std::to_string(line_no) + ": expected key=value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        auto parse_list = [&](const std::string& v) {
            std::vector<double> out;
            std::istringstream ss(v);
            std::string tok;
            while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
            return out;
        };
        try {
            if (key == "experiment") cfg.experiment = experiment_from_string(val);
            else if (key == "n") cfg.n = std::stol(val);
            else if (key == "d") cfg.d = std::stol(val);
            else if (key == "k") cfg.k = std::stol(val);
            else if (key == "family") cfg.family = val;
            else if (key == "family_param") cfg.family_param = std::stod(val);
            else if (key == "noise") noise_kind = val;
            else if (key == "sigma") sigma = std::stod(val);
            else if (key == "fraction") fraction = std::stod(val);
            else if (key == "scale") scale = std::stod(val);
            else if (key == "trials") cfg.trials = std::stoi(val);
            else if (key == "seed") cfg.seed.seed = std::stoull(val);
            else if (key == "stream") cfg.seed.stream = std::stoull(val);
            else if (key == "out") cfg.out_path = val;
            else if (key == "threads") cfg.threads = std::stoi(val);
            else if (key == "delta_grid") cfg.delta_grid = parse_list(val);
            else if (key == "scale_grid") cfg.scale_grid = parse_list(val);
            else if (key == "variant")
                cfg.variant = (val == "theoretical") ? LowRankVariant::theoretical
                                                     : LowRankVariant::experimental;
            else if (key == "restarts") cfg.restarts = std::stoi(val);
            else if (key == "outliers") cfg.outliers = std::stol(val);
            else if (key == "outlier_scale") cfg.outlier_scale = std::stod(val);
            else if (key == "p") cfg.p = std::stod(val);
            else if (key == "input_matrix") cfg.input_matrix = val;
            else if (key == "ingest_outlier_fraction") cfg.ingest_outlier_fraction = std::stod(val);
            else throw std::invalid_argument("unknown key '" + key + "'");
        } catch (const IoError&) {
            throw;
        } catch (const std::exception& e) {
            throw IoError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (noise_kind == "gaussian") cfg.noise = NoiseSpec::gaussian(sigma);
    else if (noise_kind == "sparse") cfg.noise = NoiseSpec::sparse(fraction, scale);
    else if (noise_kind == "mixed") cfg.noise = NoiseSpec::mixed(sigma, fraction, scale);
    else throw IoError(path + ": unknown noise kind '" + noise_kind + "'");
    return cfg;
}

}  // namespace orlx
