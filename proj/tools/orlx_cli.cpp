// orlx command line: norms, sketched regression, combined/LASSO regression,
// entrywise-l_p low-rank approximation, data simulation, the gradient-descent
// oracle, and the experiment drivers.
//
// Exit codes: 0 success, 1 validation/usage error, 2 numerical failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "orlx/experiments.hpp"
#include "orlx/lowrank.hpp"
#include "orlx/matrix_io.hpp"
#include "orlx/oracle.hpp"
#include "orlx/regression.hpp"
#include "orlx/simulate.hpp"

namespace {

using nlohmann::json;

struct GlobalOpts {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    int threads = 0;
    std::string format = "json";  // csv | json
    std::string out;
};

orlx::SeedSpec seed_of(const GlobalOpts& g) { return {g.seed, g.stream}; }

void emit(const GlobalOpts& g, const json& doc, const std::string& csv) {
    const std::string text = (g.format == "csv") ? csv : doc.dump(2) + "\n";
    if (g.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(g.out);
        if (!f) throw orlx::IoError("cannot write " + g.out);
        f << text;
    }
}

json solution_json(const orlx::RegressionOutput& out) {
    json j;
    j["solution"] = std::vector<double>(out.solution.data(), out.solution.data() + out.solution.size());
    j["loss"] = out.loss;
    j["t1"] = out.t1;
    j["t2"] = out.t2;
    j["t3"] = out.t3;
    j["seed"] = out.seed.seed;
    j["stream"] = out.seed.stream;
    j["wall_time_sec"] = out.wall_time_sec;
    return j;
}

std::string solution_csv(const orlx::RegressionOutput& out) {
    std::ostringstream ss;
    ss << "index,value\n";
    for (Eigen::Index i = 0; i < out.solution.size(); ++i)
        ss << i << ',' << orlx::detail::format_double(out.solution[i]) << '\n';
    ss << "loss," << orlx::detail::format_double(out.loss) << '\n';
    return ss.str();
}

Eigen::VectorXd load_vector(const std::string& path) {
    const Eigen::MatrixXd m = orlx::load_dense_csv(path);
    if (m.cols() == 1) return m.col(0);
    if (m.rows() == 1) return m.row(0).transpose();
    throw orlx::IoError(path + ": expected a vector (one row or one column)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orlicz-norm sketching, regression, and low-rank approximation"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--stream", g.stream, "random substream index");
    app.add_option("--threads", g.threads, "worker threads (0 = machine parallelism)");
    app.add_option("--format", g.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", g.out, "output path (default: stdout)");

    // norm
    auto* norm = app.add_subcommand("norm", "Orlicz norm of a vector");
    std::string norm_g = "huber:0.75", norm_in;
    norm->add_option("--G", norm_g, "Orlicz family, e.g. huber:0.75, power:1.5, l1l2");
    norm->add_option("input", norm_in, "dense CSV holding the vector")->required();

    // regress
    auto* reg = app.add_subcommand("regress", "sketched Orlicz-norm regression");
    std::string reg_g = "huber:0.75", reg_a, reg_b;
    bool reg_full = false;
    reg->add_option("--G", reg_g, "Orlicz family");
    reg->add_option("-A,--matrix", reg_a, "design matrix CSV")->required();
    reg->add_option("-b,--rhs", reg_b, "response vector CSV")->required();
    reg->add_flag("--full-sketch", reg_full, "force the full Pi2 Pi1 D^-1 pipeline");

    // combined
    auto* comb = app.add_subcommand("combined", "combined-loss regression");
    std::vector<std::string> comb_terms;
    comb->add_option("--term", comb_terms, "term as FAMILY[:PARAM]:A.csv:b.csv (repeatable)")
        ->required();

    // lasso
    auto* las = app.add_subcommand("lasso", "l2 + lambda l1 regression");
    std::string las_a, las_b;
    double las_lambda = 1.0;
    las->add_option("-A,--matrix", las_a, "design matrix CSV")->required();
    las->add_option("-b,--rhs", las_b, "response vector CSV")->required();
    las->add_option("--lambda", las_lambda, "l1 penalty weight");

    // lowrank
    auto* low = app.add_subcommand("lowrank", "entrywise-l_p low-rank approximation");
    std::string low_a, low_variant = "experimental";
    long low_k = 5;
    double low_p = 1.0;
    int low_restarts = 50;
    low->add_option("-A,--matrix", low_a, "input matrix CSV (dense or sparse)")->required();
    low->add_option("-k,--rank", low_k, "target rank");
    low->add_option("-p", low_p, "entrywise norm exponent in [1,2]");
    low->add_option("--variant", low_variant, "theoretical or experimental")
        ->check(CLI::IsMember({"theoretical", "experimental"}));
    low->add_option("--restarts", low_restarts, "independent restarts, best kept");

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate synthetic data");
    std::string sim_kind = "regression", sim_noise = "mixed";
    long sim_n = 200, sim_d = 10, sim_k = 5, sim_outliers = 100;
    double sim_sigma = 5.0, sim_fraction = 0.03, sim_scale = 1.0, sim_outlier_scale = 100.0;
    sim->add_option("--kind", sim_kind, "regression or lowrank")
        ->check(CLI::IsMember({"regression", "lowrank"}));
    sim->add_option("-n", sim_n, "rows");
    sim->add_option("-d", sim_d, "columns");
    sim->add_option("-k", sim_k, "planted rank (lowrank)");
    sim->add_option("--noise", sim_noise, "gaussian, sparse, or mixed")
        ->check(CLI::IsMember({"gaussian", "sparse", "mixed"}));
    sim->add_option("--sigma", sim_sigma, "Gaussian noise stddev");
    sim->add_option("--fraction", sim_fraction, "sparse noise fraction");
    sim->add_option("--scale", sim_scale, "sparse noise scale");
    sim->add_option("--outliers", sim_outliers, "outlier count (lowrank)");
    sim->add_option("--outlier-scale", sim_outlier_scale, "outlier magnitude (lowrank)");

    // oracle
    auto* ora = app.add_subcommand("oracle", "gradient-descent optimum of ||Ax-b||_G");
    std::string ora_g = "huber:0.75", ora_a, ora_b;
    double ora_lr = 0.001, ora_stop = 1e-7;
    long ora_max_iter = 100000;
    ora->add_option("--G", ora_g, "Orlicz family");
    ora->add_option("-A,--matrix", ora_a, "design matrix CSV")->required();
    ora->add_option("-b,--rhs", ora_b, "response vector CSV")->required();
    ora->add_option("--lr", ora_lr, "learning rate");
    ora->add_option("--stop", ora_stop, "per-step improvement threshold");
    ora->add_option("--max-iter", ora_max_iter, "iteration cap");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a configured experiment");
    std::string exp_config;
    exp->add_option("config", exp_config, "flat key=value config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*norm) {
            const auto G = orlx::make_orlicz(norm_g);
            const double v = orlx::orlicz_norm(G, load_vector(norm_in));
            json j;
            j["norm"] = v;
            j["G"] = G.name();
            emit(g, j, "norm\n" + orlx::detail::format_double(v) + "\n");
        } else if (*reg) {
            const auto A = orlx::load_matrix(reg_a);
            const auto b = load_vector(reg_b);
            orlx::RegressOptions opts;
            if (reg_full) opts.diagonal_only = false;
            const auto out = orlx::orlicz_regress(orlx::make_orlicz(reg_g), A, b, opts, seed_of(g));
            emit(g, solution_json(out), solution_csv(out));
        } else if (*comb) {
            std::vector<orlx::CombinedTerm> terms;
            for (const auto& spec : comb_terms) {
                // FAMILY[:PARAM]:A.csv:b.csv, split from the right
                const auto p2 = spec.rfind(':');
                if (p2 == std::string::npos) throw std::invalid_argument("bad --term: " + spec);
                const auto p1 = spec.rfind(':', p2 - 1);
                if (p1 == std::string::npos) throw std::invalid_argument("bad --term: " + spec);
                terms.push_back({orlx::make_orlicz(spec.substr(0, p1)),
                                 orlx::load_matrix(spec.substr(p1 + 1, p2 - p1 - 1)),
                                 load_vector(spec.substr(p2 + 1))});
            }
            const auto out = orlx::combined_regress(terms, {}, seed_of(g));
            emit(g, solution_json(out), solution_csv(out));
        } else if (*las) {
            const auto out = orlx::lasso(orlx::load_matrix(las_a), load_vector(las_b), las_lambda,
                                         {}, seed_of(g));
            emit(g, solution_json(out), solution_csv(out));
        } else if (*low) {
            orlx::LowRankOptions opts;
            opts.variant = (low_variant == "theoretical") ? orlx::LowRankVariant::theoretical
                                                          : orlx::LowRankVariant::experimental;
            opts.restarts = low_restarts;
            const auto A = orlx::load_matrix(low_a);
            const auto f = orlx::lp_lowrank(A, low_k, low_p, opts, seed_of(g));
            json j;
            j["k"] = f.k;
            j["loss_p"] = f.loss_p;
            j["p"] = low_p;
            if (!g.out.empty()) {
                orlx::save_dense_csv(g.out + "_U.csv", f.U);
                orlx::save_dense_csv(g.out + "_V.csv", f.V);
                j["U"] = g.out + "_U.csv";
                j["V"] = g.out + "_V.csv";
            }
            std::cout << j.dump(2) << "\n";
        } else if (*sim) {
            const std::string prefix = g.out.empty() ? std::string("sim") : g.out;
            orlx::RandomEngine rng(seed_of(g));
            if (sim_kind == "regression") {
                orlx::NoiseSpec noise = sim_noise == "gaussian"
                                            ? orlx::NoiseSpec::gaussian(sim_sigma)
                                        : sim_noise == "sparse"
                                            ? orlx::NoiseSpec::sparse(sim_fraction, sim_scale)
                                            : orlx::NoiseSpec::mixed(sim_sigma, sim_fraction, sim_scale);
                const auto inst = orlx::simulate_regression(sim_n, sim_d, noise, rng);
                orlx::save_dense_csv(prefix + "_A.csv", inst.A.dense_data());
                orlx::save_dense_csv(prefix + "_b.csv", inst.b);
                orlx::save_dense_csv(prefix + "_xstar.csv", inst.x_star);
                std::cout << "wrote " << prefix << "_{A,b,xstar}.csv\n";
            } else {
                const auto A =
                    orlx::simulate_lowrank(sim_n, sim_d, sim_k, sim_outliers, sim_outlier_scale, rng);
                orlx::save_dense_csv(prefix + "_A.csv", A.dense_data());
                std::cout << "wrote " << prefix << "_A.csv\n";
            }
        } else if (*ora) {
            const auto A = orlx::load_matrix(ora_a);
            const auto b = load_vector(ora_b);
            orlx::OracleOptions opts;
            opts.lr = ora_lr;
            opts.stop = ora_stop;
            opts.max_iter = ora_max_iter;
            const auto res = orlx::oracle_solve(orlx::make_orlicz(ora_g), A, b, opts);
            json j;
            j["x"] = std::vector<double>(res.x.data(), res.x.data() + res.x.size());
            j["loss"] = res.loss;
            j["iterations"] = res.iterations;
            j["converged"] = res.converged;
            std::ostringstream csv;
            csv << "index,value\n";
            for (Eigen::Index i = 0; i < res.x.size(); ++i)
                csv << i << ',' << orlx::detail::format_double(res.x[i]) << '\n';
            csv << "loss," << orlx::detail::format_double(res.loss) << '\n';
            emit(g, j, csv.str());
        } else if (*exp) {
            auto cfg = orlx::parse_config_file(exp_config);
            if (cfg.threads == 0) cfg.threads = g.threads;
            if (cfg.seed == orlx::SeedSpec{} && (g.seed || g.stream)) cfg.seed = seed_of(g);
            if (cfg.out_path.empty() && !g.out.empty()) cfg.out_path = g.out;
            const auto doc = orlx::run_experiment(cfg);
            if (cfg.out_path.empty())
                std::cout << (g.format == "csv" ? doc.rows_csv : doc.doc.dump(2) + "\n");
            else
                std::cout << "wrote " << cfg.out_path << "{.json,.csv,_summary.csv}\n";
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const orlx::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const orlx::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
