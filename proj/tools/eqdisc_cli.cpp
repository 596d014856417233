// Command-line experiment driver: simulate benchmark trajectories, fit them
// with any of the four methods, compare methods side by side, and render
// saved models.

#include "eqdisc/adaptive_growth.hpp"
#include "eqdisc/dual_lasso.hpp"
#include "eqdisc/dynamics.hpp"
#include "eqdisc/errors.hpp"
#include "eqdisc/stridge.hpp"
#include "eqdisc/symbolic.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string system = "lorenz63";
    std::string method = "dual_lasso";
    std::string derivatives = "exact";
    std::string x0 = "1,1,1";
    std::string out = ".";
    std::string input; // custom trajectory CSV
    std::string config;
    double dt = 0.001;
    int steps = 10000;
    int degree = 3;
    double lambda = 0.0;  // 0: default rule per method
    double lambda2 = -1.0;
    double tau_final = 0.01;
    long long seed = 0;
    bool include_p20 = false;
};

Eigen::VectorXd parse_x0(const std::string& text) {
    std::vector<double> vals;
    std::istringstream is(text);
    std::string cell;
    while (std::getline(is, cell, ',')) {
        try {
            vals.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw eqdisc::config_error("bad --x0 component: '" + cell + "'");
        }
    }
    if (vals.empty()) throw eqdisc::config_error("--x0 must list at least one value");
    return Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
}

eqdisc::OdeSystem named_system(const std::string& name) {
    if (name == "lorenz63") return eqdisc::lorenz63();
    if (name == "lorenz_quadratic") return eqdisc::lorenz_quadratic();
    throw eqdisc::config_error("unknown system '" + name + "' (lorenz63 | lorenz_quadratic)");
}

eqdisc::StateTrajectory load_trajectory(const Options& opt) {
    eqdisc::StateTrajectory traj;
    if (!opt.input.empty()) {
        traj = eqdisc::read_trajectory_csv(opt.input);
    } else {
        traj = eqdisc::integrate(named_system(opt.system), parse_x0(opt.x0), opt.dt, opt.steps);
    }
    if (opt.derivatives == "fd") return eqdisc::with_fd_derivatives(traj);
    if (opt.derivatives != "exact")
        throw eqdisc::config_error("--derivatives must be 'exact' or 'fd'");
    return traj;
}

struct FitResult {
    eqdisc::SparseLinearModel model;
    eqdisc::GrowthTrace trace; // adaptive only
    bool has_trace = false;
    double wall_seconds = 0.0;
};

FitResult run_fit(const eqdisc::StateTrajectory& traj, const Options& opt,
                  const std::string& method) {
    const auto t0 = std::chrono::steady_clock::now();
    FitResult res;
    if (method == "lasso") {
        const auto lib = eqdisc::enumerate_monomials(traj.dimension(), opt.degree);
        res.model = eqdisc::fit_lasso(traj, lib, opt.lambda);
    } else if (method == "dual_lasso") {
        const auto lib = eqdisc::enumerate_monomials(traj.dimension(), opt.degree);
        eqdisc::DualLassoOptions dlo;
        dlo.lambda = opt.lambda;
        dlo.lambda2 = opt.lambda2;
        res.model = eqdisc::fit_dual_lasso(traj, lib, dlo);
    } else if (method == "stridge") {
        const auto lib = eqdisc::enumerate_monomials(traj.dimension(), opt.degree);
        eqdisc::StridgeConfig cfg;
        if (opt.lambda > 0.0) cfg.lambda0 = opt.lambda;
        res.model = eqdisc::fit_stridge(traj, lib, cfg);
    } else if (method == "adaptive") {
        eqdisc::GrowthConfig cfg;
        cfg.max_degree = std::max(opt.degree, 2);
        if (opt.lambda > 0.0) cfg.lambda0 = opt.lambda;
        auto [model, trace] = eqdisc::grow(traj, cfg);
        res.model = std::move(model);
        res.trace = std::move(trace);
        res.has_trace = true;
    } else {
        throw eqdisc::config_error("unknown method '" + method +
                                   "' (lasso | dual_lasso | stridge | adaptive)");
    }
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

json score_json(const eqdisc::DiscoveredModel& discovered, const Options& opt,
                const Eigen::VectorXd& scales) {
    json j;
    if (opt.input.empty()) {
        const auto sys = named_system(opt.system);
        if (sys.true_model) {
            const auto score =
                eqdisc::score_against_truth(discovered, *sys.true_model, scales, opt.tau_final);
            j["precision"] = score.precision;
            j["recall"] = score.recall;
            j["max_coefficient_error"] = score.max_coefficient_error;
        }
    }
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw eqdisc::config_error("cannot open for writing: " + path.string());
    f << text;
}

int cmd_simulate(const Options& opt) {
    const auto traj = load_trajectory(opt);
    eqdisc::write_trajectory_csv(traj, opt.out);
    std::cout << "wrote " << traj.samples() << " samples to " << opt.out << "\n";
    return 0;
}

int cmd_fit(const Options& opt) {
    const auto traj = load_trajectory(opt);
    const auto res = run_fit(traj, opt, opt.method);
    fs::create_directories(opt.out);

    write_text(fs::path(opt.out) / "model.json", eqdisc::model_to_json(res.model));
    write_text(fs::path(opt.out) / "library.json", eqdisc::library_to_json(res.model.library));
    if (res.has_trace)
        eqdisc::write_trace_csv(res.trace, (fs::path(opt.out) / "growth_trace.csv").string());

    const auto expanded = eqdisc::expand_model(res.model);
    const auto simplified =
        eqdisc::threshold_model(expanded, res.model.library.scales, opt.tau_final);
    write_text(fs::path(opt.out) / "equations.txt",
               eqdisc::render_model(simplified, res.model.library.scales));

    json summary;
    summary["method"] = opt.method;
    summary["system"] = opt.input.empty() ? opt.system : opt.input;
    summary["seed"] = opt.seed;
    summary["degree"] = opt.degree;
    summary["lambda"] = res.model.lambda;
    summary["lambda2"] = res.model.lambda2;
    summary["residual_fro"] = res.model.residual_fro;
    summary["wall_seconds"] = res.wall_seconds;
    json nnz = json::array();
    for (const auto& act : res.model.active) nnz.push_back(act.size());
    summary["nonzeros"] = nnz;
    summary["score"] = score_json(simplified, opt, res.model.library.scales);
    write_text(fs::path(opt.out) / "summary.json", summary.dump(2));

    std::cout << eqdisc::render_model(simplified, res.model.library.scales);
    return 0;
}

int cmd_compare(const Options& opt) {
    const auto traj = load_trajectory(opt);
    fs::create_directories(opt.out);

    std::vector<int> degrees{3, 10};
    if (opt.include_p20) degrees.push_back(20);

    struct Row {
        std::string method;
        int degree;
        FitResult res;
    };
    std::vector<std::future<Row>> futures;
    for (const std::string method : {"lasso", "dual_lasso", "stridge"}) {
        for (int p : degrees) {
            futures.push_back(std::async(std::launch::async, [&, method, p] {
                Options o = opt;
                o.degree = p;
                return Row{method, p, run_fit(traj, o, method)};
            }));
        }
    }
    futures.push_back(std::async(std::launch::async, [&] {
        Options o = opt;
        o.degree = 6; // candidate degree cap for the growth loop
        return Row{"adaptive", 6, run_fit(traj, o, "adaptive")};
    }));

    std::ostringstream csv;
    csv << "method,degree,residual_rel,total_nonzeros,precision,recall,wall_seconds\n";
    json report = json::array();
    const double dnorm = traj.derivatives.norm();
    for (auto& fut : futures) {
        Row row = fut.get();
        const auto expanded = eqdisc::expand_model(row.res.model);
        const auto simplified =
            eqdisc::threshold_model(expanded, row.res.model.library.scales, opt.tau_final);
        int nnz = 0;
        for (const auto& act : row.res.model.active) nnz += static_cast<int>(act.size());
        json entry;
        entry["method"] = row.method;
        entry["degree"] = row.degree;
        entry["residual_fro"] = row.res.model.residual_fro;
        entry["residual_rel"] = dnorm > 0 ? row.res.model.residual_fro / dnorm : 0.0;
        entry["total_nonzeros"] = nnz;
        entry["wall_seconds"] = row.res.wall_seconds;
        entry["score"] = score_json(simplified, opt, row.res.model.library.scales);
        entry["model"] = json::parse(eqdisc::model_to_json(row.res.model));
        report.push_back(entry);
        csv << row.method << "," << row.degree << "," << entry["residual_rel"] << "," << nnz
            << "," << (entry["score"].contains("precision")
                           ? entry["score"]["precision"].dump()
                           : "")
            << ","
            << (entry["score"].contains("recall") ? entry["score"]["recall"].dump() : "") << ","
            << row.res.wall_seconds << "\n";
    }
    write_text(fs::path(opt.out) / "comparison.json", report.dump(2));
    write_text(fs::path(opt.out) / "comparison.csv", csv.str());
    std::cout << csv.str();
    return 0;
}

int cmd_report(const Options& opt) {
    std::ifstream f(opt.input);
    if (!f) throw eqdisc::config_error("cannot open model JSON: " + opt.input);
    std::stringstream buf;
    buf << f.rdbuf();
    const auto model = eqdisc::model_from_json(buf.str());
    const auto expanded = eqdisc::expand_model(model);
    const auto simplified = eqdisc::threshold_model(expanded, model.library.scales, opt.tau_final);
    std::cout << eqdisc::render_model(simplified, model.library.scales);
    if (!opt.system.empty()) {
        const auto sys = named_system(opt.system);
        if (sys.true_model) {
            const auto score = eqdisc::score_against_truth(simplified, *sys.true_model,
                                                           model.library.scales, opt.tau_final);
            std::cout << "precision " << score.precision << "  recall " << score.recall
                      << "  max_coefficient_error " << score.max_coefficient_error << "\n";
        }
    }
    return 0;
}

// JSON config file: any top-level key matching a flag name provides its
// default; explicit command-line flags win.
void apply_config(const std::string& path, Options& opt) {
    std::ifstream f(path);
    if (!f) throw eqdisc::config_error("cannot open config: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw eqdisc::config_error(std::string("config parse: ") + e.what());
    }
    if (j.contains("system")) opt.system = j["system"].get<std::string>();
    if (j.contains("method")) opt.method = j["method"].get<std::string>();
    if (j.contains("derivatives")) opt.derivatives = j["derivatives"].get<std::string>();
    if (j.contains("x0")) opt.x0 = j["x0"].get<std::string>();
    if (j.contains("out")) opt.out = j["out"].get<std::string>();
    if (j.contains("input")) opt.input = j["input"].get<std::string>();
    if (j.contains("dt")) opt.dt = j["dt"].get<double>();
    if (j.contains("steps")) opt.steps = j["steps"].get<int>();
    if (j.contains("degree")) opt.degree = j["degree"].get<int>();
    if (j.contains("lambda")) opt.lambda = j["lambda"].get<double>();
    if (j.contains("lambda2")) opt.lambda2 = j["lambda2"].get<double>();
    if (j.contains("tau_final")) opt.tau_final = j["tau_final"].get<double>();
    if (j.contains("seed")) opt.seed = j["seed"].get<long long>();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse discovery of governing equations from trajectory data"};
    app.require_subcommand(1);

    Options opt;
    // pre-scan for --config so files provide defaults that flags override
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                apply_config(argv[i + 1], opt);
            } catch (const eqdisc::config_error& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return 2;
            }
        }
    }

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "JSON config file (flags override)");
        sub->add_option("--system", opt.system, "lorenz63 | lorenz_quadratic");
        sub->add_option("--dt", opt.dt, "integration step");
        sub->add_option("--steps", opt.steps, "integration steps");
        sub->add_option("--x0", opt.x0, "initial state, comma separated");
        sub->add_option("--seed", opt.seed, "experiment seed (recorded in outputs)");
        sub->add_option("--derivatives", opt.derivatives, "exact | fd");
        sub->add_option("--input", opt.input, "trajectory CSV instead of a named system");
    };

    auto* sim = app.add_subcommand("simulate", "integrate a system and write trajectory CSV");
    add_common(sim);
    sim->add_option("--out", opt.out, "output CSV path")->required();

    auto* fit = app.add_subcommand("fit", "fit one method and write model artifacts");
    add_common(fit);
    fit->add_option("--method", opt.method, "lasso | dual_lasso | stridge | adaptive");
    fit->add_option("--degree", opt.degree, "library max total degree");
    fit->add_option("--lambda", opt.lambda, "fixed penalty (0: method default)");
    fit->add_option("--lambda2", opt.lambda2, "refit ridge penalty (<0: 1e-6*T)");
    fit->add_option("--tau", opt.tau_final, "final scale threshold");
    fit->add_option("--out", opt.out, "output directory")->required();

    auto* cmp = app.add_subcommand("compare", "run all methods over p in {3,10}");
    add_common(cmp);
    cmp->add_option("--tau", opt.tau_final, "final scale threshold");
    cmp->add_flag("--include-p20", opt.include_p20, "also run the m=1771 library");
    cmp->add_option("--out", opt.out, "output directory")->required();

    auto* rep = app.add_subcommand("report", "render a saved model JSON");
    rep->add_option("--model", opt.input, "model.json path")->required();
    rep->add_option("--system", opt.system, "benchmark to score against (empty: skip)");
    rep->add_option("--tau", opt.tau_final, "final scale threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(opt);
        if (fit->parsed()) return cmd_fit(opt);
        if (cmp->parsed()) return cmd_compare(opt);
        if (rep->parsed()) return cmd_report(opt);
    } catch (const eqdisc::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const eqdisc::pipeline_error& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
