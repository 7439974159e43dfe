#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tailcausal/config.hpp"
#include "tailcausal/io.hpp"
#include "tailcausal/pipeline.hpp"
#include "tailcausal/tail_risk.hpp"

namespace tailcausal {

// Command implementations shared by the CLI front end and the test suites.
// Exit codes: 0 success, 2 config error, 3 data error, 4 partial failure.

struct SimulateOptions {
    std::string config;  // preset name or JSON path
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out/sim";
};

inline int cmd_simulate(const SimulateOptions& opt, std::ostream& log = std::cout) {
    ExperimentConfig cfg = experiment_config_from_json(load_config_json(opt.config));
    if (opt.seed) cfg.sim.seed = *opt.seed;
    const SimData data = simulate(cfg.sim, ProxyMode::observed);

    std::filesystem::create_directories(opt.out_dir);
    std::vector<std::string> headers;
    for (int j = 0; j < cfg.sim.p; ++j) headers.push_back("X" + std::to_string(j + 1));
    Eigen::MatrixXd values = data.panel.x;
    if (data.panel.proxy_raw) {
        const auto& pr = *data.panel.proxy_raw;
        for (Eigen::Index r = 0; r < pr.cols(); ++r)
            headers.push_back("P" + std::to_string(r + 1));
        Eigen::MatrixXd joined(values.rows(), values.cols() + pr.cols());
        joined << values, pr;
        values = joined;
    }
    write_csv(opt.out_dir + "/panel.csv", headers, values);
    write_text(opt.out_dir + "/truth.json", to_json(data.truth).dump(2) + "\n");
    log << "wrote " << opt.out_dir << "/panel.csv (" << values.rows() << " rows, "
        << values.cols() << " cols) and truth.json\n";
    return 0;
}

struct DiscoverOptions {
    std::string csv_path;
    std::vector<std::string> proxy_cols;
    bool no_proxy = false;       // drop designated proxies from the pipeline
    bool raw_proxy = false;      // skip the rank transform for proxy columns
    double beta = 0.7;
    std::optional<double> q_conf;
    double lambda_c = 1.0;
    double tau_ratio = 0.5;
    double offset_q = 0.05;
    double gamma_ebic = 10.0;
    int d_max = 10;
    std::string init = "empty";
    std::string out_dir = "out/discover";
};

inline int cmd_discover(const DiscoverOptions& opt, std::ostream& log = std::cout) {
    const CsvTable table = read_csv(opt.csv_path);
    RawPanel panel = panel_from_csv(table, opt.proxy_cols);
    if (opt.no_proxy) panel.proxy_raw.reset();

    std::vector<std::string> labels;
    for (const auto& h : table.headers)
        if (std::find(opt.proxy_cols.begin(), opt.proxy_cols.end(), h) == opt.proxy_cols.end())
            labels.push_back(h);

    DiscoverParams params;
    params.beta = opt.beta;
    params.q_conf = opt.q_conf;
    params.transform_proxy = !opt.raw_proxy;
    params.screen.lambda_multiplier = opt.lambda_c;
    params.screen.tau_ratio = opt.tau_ratio;
    params.search.q = opt.offset_q;
    params.search.gamma_ebic = opt.gamma_ebic;
    params.search.d_max = opt.d_max;
    params.search.init_mode = init_mode_from_string(opt.init);

    const DiscoverOutput out = discover(panel, params);
    if (out.sample.underdetermined)
        log << "warning: tail sample has k = " << out.sample.k
            << " < p = " << out.sample.p() << "; nodewise regressions are under-determined\n";

    std::filesystem::create_directories(opt.out_dir);
    write_text(opt.out_dir + "/dag.json", to_json(out.search.dag).dump(2) + "\n");
    write_text(opt.out_dir + "/dag.dot", to_dot(out.search.dag, labels));
    write_text(opt.out_dir + "/skeleton.json", to_json(out.skeleton).dump(2) + "\n");
    write_text(opt.out_dir + "/move_log.json", move_log_to_json(out.search.move_log).dump(2) + "\n");
    {
        std::ostringstream os;
        os << std::setprecision(12) << "target,predictor,beta\n";
        for (int j = 0; j < out.sample.p(); ++j)
            for (int l = 0; l < out.sample.p(); ++l)
                if (l != j && out.nodewise.beta(j, l) != 0.0)
                    os << j << "," << l << "," << out.nodewise.beta(j, l) << "\n";
        write_text(opt.out_dir + "/coefficients.csv", os.str());
    }
    nlohmann::json summary = {
        {"k", out.sample.k},
        {"u", out.sample.u},
        {"lambda", out.lambda},
        {"tau", out.tau},
        {"skeleton_edges", out.skeleton.edge_count()},
        {"dag_edges", out.search.dag.edge_count()},
        {"final_score", out.search.score},
        {"search_iterations", out.search.iterations},
        {"truncated", out.search.truncated},
        {"screen_converged", out.nodewise.all_converged()},
    };
    write_text(opt.out_dir + "/run.json", summary.dump(2) + "\n");
    log << "k=" << out.sample.k << " |skeleton|=" << out.skeleton.edge_count()
        << " |dag|=" << out.search.dag.edge_count() << " score=" << out.search.score << "\n";
    return 0;
}

struct EvaluateOptions {
    std::string estimate_path;  // DAG JSON
    std::string truth_path;     // truth JSON (with or without confounders) or DAG JSON
    std::string out_path;       // empty -> stdout only
};

inline int cmd_evaluate(const EvaluateOptions& opt, std::ostream& log = std::cout) {
    const nlohmann::json est_j = nlohmann::json::parse(read_text(opt.estimate_path));
    const nlohmann::json tru_j = nlohmann::json::parse(read_text(opt.truth_path));
    const Dag estimate = dag_from_json(est_j);
    const SimTruth truth =
        tru_j.contains("dag") ? truth_from_json(tru_j) : SimTruth(dag_from_json(tru_j));

    StructureReport skel = skeleton_metrics(skeleton_of(estimate), skeleton_of(truth.dag));
    StructureReport dag = dag_metrics(estimate, truth.dag);
    if (!truth.conf_exposure.empty()) {
        attach_conf_fp(skel, conf_fp(skeleton_of(estimate), truth));
        attach_conf_fp(dag, conf_fp(estimate, truth));
    }

    auto report_json = [](const StructureReport& r) {
        nlohmann::json j = {{"precision", r.precision},
                            {"recall", r.recall},
                            {"f1", r.f1},
                            {"shd", r.shd}};
        if (r.conf_fp) j["conf_fp"] = *r.conf_fp;
        if (r.conf_fp_frac) j["conf_fp_frac"] = *r.conf_fp_frac;
        return j;
    };
    nlohmann::json out = {{"skeleton", report_json(skel)}, {"dag", report_json(dag)}};
    const std::string text = out.dump(2) + "\n";
    if (!opt.out_path.empty()) write_text(opt.out_path, text);
    log << text;
    return 0;
}

struct ExperimentOptions {
    std::string config;  // preset name or JSON path
    std::optional<std::uint64_t> seed;
    std::optional<double> beta;
    std::optional<double> lambda_c;
    std::optional<double> tau_ratio;
    std::optional<double> offset_q;
    std::optional<double> gamma_ebic;
    std::optional<int> d_max;
    std::optional<int> replicates;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
};

inline ExperimentConfig resolve_experiment_config(const ExperimentOptions& opt) {
    ExperimentConfig cfg = experiment_config_from_json(load_config_json(opt.config));
    if (opt.seed) cfg.sim.seed = *opt.seed;
    if (opt.beta) {
        cfg.beta = *opt.beta;
        cfg.beta_sweep.clear();
    }
    if (opt.lambda_c) cfg.screen.lambda_multiplier = *opt.lambda_c;
    if (opt.tau_ratio) cfg.screen.tau_ratio = *opt.tau_ratio;
    if (opt.offset_q) cfg.search.q = *opt.offset_q;
    if (opt.gamma_ebic) cfg.search.gamma_ebic = *opt.gamma_ebic;
    if (opt.d_max) cfg.search.d_max = *opt.d_max;
    if (opt.replicates) cfg.replicates = *opt.replicates;
    if (opt.out_dir) cfg.output_dir = *opt.out_dir;
    if (opt.threads) cfg.threads = *opt.threads;
    cfg.validate();
    return cfg;
}

inline int cmd_experiment(const ExperimentOptions& opt, std::ostream& log = std::cout) {
    const ExperimentConfig cfg = resolve_experiment_config(opt);
    const std::uint64_t hash = config_hash(cfg);
    ExperimentResult result = run_experiment(cfg);
    for (auto& rec : result.records) rec.config_hash = hash;

    std::filesystem::create_directories(cfg.output_dir);
    write_text(cfg.output_dir + "/config.json", to_json(cfg).dump(2) + "\n");
    write_experiment_outputs(result, cfg.output_dir);

    log << aggregate_csv_header() << "\n";
    for (const auto& row : result.aggregate) log << to_csv_row(row) << "\n";
    if (result.failures > 0) {
        log << result.failures << " replicate run(s) failed; see replicates.csv\n";
        return 4;
    }
    return 0;
}

struct AsymmetryOptions {
    std::vector<double> c_values{1.0};
    std::vector<double> betas{0.7};
    int seeds = 20;
    long n = 200000;
    std::uint64_t master_seed = 1;
    std::string out_path;  // empty -> stdout summary only
};

inline int cmd_asymmetry(const AsymmetryOptions& opt, std::ostream& log = std::cout) {
    if (opt.seeds < 1) throw std::invalid_argument("asymmetry: seeds < 1");
    std::ostringstream csv;
    csv << std::setprecision(12) << "c,beta,seed,forward_risk,backward_risk\n";
    log << "c,beta,mean_forward,mean_backward,frac_forward_smaller\n";
    for (double c : opt.c_values) {
        for (double beta : opt.betas) {
            double fsum = 0.0, bsum = 0.0;
            int forward_smaller = 0;
            for (int s = 0; s < opt.seeds; ++s) {
                const std::uint64_t seed = derive_seed(opt.master_seed, static_cast<std::uint64_t>(s));
                const DirectionRisks r = forward_backward_risk(c, opt.n, beta, seed);
                csv << c << "," << beta << "," << s << "," << r.forward << "," << r.backward
                    << "\n";
                fsum += r.forward;
                bsum += r.backward;
                if (r.forward < r.backward) ++forward_smaller;
            }
            log << c << "," << beta << "," << fsum / opt.seeds << "," << bsum / opt.seeds << ","
                << static_cast<double>(forward_smaller) / opt.seeds << "\n";
        }
    }
    if (!opt.out_path.empty()) {
        std::filesystem::create_directories(
            std::filesystem::path(opt.out_path).parent_path().empty()
                ? "."
                : std::filesystem::path(opt.out_path).parent_path().string());
        write_text(opt.out_path, csv.str());
    }
    return 0;
}

}  // namespace tailcausal
