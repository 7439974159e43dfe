// Command-line front end: simulate, discover, evaluate, experiment, asymmetry.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tailcausal/commands.hpp"

namespace {

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(s);
    while (std::getline(is, field, ',')) {
        if (!field.empty()) out.push_back(field);
    }
    return out;
}

std::vector<double> split_double_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& f : split_csv_list(s)) out.push_back(std::stod(f));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-stage causal structure discovery for heavy-tailed multivariate data"};
    app.require_subcommand(1);

    // simulate
    tailcausal::SimulateOptions sim_opt;
    std::uint64_t sim_seed = 0;
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic panel and its ground truth");
    sim->add_option("--config", sim_opt.config, "Preset name or config JSON path")->required();
    auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "Override the generator seed");
    sim->add_option("--out", sim_opt.out_dir, "Output directory");

    // discover
    tailcausal::DiscoverOptions disc_opt;
    std::string proxy_cols_arg;
    double q_conf_arg = 0.0;
    auto* disc = app.add_subcommand("discover", "Run the two-stage discovery pipeline on a CSV");
    disc->add_option("csv", disc_opt.csv_path, "Input CSV with a header row")->required();
    disc->add_option("--proxy-cols", proxy_cols_arg, "Comma-separated proxy column names");
    disc->add_flag("--no-proxy", disc_opt.no_proxy, "Drop designated proxy columns");
    disc->add_flag("--raw-proxy", disc_opt.raw_proxy,
                   "Pass proxy columns through without the rank transform");
    disc->add_option("--beta", disc_opt.beta, "Threshold exponent (default 0.7)");
    auto* qconf = disc->add_option("--q-conf", q_conf_arg, "Direct quantile level override");
    disc->add_option("--lambda-c", disc_opt.lambda_c, "Penalty multiplier C");
    disc->add_option("--tau-ratio", disc_opt.tau_ratio, "Coefficient threshold ratio");
    disc->add_option("--offset-q", disc_opt.offset_q, "Envelope offset quantile");
    disc->add_option("--gamma-ebic", disc_opt.gamma_ebic, "EBIC gamma");
    disc->add_option("--dmax", disc_opt.d_max, "Maximum in-degree");
    disc->add_option("--init", disc_opt.init, "Search init: empty | ordered");
    disc->add_option("--out", disc_opt.out_dir, "Output directory");

    // evaluate
    tailcausal::EvaluateOptions eval_opt;
    auto* eval = app.add_subcommand("evaluate", "Compare an estimated DAG against ground truth");
    eval->add_option("estimate", eval_opt.estimate_path, "Estimated DAG JSON")->required();
    eval->add_option("truth", eval_opt.truth_path, "Truth JSON (DAG or full truth)")->required();
    eval->add_option("--out", eval_opt.out_path, "Write the report JSON here");

    // experiment
    tailcausal::ExperimentOptions exp_opt;
    std::uint64_t exp_seed = 0;
    double exp_beta = 0, exp_lambda = 0, exp_tau = 0, exp_q = 0, exp_gamma = 0;
    int exp_dmax = 0, exp_threads = 0;
    std::string exp_out;
    auto* exp = app.add_subcommand("experiment", "Run a replicated simulation study");
    exp->add_option("--config", exp_opt.config, "Preset name or config JSON path")->required();
    auto* o_seed = exp->add_option("--seed", exp_seed, "Master seed override");
    auto* o_beta = exp->add_option("--beta", exp_beta, "Single-beta override");
    auto* o_lc = exp->add_option("--lambda-c", exp_lambda, "Penalty multiplier override");
    auto* o_tr = exp->add_option("--tau-ratio", exp_tau, "Threshold ratio override");
    auto* o_oq = exp->add_option("--offset-q", exp_q, "Offset quantile override");
    auto* o_ge = exp->add_option("--gamma-ebic", exp_gamma, "EBIC gamma override");
    auto* o_dm = exp->add_option("--dmax", exp_dmax, "Max in-degree override");
    int exp_reps = 0;
    auto* o_reps = exp->add_option("--replicates", exp_reps, "Replicate count override");
    auto* o_out = exp->add_option("--out", exp_out, "Output directory override");
    auto* o_thr = exp->add_option("--threads", exp_threads, "Worker thread count");

    // asymmetry
    tailcausal::AsymmetryOptions asym_opt;
    std::string c_list = "1.0", beta_list = "0.7";
    auto* asym = app.add_subcommand("asymmetry",
                                    "Forward/backward tail risk on bivariate max-linear data");
    asym->add_option("--c", c_list, "Comma-separated transmission coefficients");
    asym->add_option("--beta", beta_list, "Comma-separated threshold exponents");
    asym->add_option("--seeds", asym_opt.seeds, "Replicates per setting");
    asym->add_option("--n", asym_opt.n, "Sample size per replicate");
    asym->add_option("--seed", asym_opt.master_seed, "Master seed");
    asym->add_option("--out", asym_opt.out_path, "Per-replicate CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            if (!sim_seed_opt->empty()) sim_opt.seed = sim_seed;
            return tailcausal::cmd_simulate(sim_opt);
        }
        if (disc->parsed()) {
            disc_opt.proxy_cols = split_csv_list(proxy_cols_arg);
            if (!qconf->empty()) disc_opt.q_conf = q_conf_arg;
            return tailcausal::cmd_discover(disc_opt);
        }
        if (eval->parsed()) return tailcausal::cmd_evaluate(eval_opt);
        if (exp->parsed()) {
            if (!o_seed->empty()) exp_opt.seed = exp_seed;
            if (!o_beta->empty()) exp_opt.beta = exp_beta;
            if (!o_lc->empty()) exp_opt.lambda_c = exp_lambda;
            if (!o_tr->empty()) exp_opt.tau_ratio = exp_tau;
            if (!o_oq->empty()) exp_opt.offset_q = exp_q;
            if (!o_ge->empty()) exp_opt.gamma_ebic = exp_gamma;
            if (!o_dm->empty()) exp_opt.d_max = exp_dmax;
            if (!o_reps->empty()) exp_opt.replicates = exp_reps;
            if (!o_out->empty()) exp_opt.out_dir = exp_out;
            if (!o_thr->empty()) exp_opt.threads = exp_threads;
            return tailcausal::cmd_experiment(exp_opt);
        }
        if (asym->parsed()) {
            asym_opt.c_values = split_double_list(c_list);
            asym_opt.betas = split_double_list(beta_list);
            return tailcausal::cmd_asymmetry(asym_opt);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
