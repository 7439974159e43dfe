#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "tailcausal/io.hpp"
#include "tailcausal/metrics.hpp"
#include "tailcausal/pipeline.hpp"
#include "tailcausal/rng.hpp"
#include "tailcausal/simgen.hpp"

namespace tailcausal {

/// Full description of a Monte Carlo sweep: generator settings, pipeline
/// tunables, replicate count, and the proxy-input mode. When
/// no_proxy_ablation is set, a matched proxy-free pipeline runs on the
/// byte-identical panel of every replicate.
struct ExperimentConfig {
    std::string name = "experiment";
    SimConfig sim;
    double beta = 0.7;
    std::vector<double> beta_sweep;  // empty -> single beta
    ScreenConfig screen;
    SearchConfig search;
    int replicates = 50;
    ProxyMode proxy_mode = ProxyMode::observed;
    bool no_proxy_ablation = false;
    std::string output_dir = "out";
    int threads = 0;  // 0 -> hardware concurrency

    void validate() const {
        sim.validate();
        screen.validate();
        search.validate();
        if (replicates < 1) throw std::invalid_argument("ExperimentConfig: replicates < 1");
        if (!(beta > 0.0 && beta < 1.0))
            throw std::invalid_argument("ExperimentConfig: beta outside (0,1)");
        for (double b : beta_sweep)
            if (!(b > 0.0 && b < 1.0))
                throw std::invalid_argument("ExperimentConfig: sweep beta outside (0,1)");
    }

    std::vector<double> betas() const { return beta_sweep.empty() ? std::vector<double>{beta} : beta_sweep; }
};

struct ReplicateRecord {
    std::string config_name;
    std::uint64_t config_hash = 0;
    int replicate = 0;
    std::uint64_t seed = 0;
    double beta = 0.7;
    std::string arm;  // "proxy" or "no_proxy"
    bool ok = false;
    std::string error;
    int k = 0;
    int skeleton_edges = 0;
    int dag_edges = 0;
    double final_score = 0.0;
    StructureReport skeleton_report;
    StructureReport dag_report;
    double wall_seconds = 0.0;
};

struct AggregateRow {
    double beta = 0.7;
    std::string arm;
    std::string stage;  // "skeleton" or "dag"
    int n_ok = 0;
    double precision_mean = 0, precision_sd = 0;
    double recall_mean = 0, recall_sd = 0;
    double f1_mean = 0, f1_sd = 0;
    double shd_mean = 0, shd_sd = 0;
    double conf_fp_mean = 0, conf_fp_sd = 0;
    double conf_fp_frac_mean = 0;  // over replicates where defined
    int conf_fp_frac_defined = 0;
    double k_mean = 0;
};

struct ExperimentResult {
    std::vector<ReplicateRecord> records;
    std::vector<AggregateRow> aggregate;
    int failures = 0;
};

namespace detail {

struct MeanSd {
    double mean = 0.0, sd = 0.0;
};

inline MeanSd mean_sd(const std::vector<double>& xs) {
    MeanSd out;
    if (xs.empty()) return out;
    double total = 0.0;
    for (double x : xs) total += x;
    out.mean = total / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return out;
}

}  // namespace detail

/// One pipeline run against known truth; fills metric reports for both
/// stages, including confounding false positives.
inline ReplicateRecord run_replicate_arm(const RawPanel& panel, const SimTruth& truth,
                                         const DiscoverParams& params, const std::string& arm) {
    ReplicateRecord rec;
    rec.arm = arm;
    const auto t0 = std::chrono::steady_clock::now();
    DiscoverOutput out = discover(panel, params);
    rec.k = out.sample.k;
    rec.skeleton_edges = out.skeleton.edge_count();
    rec.dag_edges = out.search.dag.edge_count();
    rec.final_score = out.search.score;
    const Skeleton true_skel = skeleton_of(truth.dag);
    rec.skeleton_report = skeleton_metrics(out.skeleton, true_skel);
    rec.dag_report = dag_metrics(out.search.dag, truth.dag);
    if (!truth.conf_exposure.empty()) {
        attach_conf_fp(rec.skeleton_report, conf_fp(out.skeleton, truth));
        attach_conf_fp(rec.dag_report, conf_fp(out.search.dag, truth));
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rec.ok = true;
    return rec;
}

inline ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const std::vector<double> betas = config.betas();
    const bool main_has_proxy =
        config.proxy_mode != ProxyMode::none && config.sim.q_conf_count > 0;
    const bool run_ablation = config.no_proxy_ablation && main_has_proxy;

    struct Job {
        double beta;
        int replicate;
    };
    std::vector<Job> jobs;
    for (double b : betas)
        for (int r = 0; r < config.replicates; ++r) jobs.push_back({b, r});

    std::vector<std::vector<ReplicateRecord>> slots(jobs.size());
    std::atomic<size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const size_t idx = next.fetch_add(1);
            if (idx >= jobs.size()) return;
            const Job job = jobs[idx];
            const std::uint64_t seed = derive_seed(config.sim.seed, static_cast<std::uint64_t>(job.replicate));
            std::vector<ReplicateRecord>& out = slots[idx];

            auto push_failure = [&](const std::string& arm, const std::string& what) {
                ReplicateRecord rec;
                rec.arm = arm;
                rec.ok = false;
                rec.error = what;
                out.push_back(rec);
            };

            SimConfig sim = config.sim;
            sim.seed = seed;
            DiscoverParams params;
            params.beta = job.beta;
            params.screen = config.screen;
            params.search = config.search;

            std::optional<SimData> data;
            try {
                data = simulate(sim, config.proxy_mode);
            } catch (const std::exception& e) {
                push_failure(main_has_proxy ? "proxy" : "no_proxy", e.what());
                if (run_ablation) push_failure("no_proxy", e.what());
            }
            if (data) {
                const std::string main_arm = main_has_proxy ? "proxy" : "no_proxy";
                try {
                    out.push_back(run_replicate_arm(data->panel, data->truth, params, main_arm));
                } catch (const std::exception& e) {
                    push_failure(main_arm, e.what());
                }
                if (run_ablation) {
                    RawPanel stripped;
                    stripped.x = data->panel.x;  // identical panel, proxies withheld
                    try {
                        out.push_back(run_replicate_arm(stripped, data->truth, params, "no_proxy"));
                    } catch (const std::exception& e) {
                        push_failure("no_proxy", e.what());
                    }
                }
            }
            for (auto& rec : out) {
                rec.config_name = config.name;
                rec.replicate = job.replicate;
                rec.seed = seed;
                rec.beta = job.beta;
            }
        }
    };

    unsigned nthreads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                           : std::thread::hardware_concurrency();
    nthreads = std::max(1u, std::min<unsigned>(nthreads, static_cast<unsigned>(jobs.size())));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    ExperimentResult result;
    for (auto& slot : slots)
        for (auto& rec : slot) {
            if (!rec.ok) ++result.failures;
            result.records.push_back(std::move(rec));
        }

    // aggregate per (beta, arm, stage)
    std::vector<std::pair<double, std::string>> groups;
    for (const auto& rec : result.records) {
        const auto key = std::make_pair(rec.beta, rec.arm);
        if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
    }
    for (const auto& [beta, arm] : groups) {
        for (const std::string stage : {"skeleton", "dag"}) {
            AggregateRow row;
            row.beta = beta;
            row.arm = arm;
            row.stage = stage;
            std::vector<double> precision, recall, f1, shd, cfp, cff, ks;
            for (const auto& rec : result.records) {
                if (!rec.ok || rec.beta != beta || rec.arm != arm) continue;
                const StructureReport& r =
                    stage == "skeleton" ? rec.skeleton_report : rec.dag_report;
                precision.push_back(r.precision);
                recall.push_back(r.recall);
                f1.push_back(r.f1);
                shd.push_back(static_cast<double>(r.shd));
                if (r.conf_fp) cfp.push_back(static_cast<double>(*r.conf_fp));
                if (r.conf_fp_frac) cff.push_back(*r.conf_fp_frac);
                ks.push_back(static_cast<double>(rec.k));
            }
            row.n_ok = static_cast<int>(precision.size());
            const auto pm = detail::mean_sd(precision);
            row.precision_mean = pm.mean;
            row.precision_sd = pm.sd;
            const auto rm = detail::mean_sd(recall);
            row.recall_mean = rm.mean;
            row.recall_sd = rm.sd;
            const auto fm = detail::mean_sd(f1);
            row.f1_mean = fm.mean;
            row.f1_sd = fm.sd;
            const auto sm = detail::mean_sd(shd);
            row.shd_mean = sm.mean;
            row.shd_sd = sm.sd;
            const auto cm = detail::mean_sd(cfp);
            row.conf_fp_mean = cm.mean;
            row.conf_fp_sd = cm.sd;
            const auto ffm = detail::mean_sd(cff);
            row.conf_fp_frac_mean = ffm.mean;
            row.conf_fp_frac_defined = static_cast<int>(cff.size());
            row.k_mean = detail::mean_sd(ks).mean;
            result.aggregate.push_back(row);
        }
    }
    return result;
}

// --- CSV emitters ------------------------------------------------------------

inline std::string replicate_csv_header() {
    return "config,config_hash,replicate,seed,beta,arm,ok,error,k,skeleton_edges,dag_edges,"
           "final_score,skel_precision,skel_recall,skel_f1,skel_shd,skel_conf_fp,"
           "skel_conf_fp_frac,dag_precision,dag_recall,dag_f1,dag_shd,dag_conf_fp,"
           "dag_conf_fp_frac,wall_seconds";
}

inline std::string to_csv_row(const ReplicateRecord& rec) {
    std::ostringstream os;
    os << std::setprecision(12);
    auto opt_long = [](const std::optional<long>& v) {
        return v ? std::to_string(*v) : std::string();
    };
    auto opt_double = [](const std::optional<double>& v) {
        if (!v) return std::string();
        std::ostringstream o;
        o << std::setprecision(12) << *v;
        return o.str();
    };
    os << rec.config_name << "," << rec.config_hash << "," << rec.replicate << "," << rec.seed
       << "," << rec.beta << "," << rec.arm << "," << (rec.ok ? 1 : 0) << ","
       << (rec.error.empty() ? "" : "\"" + rec.error + "\"") << "," << rec.k << ","
       << rec.skeleton_edges << "," << rec.dag_edges << "," << rec.final_score << ","
       << rec.skeleton_report.precision << "," << rec.skeleton_report.recall << ","
       << rec.skeleton_report.f1 << "," << rec.skeleton_report.shd << ","
       << opt_long(rec.skeleton_report.conf_fp) << ","
       << opt_double(rec.skeleton_report.conf_fp_frac) << "," << rec.dag_report.precision << ","
       << rec.dag_report.recall << "," << rec.dag_report.f1 << "," << rec.dag_report.shd << ","
       << opt_long(rec.dag_report.conf_fp) << "," << opt_double(rec.dag_report.conf_fp_frac)
       << "," << rec.wall_seconds;
    return os.str();
}

inline std::string aggregate_csv_header() {
    return "beta,arm,stage,n_ok,precision_mean,precision_sd,recall_mean,recall_sd,f1_mean,f1_sd,"
           "shd_mean,shd_sd,conf_fp_mean,conf_fp_sd,conf_fp_frac_mean,conf_fp_frac_defined,k_mean";
}

inline std::string to_csv_row(const AggregateRow& row) {
    std::ostringstream os;
    os << std::setprecision(12);
    os << row.beta << "," << row.arm << "," << row.stage << "," << row.n_ok << ","
       << row.precision_mean << "," << row.precision_sd << "," << row.recall_mean << ","
       << row.recall_sd << "," << row.f1_mean << "," << row.f1_sd << "," << row.shd_mean << ","
       << row.shd_sd << "," << row.conf_fp_mean << "," << row.conf_fp_sd << ","
       << row.conf_fp_frac_mean << "," << row.conf_fp_frac_defined << "," << row.k_mean;
    return os.str();
}

inline void write_experiment_outputs(const ExperimentResult& result, const std::string& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir + "/replicates.csv");
        if (!out) throw std::runtime_error("write_experiment_outputs: cannot open replicates.csv");
        out << replicate_csv_header() << "\n";
        for (const auto& rec : result.records) out << to_csv_row(rec) << "\n";
    }
    {
        std::ofstream out(dir + "/aggregate.csv");
        if (!out) throw std::runtime_error("write_experiment_outputs: cannot open aggregate.csv");
        out << aggregate_csv_header() << "\n";
        for (const auto& row : result.aggregate) out << to_csv_row(row) << "\n";
    }
}

}  // namespace tailcausal
