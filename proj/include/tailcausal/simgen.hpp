#pragma once

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tailcausal/graph.hpp"
#include "tailcausal/rng.hpp"
#include "tailcausal/tail_transform.hpp"

namespace tailcausal {

enum class GraphKind { barabasi_albert, erdos_renyi };

/// Which matrix is handed to the pipeline as the proxy input:
/// the observed noisy proxies P, the latent drivers U themselves
/// (oracle-style stress test), or nothing.
enum class ProxyMode { observed, latent_oracle, none };

struct SimConfig {
    int n = 1000;
    int p = 20;
    GraphKind graph_kind = GraphKind::barabasi_albert;
    int m = 1;                 // BA attachment count; ER edge prob is 2m/(p-1)
    int q_conf_count = 0;      // number of latent confounders
    int conf_s = 0;            // exposure width per confounder
    std::array<double, 2> coef_edge_range{0.6, 0.9};
    std::array<double, 2> coef_conf_range{0.5, 0.8};
    std::array<double, 2> proxy_coef_range{0.6, 0.9};
    std::uint64_t seed = 1;

    void validate() const {
        if (p < 2) throw std::invalid_argument("SimConfig: p < 2");
        if (n < 2) throw std::invalid_argument("SimConfig: n < 2");
        if (m < 1 || m >= p) throw std::invalid_argument("SimConfig: need 1 <= m < p");
        if (q_conf_count < 0) throw std::invalid_argument("SimConfig: negative confounder count");
        if (conf_s < 0 || conf_s > p) throw std::invalid_argument("SimConfig: conf_s outside [0,p]");
        for (const auto& r : {coef_edge_range, coef_conf_range, proxy_coef_range})
            if (!(r[0] > 0.0) || r[1] < r[0])
                throw std::invalid_argument("SimConfig: bad coefficient range");
    }
};

/// Ground truth accompanying a simulated panel.
struct SimTruth {
    Dag dag;
    std::map<std::pair<int, int>, double> edge_coefs;   // (i,j) -> c_ij for edge i->j
    std::vector<std::vector<int>> conf_exposure;        // per confounder, sorted node ids
    std::vector<std::vector<double>> conf_coefs;        // b_lj aligned with conf_exposure
    std::vector<double> proxy_coefs;                    // a_l

    SimTruth() : dag(2) {}
    explicit SimTruth(Dag d) : dag(std::move(d)) {}
};

/// Frechet(1) quantile function: F(x) = exp(-1/x) on x > 0.
inline double frechet_quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("frechet_quantile: u outside (0,1)");
    return -1.0 / std::log(u);
}

inline double sample_frechet(Rng& rng) { return frechet_quantile(rng.uniform_open()); }

inline Eigen::VectorXd sample_frechet(int count, Rng& rng) {
    if (count < 0) throw std::invalid_argument("sample_frechet: negative count");
    Eigen::VectorXd out(count);
    for (int i = 0; i < count; ++i) out[i] = sample_frechet(rng);
    return out;
}

/// Random DAG. Barabasi-Albert: sequential preferential attachment (degree+1
/// weighting) starting from a single node; node t attaches min(m, t) edges
/// to distinct earlier nodes. Erdos-Renyi: each pair {i,j} kept with
/// probability 2m/(p-1). Either way edges are oriented earlier -> later, so
/// the result is acyclic by construction.
inline Dag gen_dag(const SimConfig& config, Rng& rng) {
    config.validate();
    Dag dag(config.p);
    if (config.graph_kind == GraphKind::barabasi_albert) {
        std::vector<double> degree(static_cast<size_t>(config.p), 0.0);
        for (int t = 1; t < config.p; ++t) {
            const int mm = std::min(config.m, t);
            std::vector<int> chosen;
            std::vector<char> taken(static_cast<size_t>(t), 0);
            for (int e = 0; e < mm; ++e) {
                double total = 0.0;
                for (int i = 0; i < t; ++i)
                    if (!taken[static_cast<size_t>(i)]) total += degree[static_cast<size_t>(i)] + 1.0;
                double x = rng.uniform() * total;
                int pick = -1;
                for (int i = 0; i < t; ++i) {
                    if (taken[static_cast<size_t>(i)]) continue;
                    x -= degree[static_cast<size_t>(i)] + 1.0;
                    if (x < 0.0) { pick = i; break; }
                }
                if (pick < 0) { // fp edge of the cumulative sum
                    for (int i = t - 1; i >= 0; --i)
                        if (!taken[static_cast<size_t>(i)]) { pick = i; break; }
                }
                taken[static_cast<size_t>(pick)] = 1;
                chosen.push_back(pick);
            }
            for (int i : chosen) {
                dag.add_edge(i, t);
                degree[static_cast<size_t>(i)] += 1.0;
                degree[static_cast<size_t>(t)] += 1.0;
            }
        }
    } else {
        const double p_edge =
            std::min(1.0, 2.0 * static_cast<double>(config.m) / static_cast<double>(config.p - 1));
        for (int i = 0; i < config.p; ++i)
            for (int j = i + 1; j < config.p; ++j)
                if (rng.uniform() < p_edge) dag.add_edge(i, j);
    }
    return dag;
}

struct SimData {
    RawPanel panel;           // x always; proxy_raw per requested mode
    SimTruth truth;
    Eigen::MatrixXd proxies;  // observed P, n x q (empty when q = 0)
    Eigen::MatrixXd latents;  // latent drivers U, n x q
};

/// Recursive max-linear structural equations with Frechet(1) innovations:
///   X_j = max( max_{i in pa(j)} c_ij X_i, max_{l: j exposed} b_lj U_l, eps_j )
/// plus noisy proxies P_l = max(a_l U_l, eta_l). The draw sequence is fixed
/// (per row: U block, eta block, eps block), so panels are bit-identical
/// across proxy modes and runs with the same config.
inline SimData simulate(const SimConfig& config, ProxyMode mode = ProxyMode::observed) {
    config.validate();
    Rng rng(config.seed);
    Dag dag = gen_dag(config, rng);
    SimTruth truth(dag);

    for (const auto& [i, j] : dag.edges())
        truth.edge_coefs[{i, j}] =
            rng.uniform(config.coef_edge_range[0], config.coef_edge_range[1]);

    const int q = config.q_conf_count;
    truth.conf_exposure.resize(static_cast<size_t>(q));
    truth.conf_coefs.resize(static_cast<size_t>(q));
    for (int l = 0; l < q; ++l) {
        // conf_s distinct nodes, uniform without replacement
        std::vector<int> pool(static_cast<size_t>(config.p));
        for (int i = 0; i < config.p; ++i) pool[static_cast<size_t>(i)] = i;
        std::vector<int> exposed;
        for (int e = 0; e < config.conf_s; ++e) {
            const auto pick = rng.uniform_index(pool.size());
            exposed.push_back(pool[pick]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        std::sort(exposed.begin(), exposed.end());
        auto& coefs = truth.conf_coefs[static_cast<size_t>(l)];
        for (size_t e = 0; e < exposed.size(); ++e)
            coefs.push_back(rng.uniform(config.coef_conf_range[0], config.coef_conf_range[1]));
        truth.conf_exposure[static_cast<size_t>(l)] = std::move(exposed);
    }
    for (int l = 0; l < q; ++l)
        truth.proxy_coefs.push_back(
            rng.uniform(config.proxy_coef_range[0], config.proxy_coef_range[1]));

    // per-node confounder incidence
    std::vector<std::vector<std::pair<int, double>>> node_conf(static_cast<size_t>(config.p));
    for (int l = 0; l < q; ++l) {
        const auto& exp_l = truth.conf_exposure[static_cast<size_t>(l)];
        for (size_t e = 0; e < exp_l.size(); ++e)
            node_conf[static_cast<size_t>(exp_l[e])].push_back(
                {l, truth.conf_coefs[static_cast<size_t>(l)][e]});
    }

    const std::vector<int> order = topological_order(dag);

    SimData out;
    out.truth = std::move(truth);
    out.panel.x.resize(config.n, config.p);
    out.proxies.resize(config.n, q);
    out.latents.resize(config.n, q);

    std::vector<double> u_row(static_cast<size_t>(q));
    for (int t = 0; t < config.n; ++t) {
        for (int l = 0; l < q; ++l) u_row[static_cast<size_t>(l)] = sample_frechet(rng);
        for (int l = 0; l < q; ++l) {
            const double eta = sample_frechet(rng);
            out.latents(t, l) = u_row[static_cast<size_t>(l)];
            out.proxies(t, l) =
                std::max(out.truth.proxy_coefs[static_cast<size_t>(l)] * u_row[static_cast<size_t>(l)], eta);
        }
        for (int j : order) {
            double v = sample_frechet(rng); // eps_j drawn here, in topological order
            for (int i : dag.parents(j))
                v = std::max(v, out.truth.edge_coefs.at({i, j}) * out.panel.x(t, i));
            for (const auto& [l, b] : node_conf[static_cast<size_t>(j)])
                v = std::max(v, b * u_row[static_cast<size_t>(l)]);
            out.panel.x(t, j) = v;
        }
    }

    if (q > 0 && mode == ProxyMode::observed) out.panel.proxy_raw = out.proxies;
    else if (q > 0 && mode == ProxyMode::latent_oracle) out.panel.proxy_raw = out.latents;
    return out;
}

}  // namespace tailcausal
