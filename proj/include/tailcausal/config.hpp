#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "tailcausal/experiment.hpp"

namespace tailcausal {

namespace detail {

/// Node-count values may be given as plain integers or as fractions of p
/// ("0.2p", "p"). conf_s rounds to nearest; confounder counts floor.
inline int resolve_node_count(const nlohmann::json& v, int p, bool floor_it,
                              const std::string& what) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_number_float()) {
        const double x = v.get<double>();
        return floor_it ? static_cast<int>(std::floor(x)) : static_cast<int>(std::lround(x));
    }
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' '; }), s.end());
        if (s.empty() || s.back() != 'p')
            throw std::invalid_argument("config: cannot parse " + what + " value '" + s + "'");
        const std::string frac = s.substr(0, s.size() - 1);
        double x = 1.0;
        if (!frac.empty()) {
            size_t used = 0;
            x = std::stod(frac, &used);
            if (used != frac.size())
                throw std::invalid_argument("config: cannot parse " + what + " value '" + s + "'");
        }
        const double scaled = x * static_cast<double>(p);
        return floor_it ? static_cast<int>(std::floor(scaled))
                        : static_cast<int>(std::lround(scaled));
    }
    throw std::invalid_argument("config: bad type for " + what);
}

}  // namespace detail

inline GraphKind graph_kind_from_string(const std::string& s) {
    if (s == "ba" || s == "barabasi-albert") return GraphKind::barabasi_albert;
    if (s == "er" || s == "erdos-renyi") return GraphKind::erdos_renyi;
    throw std::invalid_argument("config: unknown graph kind '" + s + "'");
}

inline ProxyMode proxy_mode_from_string(const std::string& s) {
    if (s == "observed" || s == "observed_proxy") return ProxyMode::observed;
    if (s == "latent_oracle") return ProxyMode::latent_oracle;
    if (s == "none") return ProxyMode::none;
    throw std::invalid_argument("config: unknown proxy mode '" + s + "'");
}

inline SearchConfig::Init init_mode_from_string(const std::string& s) {
    if (s == "empty") return SearchConfig::Init::empty;
    if (s == "ordered" || s == "ordered-orientation") return SearchConfig::Init::ordered_orientation;
    throw std::invalid_argument("config: unknown init mode '" + s + "'");
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.name = j.value("name", cfg.name);
    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        cfg.sim.n = s.value("n", cfg.sim.n);
        cfg.sim.p = s.value("p", cfg.sim.p);
        if (s.contains("graph")) cfg.sim.graph_kind = graph_kind_from_string(s.at("graph"));
        cfg.sim.m = s.value("m", cfg.sim.m);
        if (s.contains("q_conf_count"))
            cfg.sim.q_conf_count =
                detail::resolve_node_count(s.at("q_conf_count"), cfg.sim.p, true, "q_conf_count");
        if (s.contains("conf_s"))
            cfg.sim.conf_s = detail::resolve_node_count(s.at("conf_s"), cfg.sim.p, false, "conf_s");
        if (s.contains("coef_edge")) {
            cfg.sim.coef_edge_range[0] = s.at("coef_edge").at(0).get<double>();
            cfg.sim.coef_edge_range[1] = s.at("coef_edge").at(1).get<double>();
        }
        if (s.contains("coef_conf")) {
            cfg.sim.coef_conf_range[0] = s.at("coef_conf").at(0).get<double>();
            cfg.sim.coef_conf_range[1] = s.at("coef_conf").at(1).get<double>();
        }
        if (s.contains("coef_proxy")) {
            cfg.sim.proxy_coef_range[0] = s.at("coef_proxy").at(0).get<double>();
            cfg.sim.proxy_coef_range[1] = s.at("coef_proxy").at(1).get<double>();
        }
        cfg.sim.seed = s.value("seed", cfg.sim.seed);
    }
    cfg.beta = j.value("beta", cfg.beta);
    if (j.contains("beta_sweep")) cfg.beta_sweep = j.at("beta_sweep").get<std::vector<double>>();
    if (j.contains("screen")) {
        const auto& s = j.at("screen");
        cfg.screen.lambda_multiplier = s.value("lambda_c", cfg.screen.lambda_multiplier);
        cfg.screen.tau_ratio = s.value("tau_ratio", cfg.screen.tau_ratio);
        if (s.contains("per_node_lambda"))
            cfg.screen.per_node_lambda = s.at("per_node_lambda").get<std::vector<double>>();
        cfg.screen.tolerance = s.value("tolerance", cfg.screen.tolerance);
        cfg.screen.max_sweeps = s.value("max_sweeps", cfg.screen.max_sweeps);
    }
    if (j.contains("search")) {
        const auto& s = j.at("search");
        cfg.search.gamma_ebic = s.value("gamma_ebic", cfg.search.gamma_ebic);
        cfg.search.d_max = s.value("d_max", cfg.search.d_max);
        cfg.search.q = s.value("offset_q", cfg.search.q);
        if (s.contains("init")) cfg.search.init_mode = init_mode_from_string(s.at("init"));
        cfg.search.max_iterations = s.value("max_iterations", cfg.search.max_iterations);
    }
    cfg.replicates = j.value("replicates", cfg.replicates);
    if (j.contains("proxy_mode")) cfg.proxy_mode = proxy_mode_from_string(j.at("proxy_mode"));
    cfg.no_proxy_ablation = j.value("no_proxy_ablation", cfg.no_proxy_ablation);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.validate();
    return cfg;
}

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["name"] = cfg.name;
    j["sim"] = {
        {"n", cfg.sim.n},
        {"p", cfg.sim.p},
        {"graph", cfg.sim.graph_kind == GraphKind::barabasi_albert ? "ba" : "er"},
        {"m", cfg.sim.m},
        {"q_conf_count", cfg.sim.q_conf_count},
        {"conf_s", cfg.sim.conf_s},
        {"coef_edge", {cfg.sim.coef_edge_range[0], cfg.sim.coef_edge_range[1]}},
        {"coef_conf", {cfg.sim.coef_conf_range[0], cfg.sim.coef_conf_range[1]}},
        {"coef_proxy", {cfg.sim.proxy_coef_range[0], cfg.sim.proxy_coef_range[1]}},
        {"seed", cfg.sim.seed},
    };
    j["beta"] = cfg.beta;
    if (!cfg.beta_sweep.empty()) j["beta_sweep"] = cfg.beta_sweep;
    j["screen"] = {{"lambda_c", cfg.screen.lambda_multiplier},
                   {"tau_ratio", cfg.screen.tau_ratio},
                   {"tolerance", cfg.screen.tolerance},
                   {"max_sweeps", cfg.screen.max_sweeps}};
    if (!cfg.screen.per_node_lambda.empty())
        j["screen"]["per_node_lambda"] = cfg.screen.per_node_lambda;
    j["search"] = {{"gamma_ebic", cfg.search.gamma_ebic},
                   {"d_max", cfg.search.d_max},
                   {"offset_q", cfg.search.q},
                   {"init", cfg.search.init_mode == SearchConfig::Init::empty ? "empty" : "ordered"},
                   {"max_iterations", cfg.search.max_iterations}};
    j["replicates"] = cfg.replicates;
    j["proxy_mode"] = cfg.proxy_mode == ProxyMode::observed       ? "observed"
                      : cfg.proxy_mode == ProxyMode::latent_oracle ? "latent_oracle"
                                                                   : "none";
    j["no_proxy_ablation"] = cfg.no_proxy_ablation;
    j["output_dir"] = cfg.output_dir;
    j["threads"] = cfg.threads;
    return j;
}

inline std::uint64_t config_hash(const ExperimentConfig& cfg) {
    return fnv1a(to_json(cfg).dump());
}

/// Named presets with the simulation-study defaults baked in. The scaling
/// presets follow the per-dimension lambda multipliers (0.5, 1.0, 1.5, 2.0)
/// and EBIC gammas (10, 10, 10, 20); the confounding-sweep presets use one
/// latent driver with oracle proxy input and a matched no-proxy ablation.
inline const std::map<std::string, std::string>& preset_configs() {
    static const std::map<std::string, std::string> presets = {
        {"exp1-p20", R"({
  "name": "exp1-p20",
  "sim": {"n": 1000, "p": 20, "graph": "ba", "m": 1, "q_conf_count": "0.1p", "conf_s": "0.2p", "seed": 1},
  "beta": 0.7,
  "screen": {"lambda_c": 0.5, "tau_ratio": 0.5},
  "search": {"gamma_ebic": 10, "d_max": 10, "offset_q": 0.05},
  "replicates": 50,
  "proxy_mode": "observed",
  "output_dir": "out/exp1-p20"
})"},
        {"exp1-p50", R"({
  "name": "exp1-p50",
  "sim": {"n": 1000, "p": 50, "graph": "ba", "m": 1, "q_conf_count": "0.1p", "conf_s": "0.2p", "seed": 1},
  "beta": 0.7,
  "screen": {"lambda_c": 1.0, "tau_ratio": 0.5},
  "search": {"gamma_ebic": 10, "d_max": 10, "offset_q": 0.05},
  "replicates": 50,
  "proxy_mode": "observed",
  "output_dir": "out/exp1-p50"
})"},
        {"exp1-p100", R"({
  "name": "exp1-p100",
  "sim": {"n": 1000, "p": 100, "graph": "ba", "m": 1, "q_conf_count": "0.1p", "conf_s": "0.2p", "seed": 1},
  "beta": 0.7,
  "screen": {"lambda_c": 1.5, "tau_ratio": 0.5},
  "search": {"gamma_ebic": 10, "d_max": 10, "offset_q": 0.05},
  "replicates": 50,
  "proxy_mode": "observed",
  "output_dir": "out/exp1-p100"
})"},
        {"exp1-p200", R"({
  "name": "exp1-p200",
  "sim": {"n": 1000, "p": 200, "graph": "ba", "m": 1, "q_conf_count": "0.1p", "conf_s": "0.2p", "seed": 1},
  "beta": 0.7,
  "screen": {"lambda_c": 2.0, "tau_ratio": 0.5},
  "search": {"gamma_ebic": 20, "d_max": 10, "offset_q": 0.05},
  "replicates": 50,
  "proxy_mode": "observed",
  "output_dir": "out/exp1-p200"
})"},
        {"exp2-confs-0", R"({
  "name": "exp2-confs-0",
  "sim": {"n": 1000, "p": 100, "graph": "ba", "m": 1, "q_conf_count": 1, "conf_s": 0, "seed": 1},
  "beta": 0.7,
  "screen": {"lambda_c": 1.5, "tau_ratio": 0.5},
  "search": {"gamma_ebic": 10, "d_max": 10, "offset_q": 0.05},
  "replicates": 50,
  "proxy_mode": "latent_oracle",
  "no_proxy_ablation": true,
  "output_dir": "out/exp2-confs-0"
})"},
        {"exp2-confs-0.2", R"({
  "name": "exp2-confs-0.2",
  "sim": {"n": 1000, "p": 100, "graph": "ba", "m": 1, "q_conf_count": 1, "conf_s": "0.2p", "seed": 1},
  "beta": 0.7,
  "screen": {"lambda_c": 1.5, "tau_ratio": 0.5},
  "search": {"gamma_ebic": 10, "d_max": 10, "offset_q": 0.05},
  "replicates": 50,
  "proxy_mode": "latent_oracle",
  "no_proxy_ablation": true,
  "output_dir": "out/exp2-confs-0.2"
})"},
        {"exp2-confs-0.5", R"({
  "name": "exp2-confs-0.5",
  "sim": {"n": 1000, "p": 100, "graph": "ba", "m": 1, "q_conf_count": 1, "conf_s": "0.5p", "seed": 1},
  "beta": 0.7,
  "screen": {"lambda_c": 1.5, "tau_ratio": 0.5},
  "search": {"gamma_ebic": 10, "d_max": 10, "offset_q": 0.05},
  "replicates": 50,
  "proxy_mode": "latent_oracle",
  "no_proxy_ablation": true,
  "output_dir": "out/exp2-confs-0.5"
})"},
        {"exp2-confs-1.0", R"({
  "name": "exp2-confs-1.0",
  "sim": {"n": 1000, "p": 100, "graph": "ba", "m": 1, "q_conf_count": 1, "conf_s": "1.0p", "seed": 1},
  "beta": 0.7,
  "screen": {"lambda_c": 1.5, "tau_ratio": 0.5},
  "search": {"gamma_ebic": 10, "d_max": 10, "offset_q": 0.05},
  "replicates": 50,
  "proxy_mode": "latent_oracle",
  "no_proxy_ablation": true,
  "output_dir": "out/exp2-confs-1.0"
})"},
        {"appendixF", R"({
  "name": "appendixF",
  "sim": {"n": 1000, "p": 50, "graph": "ba", "m": 1, "q_conf_count": "0.1p", "conf_s": "0.2p", "seed": 1},
  "beta": 0.7,
  "beta_sweep": [0.5, 0.6, 0.7, 0.8, 0.9],
  "screen": {"lambda_c": 1.0, "tau_ratio": 0.5},
  "search": {"gamma_ebic": 10, "d_max": 10, "offset_q": 0.05},
  "replicates": 50,
  "proxy_mode": "observed",
  "output_dir": "out/appendixF"
})"},
        {"appendixG", R"({
  "name": "appendixG",
  "sim": {"n": 1000, "p": 50, "graph": "er", "m": 1, "q_conf_count": "0.1p", "conf_s": 10, "seed": 1},
  "beta": 0.7,
  "screen": {"lambda_c": 1.0, "tau_ratio": 0.5},
  "search": {"gamma_ebic": 10, "d_max": 10, "offset_q": 0.05},
  "replicates": 50,
  "proxy_mode": "observed",
  "output_dir": "out/appendixG"
})"},
        {"appendixG-er-m2", R"({
  "name": "appendixG-er-m2",
  "sim": {"n": 1000, "p": 50, "graph": "er", "m": 2, "q_conf_count": "0.1p", "conf_s": 10, "seed": 1},
  "beta": 0.7,
  "screen": {"lambda_c": 1.0, "tau_ratio": 0.5},
  "search": {"gamma_ebic": 10, "d_max": 10, "offset_q": 0.05},
  "replicates": 50,
  "proxy_mode": "observed",
  "output_dir": "out/appendixG-er-m2"
})"},
        {"appendixG-ba-m2", R"({
  "name": "appendixG-ba-m2",
  "sim": {"n": 1000, "p": 50, "graph": "ba", "m": 2, "q_conf_count": "0.1p", "conf_s": 10, "seed": 1},
  "beta": 0.7,
  "screen": {"lambda_c": 1.0, "tau_ratio": 0.5},
  "search": {"gamma_ebic": 10, "d_max": 10, "offset_q": 0.05},
  "replicates": 50,
  "proxy_mode": "observed",
  "output_dir": "out/appendixG-ba-m2"
})"},
    };
    return presets;
}

/// Accepts a preset name or a path to a JSON file.
inline nlohmann::json load_config_json(const std::string& name_or_path) {
    const auto& presets = preset_configs();
    auto it = presets.find(name_or_path);
    if (it != presets.end()) return nlohmann::json::parse(it->second);
    std::ifstream in(name_or_path);
    if (!in)
        throw std::invalid_argument("config: '" + name_or_path +
                                    "' is neither a preset name nor a readable file");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("config: failed to parse " + name_or_path + ": " + e.what());
    }
    return j;
}

}  // namespace tailcausal
