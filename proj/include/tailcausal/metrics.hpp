#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <utility>

#include "tailcausal/graph.hpp"
#include "tailcausal/simgen.hpp"

namespace tailcausal {

struct StructureReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long shd = 0;
    std::optional<long> conf_fp;          // filled by attach_conf_fp
    std::optional<double> conf_fp_frac;   // undefined when there are no false positives
};

namespace detail {

inline double safe_ratio(long num, long den) {
    return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

inline double f1_of(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace detail

/// Precision/recall/F1 over unordered edges; SHD is the size of the
/// symmetric difference.
inline StructureReport skeleton_metrics(const Skeleton& estimate, const Skeleton& truth) {
    if (estimate.node_count() != truth.node_count())
        throw std::invalid_argument("skeleton_metrics: dimension mismatch");
    long tp = 0;
    for (const auto& e : estimate.edges())
        if (truth.edges().count(e)) ++tp;
    const long fp = estimate.edge_count() - tp;
    const long fn = truth.edge_count() - tp;
    StructureReport r;
    r.precision = detail::safe_ratio(tp, estimate.edge_count());
    r.recall = detail::safe_ratio(tp, truth.edge_count());
    r.f1 = detail::f1_of(r.precision, r.recall);
    r.shd = fp + fn;
    return r;
}

/// Directed metrics. A true positive requires matching orientation. SHD
/// counts pairs adjacent in exactly one graph plus pairs adjacent in both
/// with opposite orientation (a reversal costs 1).
inline StructureReport dag_metrics(const Dag& estimate, const Dag& truth) {
    if (estimate.node_count() != truth.node_count())
        throw std::invalid_argument("dag_metrics: dimension mismatch");
    std::set<std::pair<int, int>> est_edges, tru_edges;
    for (const auto& e : estimate.edges()) est_edges.insert(e);
    for (const auto& e : truth.edges()) tru_edges.insert(e);

    long tp = 0;
    for (const auto& e : est_edges)
        if (tru_edges.count(e)) ++tp;

    long shd = 0;
    std::set<std::pair<int, int>> pairs;
    for (const auto& [s, d] : est_edges) pairs.insert(Skeleton::normalize(s, d));
    for (const auto& [s, d] : tru_edges) pairs.insert(Skeleton::normalize(s, d));
    for (const auto& [a, b] : pairs) {
        const bool e_ab = est_edges.count({a, b}) > 0, e_ba = est_edges.count({b, a}) > 0;
        const bool t_ab = tru_edges.count({a, b}) > 0, t_ba = tru_edges.count({b, a}) > 0;
        const bool in_est = e_ab || e_ba, in_tru = t_ab || t_ba;
        if (in_est != in_tru) ++shd;                       // insertion or deletion
        else if (e_ab != t_ab) ++shd;                      // adjacent in both, opposite direction
    }

    StructureReport r;
    r.precision = detail::safe_ratio(tp, static_cast<long>(est_edges.size()));
    r.recall = detail::safe_ratio(tp, static_cast<long>(tru_edges.size()));
    r.f1 = detail::f1_of(r.precision, r.recall);
    r.shd = shd;
    return r;
}

struct ConfFpResult {
    long count = 0;
    long total_fp = 0;
    std::optional<double> fraction; // count / total_fp; undefined when total_fp = 0
};

/// Confounding false positives: estimated adjacencies between pairs that are
/// not adjacent in the true skeleton but are both exposed to some latent
/// confounder. Uses true-skeleton non-adjacency as the purely-confounded
/// surrogate.
inline ConfFpResult conf_fp(const Skeleton& estimate, const SimTruth& truth) {
    if (estimate.node_count() != truth.dag.node_count())
        throw std::invalid_argument("conf_fp: dimension mismatch");
    const Skeleton true_skel = skeleton_of(truth.dag);
    ConfFpResult r;
    for (const auto& [i, j] : estimate.edges()) {
        if (true_skel.has(i, j)) continue;
        ++r.total_fp;
        for (const auto& exposed : truth.conf_exposure) {
            const bool has_i = std::binary_search(exposed.begin(), exposed.end(), i);
            const bool has_j = std::binary_search(exposed.begin(), exposed.end(), j);
            if (has_i && has_j) {
                ++r.count;
                break;
            }
        }
    }
    if (r.total_fp > 0) r.fraction = static_cast<double>(r.count) / static_cast<double>(r.total_fp);
    return r;
}

inline ConfFpResult conf_fp(const Dag& estimate, const SimTruth& truth) {
    return conf_fp(skeleton_of(estimate), truth);
}

inline void attach_conf_fp(StructureReport& report, const ConfFpResult& c) {
    report.conf_fp = c.count;
    report.conf_fp_frac = c.fraction;
}

}  // namespace tailcausal
