#pragma once

#include <optional>

#include "tailcausal/dag_search.hpp"
#include "tailcausal/skeleton_screen.hpp"
#include "tailcausal/tail_transform.hpp"

namespace tailcausal {

/// End-to-end discovery parameters. The exceedance threshold comes from beta
/// unless a direct quantile level is supplied.
struct DiscoverParams {
    double beta = 0.7;
    std::optional<double> q_conf;  // direct quantile override
    bool transform_proxy = true;
    ScreenConfig screen;
    SearchConfig search;
};

struct DiscoverOutput {
    TailSample sample;
    NodewiseResult nodewise;
    double lambda = 0.0;  // common formula value C sqrt(log p / k)
    double tau = 0.0;     // tau_ratio * lambda
    Skeleton skeleton{2};
    SearchResult search{Dag(2)};
};

/// Tail preprocessing -> nodewise screening -> threshold union skeleton ->
/// greedy score-based orientation.
inline DiscoverOutput discover(const RawPanel& panel, const DiscoverParams& params) {
    params.screen.validate();
    params.search.validate();
    const double u = params.q_conf ? threshold_from_quantile(*params.q_conf)
                                   : threshold_from_beta(panel.x.rows(), params.beta);
    DiscoverOutput out;
    out.sample = build_tail_sample_at(panel, u, params.transform_proxy);
    out.nodewise = nodewise_fit(out.sample, params.screen);
    out.lambda = screen_lambda(out.sample.p(), out.sample.k, params.screen.lambda_multiplier);
    out.tau = params.screen.tau_ratio * out.lambda;
    out.skeleton = build_skeleton(out.nodewise, out.tau);
    out.search = greedy_orient(out.skeleton, out.sample, params.search);
    return out;
}

}  // namespace tailcausal
