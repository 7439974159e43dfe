#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "tailcausal/graph.hpp"
#include "tailcausal/lasso.hpp"
#include "tailcausal/tail_transform.hpp"

namespace tailcausal {

struct ScreenConfig {
    double lambda_multiplier = 1.0;       // C in lambda = C sqrt(log p / k)
    double tau_ratio = 0.5;               // tau = tau_ratio * lambda
    std::vector<double> per_node_lambda;  // optional explicit override, length p
    double tolerance = 1e-7;
    int max_sweeps = 10000;

    void validate() const {
        if (!(lambda_multiplier > 0.0))
            throw std::invalid_argument("ScreenConfig: lambda multiplier must be positive");
        if (!(tau_ratio > 0.0 && tau_ratio < 1.0))
            throw std::invalid_argument("ScreenConfig: tau ratio must lie in (0,1)");
    }
};

inline double screen_lambda(int p, int k, double multiplier) {
    return multiplier * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(k));
}

/// Output of the nodewise regressions: beta(j, m) is the coefficient of Z_m
/// in the regression of Z_j (zero diagonal); gamma(j, r) the unpenalized
/// proxy coefficients.
struct NodewiseResult {
    Eigen::MatrixXd beta;   // p x p, zero diagonal
    Eigen::MatrixXd gamma;  // p x d
    std::vector<bool> converged;
    std::vector<double> lambda_used;

    bool all_converged() const {
        for (bool c : converged)
            if (!c) return false;
        return true;
    }
};

/// Stage 1: for each node j, lasso of Z_j on [Z_{-j} | P] with the L1
/// penalty on the p-1 cross-node columns only; proxy columns and the
/// intercept are unpenalized. lambda_j = C sqrt(log p / k) unless
/// overridden.
inline NodewiseResult nodewise_fit(const TailSample& sample, const ScreenConfig& config) {
    config.validate();
    const int p = sample.p();
    const int d = sample.proxy_dim();
    const int k = sample.k;
    if (k < 2) throw std::invalid_argument("nodewise_fit: need k >= 2 exceedances");
    if (d >= k) throw std::invalid_argument("nodewise_fit: proxy dimension must be below k");
    if (!config.per_node_lambda.empty() &&
        static_cast<int>(config.per_node_lambda.size()) != p)
        throw std::invalid_argument("nodewise_fit: per-node lambda override length mismatch");

    NodewiseResult out;
    out.beta = Eigen::MatrixXd::Zero(p, p);
    out.gamma = Eigen::MatrixXd::Zero(p, d);
    out.converged.assign(static_cast<size_t>(p), false);
    out.lambda_used.assign(static_cast<size_t>(p), 0.0);

    const double lambda_common = screen_lambda(p, k, config.lambda_multiplier);

    LassoProblem problem;
    problem.design.resize(k, p - 1 + d);
    problem.penalized_mask.assign(static_cast<size_t>(p - 1 + d), true);
    for (int r = 0; r < d; ++r) problem.penalized_mask[static_cast<size_t>(p - 1 + r)] = false;
    problem.tolerance = config.tolerance;
    problem.max_sweeps = config.max_sweeps;
    if (d > 0) problem.design.rightCols(d) = *sample.proxy;

    for (int j = 0; j < p; ++j) {
        int col = 0;
        for (int m = 0; m < p; ++m) {
            if (m == j) continue;
            problem.design.col(col++) = sample.z.col(m);
        }
        problem.response = sample.z.col(j);
        problem.penalty_weight = config.per_node_lambda.empty()
                                     ? lambda_common
                                     : config.per_node_lambda[static_cast<size_t>(j)];
        out.lambda_used[static_cast<size_t>(j)] = problem.penalty_weight;

        const LassoFit f = fit(problem);
        out.converged[static_cast<size_t>(j)] = f.converged;
        col = 0;
        for (int m = 0; m < p; ++m) {
            if (m == j) continue;
            out.beta(j, m) = f.coefficients[col++];
        }
        for (int r = 0; r < d; ++r) out.gamma(j, r) = f.coefficients[p - 1 + r];
    }
    return out;
}

/// OR-rule union: edge {j, l} is kept iff either directed coefficient
/// exceeds tau in absolute value. Non-converged nodes still contribute.
inline Skeleton build_skeleton(const NodewiseResult& result, double tau) {
    if (tau < 0.0) throw std::invalid_argument("build_skeleton: negative threshold");
    const int p = static_cast<int>(result.beta.rows());
    Skeleton skel(p);
    for (int j = 0; j < p; ++j)
        for (int l = j + 1; l < p; ++l)
            if (std::max(std::abs(result.beta(j, l)), std::abs(result.beta(l, j))) > tau)
                skel.add(j, l);
    return skel;
}

}  // namespace tailcausal
