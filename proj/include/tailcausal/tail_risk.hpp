#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "tailcausal/rng.hpp"
#include "tailcausal/simgen.hpp"
#include "tailcausal/tail_transform.hpp"

namespace tailcausal {

/// Empirical tail prediction risk, minimized over the envelope predictor
/// class h(z) = max(z, c) + d by coarse-to-fine grid search.
struct RiskEstimate {
    double risk = 0.0;
    double knee_c = 0.0;              // c in h(z) = max(z, c) + d
    double shift_d = 0.0;             // d
    long conditioning_count = 0;      // rows with z_i > 0
    double grid_resolution = 0.0;     // final step size
    std::vector<double> stage_risks;  // best risk after each refinement stage
};

namespace detail {

inline double envelope_abs_loss(const std::vector<double>& a, const std::vector<double>& b,
                                double c1, double c0) {
    // predictor max(z + c1, c0); mean absolute error
    double total = 0.0;
    for (size_t t = 0; t < a.size(); ++t)
        total += std::abs(b[t] - std::max(a[t] + c1, c0));
    return total / static_cast<double>(a.size());
}

}  // namespace detail

/// Restricts to rows with zi > 0 and minimizes mean |zj - (max(zi, c) + d)|.
/// Internally the class is parameterized as max(z + c1, c0), a bijective
/// reparameterization with c = c0 - c1 and d = c1. The search runs a 41x41
/// grid over the data range +/- 2, then recenters on the incumbent with a
/// shrinking window until the step is below 1e-3 (at least three
/// refinements). Each stage grid contains the incumbent, so the estimate is
/// non-increasing across stages.
inline RiskEstimate empirical_tail_risk(const Eigen::VectorXd& zi, const Eigen::VectorXd& zj) {
    if (zi.size() != zj.size()) throw std::invalid_argument("empirical_tail_risk: length mismatch");
    std::vector<double> a, b;
    for (Eigen::Index t = 0; t < zi.size(); ++t) {
        if (zi[t] > 0.0) {
            a.push_back(zi[t]);
            b.push_back(zj[t]);
        }
    }
    if (a.empty()) throw std::invalid_argument("empirical_tail_risk: no rows with z_i > 0");

    double d_lo = b[0] - a[0], d_hi = b[0] - a[0];
    double b_lo = b[0], b_hi = b[0];
    for (size_t t = 0; t < a.size(); ++t) {
        d_lo = std::min(d_lo, b[t] - a[t]);
        d_hi = std::max(d_hi, b[t] - a[t]);
        b_lo = std::min(b_lo, b[t]);
        b_hi = std::max(b_hi, b[t]);
    }

    constexpr int kPoints = 41;
    constexpr double kFinalStep = 1e-3;
    constexpr int kMinStages = 4; // initial grid + >= 3 refinements

    double c1_center = 0.5 * ((d_lo - 2.0) + (d_hi + 2.0));
    double c1_half = 0.5 * ((d_hi + 2.0) - (d_lo - 2.0));
    double c0_center = 0.5 * ((b_lo - 2.0) + (b_hi + 2.0));
    double c0_half = 0.5 * ((b_hi + 2.0) - (b_lo - 2.0));

    RiskEstimate est;
    est.conditioning_count = static_cast<long>(a.size());
    double best = std::numeric_limits<double>::infinity();
    double best_c1 = c1_center, best_c0 = c0_center;
    double step_c1 = 0.0, step_c0 = 0.0;

    for (int stage = 0;; ++stage) {
        step_c1 = 2.0 * c1_half / (kPoints - 1);
        step_c0 = 2.0 * c0_half / (kPoints - 1);
        for (int ic = 0; ic < kPoints; ++ic) {
            const double c1 = c1_center - c1_half + step_c1 * ic;
            for (int jc = 0; jc < kPoints; ++jc) {
                const double c0 = c0_center - c0_half + step_c0 * jc;
                const double v = detail::envelope_abs_loss(a, b, c1, c0);
                if (v < best) {
                    best = v;
                    best_c1 = c1;
                    best_c0 = c0;
                }
            }
        }
        est.stage_risks.push_back(best);
        const bool fine_enough = step_c1 <= kFinalStep && step_c0 <= kFinalStep;
        if (fine_enough && stage + 1 >= kMinStages) break;
        // recenter on the incumbent; window spans two previous cells each way
        c1_center = best_c1;
        c0_center = best_c0;
        c1_half = 2.0 * step_c1;
        c0_half = 2.0 * step_c0;
    }

    est.risk = best;
    est.shift_d = best_c1;
    est.knee_c = best_c0 - best_c1;
    est.grid_resolution = std::max(step_c1, step_c0);
    return est;
}

struct DirectionRisks {
    double forward = 0.0;   // risk predicting node 2 from node 1
    double backward = 0.0;  // risk predicting node 1 from node 2
    long exceedances_forward = 0;
    long exceedances_backward = 0;
};

/// Bivariate max-linear direction experiment: X1 = eps1,
/// X2 = max(c X1, eps2) with Frechet(1) innovations; rank-Pareto log-tail
/// coordinates at u = n^(1-beta); returns the two empirical tail risks.
inline DirectionRisks forward_backward_risk(double c, long n, double beta, std::uint64_t seed) {
    if (!(c > 0.0)) throw std::invalid_argument("forward_backward_risk: c must be positive");
    if (n < 10000) throw std::invalid_argument("forward_backward_risk: n < 1e4");
    Rng rng(seed);
    Eigen::VectorXd x1(n), x2(n);
    for (long t = 0; t < n; ++t) {
        const double e1 = sample_frechet(rng);
        const double e2 = sample_frechet(rng);
        x1[t] = e1;
        x2[t] = std::max(c * e1, e2);
    }
    const double u = threshold_from_beta(n, beta);
    const double log_u = std::log(u);
    Eigen::VectorXd z1 = rank_to_pareto(x1).array().log() - log_u;
    Eigen::VectorXd z2 = rank_to_pareto(x2).array().log() - log_u;

    const long k1 = (z1.array() > 0.0).count();
    const long k2 = (z2.array() > 0.0).count();
    if (k1 < 100 || k2 < 100)
        throw std::runtime_error(
            "forward_backward_risk: fewer than 100 exceedances; raise beta to retain a larger "
            "tail fraction");

    DirectionRisks out;
    const RiskEstimate fwd = empirical_tail_risk(z1, z2);
    const RiskEstimate bwd = empirical_tail_risk(z2, z1);
    out.forward = fwd.risk;
    out.backward = bwd.risk;
    out.exceedances_forward = fwd.conditioning_count;
    out.exceedances_backward = bwd.conditioning_count;
    return out;
}

}  // namespace tailcausal
