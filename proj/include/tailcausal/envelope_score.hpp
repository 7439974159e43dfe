#pragma once

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "tailcausal/tail_transform.hpp"

namespace tailcausal {

/// Linear-interpolation sample quantile (continuous, "type 7"): position
/// h = (k-1)q on the sorted sample, interpolated between the bracketing
/// order statistics.
inline double empirical_quantile(const Eigen::VectorXd& values, double q) {
    if (values.size() < 1) throw std::invalid_argument("empirical_quantile: empty vector");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("empirical_quantile: level outside (0,1)");
    std::vector<double> s(values.data(), values.data() + values.size());
    std::sort(s.begin(), s.end());
    const double h = (static_cast<double>(s.size()) - 1.0) * q;
    const auto lo = static_cast<size_t>(std::floor(h));
    const double frac = h - std::floor(h);
    if (lo + 1 >= s.size()) return s.back();
    return s[lo] + frac * (s[lo + 1] - s[lo]);
}

/// Sample-global transfer offsets, estimated by a low empirical quantile of
/// per-row differences and cached by pair. Entries are pure functions of
/// (pair, sample, q), so the cache is never invalidated; inserts are
/// synchronized, reads of existing entries are safe concurrently.
class OffsetTable {
public:
    OffsetTable(const TailSample& sample, double q) : sample_(&sample), q_(q) {
        if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("OffsetTable: level outside (0,1)");
    }

    double quantile_level() const { return q_; }

    /// c_0 for node j: Q_q of Z_{.j}.
    double base(int j) const {
        check_node(j);
        std::lock_guard<std::mutex> lock(mu_);
        auto it = base_.find(j);
        if (it != base_.end()) return it->second;
        const double v = empirical_quantile(sample_->z.col(j), q_);
        base_.emplace(j, v);
        return v;
    }

    /// c_{source -> target}: Q_q of Z_{.target} - Z_{.source}.
    double pair(int source, int target) const {
        check_node(source);
        check_node(target);
        if (source == target) throw std::invalid_argument("OffsetTable: self pair");
        const long long key = static_cast<long long>(source) * sample_->p() + target;
        std::lock_guard<std::mutex> lock(mu_);
        auto it = pair_.find(key);
        if (it != pair_.end()) return it->second;
        const double v =
            empirical_quantile(sample_->z.col(target) - sample_->z.col(source), q_);
        pair_.emplace(key, v);
        return v;
    }

    /// c_{r -> target}: Q_q of Z_{.target} - P_{.r}.
    double proxy(int r, int target) const {
        check_node(target);
        if (!sample_->proxy || r < 0 || r >= sample_->proxy_dim())
            throw std::invalid_argument("OffsetTable: proxy index out of range");
        const long long key = static_cast<long long>(r) * sample_->p() + target;
        std::lock_guard<std::mutex> lock(mu_);
        auto it = proxy_.find(key);
        if (it != proxy_.end()) return it->second;
        const double v =
            empirical_quantile(sample_->z.col(target) - sample_->proxy->col(r), q_);
        proxy_.emplace(key, v);
        return v;
    }

    const TailSample& sample() const { return *sample_; }

private:
    void check_node(int j) const {
        if (j < 0 || j >= sample_->p())
            throw std::invalid_argument("OffsetTable: node id out of range");
    }

    const TailSample* sample_;
    double q_;
    mutable std::mutex mu_;
    mutable std::unordered_map<int, double> base_;
    mutable std::unordered_map<long long, double> pair_;
    mutable std::unordered_map<long long, double> proxy_;
};

/// Offsets needed to score node j under parent set pa.
struct NodeOffsets {
    double base = 0.0;
    std::vector<double> parents; // aligned with pa
    std::vector<double> proxies; // one per proxy component
};

inline NodeOffsets compute_offsets(const TailSample& sample, int j, const std::vector<int>& pa,
                                   double q) {
    OffsetTable table(sample, q);
    NodeOffsets out;
    out.base = table.base(j);
    out.parents.reserve(pa.size());
    for (int l : pa) out.parents.push_back(table.pair(l, j));
    for (int r = 0; r < sample.proxy_dim(); ++r) out.proxies.push_back(table.proxy(r, j));
    return out;
}

/// Fitted envelope for node j: pointwise max of the base level, the
/// offset-shifted parents, and the offset-shifted proxy components. The
/// parent block is absent when pa is empty; the proxy block is absent when
/// the sample has no proxies.
inline Eigen::VectorXd predict_envelope(const TailSample& sample, int j,
                                        const std::vector<int>& pa, const OffsetTable& offsets) {
    const int k = sample.k;
    const double c0 = offsets.base(j);
    Eigen::VectorXd out = Eigen::VectorXd::Constant(k, c0);
    for (int l : pa) {
        const double c = offsets.pair(l, j);
        for (int t = 0; t < k; ++t) out[t] = std::max(out[t], sample.z(t, l) + c);
    }
    for (int r = 0; r < sample.proxy_dim(); ++r) {
        const double c = offsets.proxy(r, j);
        for (int t = 0; t < k; ++t) out[t] = std::max(out[t], (*sample.proxy)(t, r) + c);
    }
    return out;
}

/// Sum of absolute envelope residuals.
inline double sae(const Eigen::VectorXd& actual, const Eigen::VectorXd& predicted) {
    if (actual.size() != predicted.size())
        throw std::invalid_argument("sae: length mismatch");
    return (actual - predicted).cwiseAbs().sum();
}

/// SAE for node j without materializing the prediction vector.
inline double envelope_sae(const TailSample& sample, int j, const std::vector<int>& pa,
                           const OffsetTable& offsets) {
    const int k = sample.k;
    const double c0 = offsets.base(j);
    const int d = sample.proxy_dim();
    std::vector<double> pair_c(pa.size());
    for (size_t i = 0; i < pa.size(); ++i) pair_c[i] = offsets.pair(pa[i], j);
    std::vector<double> proxy_c(static_cast<size_t>(d));
    for (int r = 0; r < d; ++r) proxy_c[static_cast<size_t>(r)] = offsets.proxy(r, j);

    double total = 0.0;
    for (int t = 0; t < k; ++t) {
        double pred = c0;
        for (size_t i = 0; i < pa.size(); ++i)
            pred = std::max(pred, sample.z(t, pa[i]) + pair_c[i]);
        for (int r = 0; r < d; ++r)
            pred = std::max(pred, (*sample.proxy)(t, r) + proxy_c[static_cast<size_t>(r)]);
        total += std::abs(sample.z(t, j) - pred);
    }
    return total;
}

struct NodeScore {
    double sae = 0.0;
    double fit_term = 0.0;
    double penalty_term = 0.0;
    double total = 0.0;
    int parent_count = 0;
    bool sae_clamped = false;
};

constexpr double kSaeFloorPerRow = 1e-9; // floor = 1e-9 * k, guards log of zero

/// fit = (k/2) log(SAE/k); penalty = (1/2)(log k + 2 gamma log p) |pa|.
/// Proxy components never count toward parent_count.
inline NodeScore node_score(double sae_value, int k, int parent_count, double gamma_ebic, int p) {
    if (k < 1) throw std::invalid_argument("node_score: k < 1");
    if (parent_count < 0) throw std::invalid_argument("node_score: negative parent count");
    NodeScore s;
    s.parent_count = parent_count;
    double effective = sae_value;
    const double floor = kSaeFloorPerRow * static_cast<double>(k);
    if (!(effective > floor)) {
        effective = floor;
        s.sae_clamped = true;
    }
    s.sae = sae_value;
    const double kd = static_cast<double>(k);
    s.fit_term = 0.5 * kd * std::log(effective / kd);
    s.penalty_term = 0.5 * (std::log(kd) + 2.0 * gamma_ebic * std::log(static_cast<double>(p))) *
                     static_cast<double>(parent_count);
    s.total = s.fit_term + s.penalty_term;
    return s;
}

}  // namespace tailcausal
