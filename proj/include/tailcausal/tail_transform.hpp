#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace tailcausal {

/// Raw observation panel: n x p data matrix plus an optional n x d matrix of
/// proxy columns for latent common shocks. Entries must be finite.
struct RawPanel {
    Eigen::MatrixXd x;
    std::optional<Eigen::MatrixXd> proxy_raw;

    void validate() const {
        if (x.rows() < 2 || x.cols() < 2)
            throw std::invalid_argument("RawPanel: need n >= 2 and p >= 2");
        if (!x.allFinite())
            throw std::invalid_argument("RawPanel: non-finite entry in data");
        if (proxy_raw) {
            if (proxy_raw->rows() != x.rows())
                throw std::invalid_argument("RawPanel: proxy row count mismatch");
            if (!proxy_raw->allFinite())
                throw std::invalid_argument("RawPanel: non-finite entry in proxy");
        }
    }
};

/// Log-scale tail coordinates of the exceedance rows: z = log(Y) - log(u)
/// on rows where some margin of the Pareto-standardized panel exceeds u.
/// Every row satisfies max_j z(t, j) > 0.
struct TailSample {
    Eigen::MatrixXd z;                    // k x p
    std::optional<Eigen::MatrixXd> proxy; // k x d, same scale as z when transformed
    double u = 0.0;                       // Pareto-scale threshold, > 1
    int k = 0;                            // exceedance count
    std::vector<int> origin_rows;         // source row index per retained row
    bool underdetermined = false;         // k < p warning flag

    int p() const { return static_cast<int>(z.cols()); }
    int proxy_dim() const { return proxy ? static_cast<int>(proxy->cols()) : 0; }
};

/// Rank-based unit Pareto standardization with denominator n+1:
/// out[i] = (n+1) / (n+1 - R_i) where R_i is the 1-based rank of x[i].
/// Ties are broken by original index, so the output is deterministic.
/// Outputs lie in (1, n+1]; the denominator n+1 keeps them finite.
inline Eigen::VectorXd rank_to_pareto(const Eigen::VectorXd& column) {
    const auto n = column.size();
    if (n < 1) throw std::invalid_argument("rank_to_pareto: empty column");
    if (!column.allFinite()) throw std::invalid_argument("rank_to_pareto: non-finite input");
    std::vector<Eigen::Index> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return column[a] < column[b]; });
    Eigen::VectorXd out(n);
    const double np1 = static_cast<double>(n) + 1.0;
    for (Eigen::Index r = 0; r < n; ++r) {
        // rank = r + 1
        out[idx[static_cast<size_t>(r)]] = np1 / (np1 - static_cast<double>(r + 1));
    }
    return out;
}

/// Pareto-scale threshold for the common quantile level 1 - n^beta / n,
/// i.e. u = 1 / (1 - q) = n^(1 - beta).
inline double threshold_from_beta(Eigen::Index n, double beta) {
    if (n < 2) throw std::invalid_argument("threshold_from_beta: n < 2");
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("threshold_from_beta: beta must lie in (0,1)");
    return static_cast<double>(n) / std::pow(static_cast<double>(n), beta);
}

inline double threshold_from_quantile(double q_conf) {
    if (!(q_conf > 0.0 && q_conf < 1.0))
        throw std::invalid_argument("threshold_from_quantile: level must lie in (0,1)");
    return 1.0 / (1.0 - q_conf);
}

/// Standardizes every margin to unit Pareto by ranks, retains rows whose
/// maximum over the p data margins exceeds u, and returns log-tail
/// coordinates z = log(Y) - log(u) on the retained rows. Proxy columns are
/// subset to the same rows; when transform_proxy is set (the default) they
/// go through the identical rank -> Pareto -> log - log(u) pipeline,
/// otherwise raw values are passed through.
inline TailSample build_tail_sample_at(const RawPanel& panel, double u, bool transform_proxy = true) {
    panel.validate();
    if (!(u > 1.0)) throw std::invalid_argument("build_tail_sample: threshold must exceed 1");
    const Eigen::Index n = panel.x.rows();
    const Eigen::Index p = panel.x.cols();

    Eigen::MatrixXd y(n, p);
    for (Eigen::Index j = 0; j < p; ++j) y.col(j) = rank_to_pareto(panel.x.col(j));

    std::vector<int> rows;
    for (Eigen::Index t = 0; t < n; ++t)
        if (y.row(t).maxCoeff() > u) rows.push_back(static_cast<int>(t));
    if (rows.empty())
        throw std::runtime_error("build_tail_sample: no exceedances above threshold");

    TailSample s;
    s.u = u;
    s.k = static_cast<int>(rows.size());
    s.origin_rows = rows;
    s.underdetermined = s.k < static_cast<int>(p);
    const double log_u = std::log(u);
    s.z.resize(s.k, p);
    for (int r = 0; r < s.k; ++r)
        for (Eigen::Index j = 0; j < p; ++j)
            s.z(r, j) = std::log(y(rows[static_cast<size_t>(r)], j)) - log_u;

    if (panel.proxy_raw) {
        const Eigen::Index d = panel.proxy_raw->cols();
        Eigen::MatrixXd ps(s.k, d);
        if (transform_proxy) {
            for (Eigen::Index r = 0; r < d; ++r) {
                const Eigen::VectorXd yp = rank_to_pareto(panel.proxy_raw->col(r));
                for (int t = 0; t < s.k; ++t)
                    ps(t, r) = std::log(yp[rows[static_cast<size_t>(t)]]) - log_u;
            }
        } else {
            for (int t = 0; t < s.k; ++t)
                ps.row(t) = panel.proxy_raw->row(rows[static_cast<size_t>(t)]);
        }
        s.proxy = std::move(ps);
    }
    return s;
}

inline TailSample build_tail_sample(const RawPanel& panel, double beta, bool transform_proxy = true) {
    return build_tail_sample_at(panel, threshold_from_beta(panel.x.rows(), beta), transform_proxy);
}

}  // namespace tailcausal
