#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace tailcausal {

/// Squared-error loss with an L1 penalty applied only to the masked subset
/// of coefficients. An unpenalized intercept is always implicit. Predictors
/// are centered (not scaled) internally, so the penalty weight acts on the
/// natural scale of the design.
struct LassoProblem {
    Eigen::MatrixXd design;           // k x m
    Eigen::VectorXd response;         // k
    double penalty_weight = 0.0;      // lambda >= 0
    std::vector<bool> penalized_mask; // m entries; true = soft-thresholded
    double tolerance = 1e-7;
    int max_sweeps = 10000;

    void validate() const {
        if (design.rows() != response.size())
            throw std::invalid_argument("LassoProblem: row count mismatch");
        if (design.rows() < 1) throw std::invalid_argument("LassoProblem: empty design");
        if (static_cast<Eigen::Index>(penalized_mask.size()) != design.cols())
            throw std::invalid_argument("LassoProblem: mask length mismatch");
        if (penalty_weight < 0.0) throw std::invalid_argument("LassoProblem: negative penalty");
        if (!(tolerance > 0.0)) throw std::invalid_argument("LassoProblem: tolerance must be positive");
        if (max_sweeps < 1) throw std::invalid_argument("LassoProblem: max_sweeps < 1");
        if (!design.allFinite() || !response.allFinite())
            throw std::invalid_argument("LassoProblem: non-finite input");
    }
};

struct LassoFit {
    Eigen::VectorXd coefficients;
    double intercept = 0.0;
    int sweeps_used = 0;
    bool converged = false;
    double kkt_violation = 0.0;
    std::vector<double> objective_trace; // objective after each sweep
};

/// (1/2k) * sum of squared residuals + lambda * l1-norm of penalized coefs.
inline double lasso_objective(const LassoProblem& problem, const Eigen::VectorXd& coefficients,
                              double intercept) {
    const double k = static_cast<double>(problem.design.rows());
    const Eigen::VectorXd resid =
        problem.response - Eigen::VectorXd::Constant(problem.design.rows(), intercept) -
        problem.design * coefficients;
    double l1 = 0.0;
    for (Eigen::Index m = 0; m < coefficients.size(); ++m)
        if (problem.penalized_mask[static_cast<size_t>(m)]) l1 += std::abs(coefficients[m]);
    return resid.squaredNorm() / (2.0 * k) + problem.penalty_weight * l1;
}

namespace detail {

inline double soft_threshold(double value, double threshold) {
    if (value > threshold) return value - threshold;
    if (value < -threshold) return value + threshold;
    return 0.0;
}

// Max subgradient stationarity residual, evaluated on centered data with a
// mean-zero residual (exact when the intercept is the centered one).
inline double kkt_from_centered(const Eigen::MatrixXd& xc, const Eigen::VectorXd& resid,
                                const Eigen::VectorXd& beta, const std::vector<bool>& mask,
                                double lambda) {
    const double k = static_cast<double>(xc.rows());
    double worst = 0.0;
    for (Eigen::Index m = 0; m < xc.cols(); ++m) {
        const double g = xc.col(m).dot(resid) / k;
        double v;
        if (!mask[static_cast<size_t>(m)]) {
            v = std::abs(g);
        } else if (beta[m] != 0.0) {
            v = std::abs(g - lambda * (beta[m] > 0.0 ? 1.0 : -1.0));
        } else {
            v = std::max(0.0, std::abs(g) - lambda);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace detail

/// Cyclic coordinate descent with soft-thresholding on penalized coordinates
/// and exact univariate updates on unpenalized ones. Converged means both
/// the max coefficient change in a sweep and the KKT stationarity residual
/// fell below tolerance. Zero-variance penalized columns stay pinned at 0.
inline LassoFit fit(const LassoProblem& problem) {
    problem.validate();
    const Eigen::Index k = problem.design.rows();
    const Eigen::Index m = problem.design.cols();
    const double kd = static_cast<double>(k);

    Eigen::RowVectorXd col_means = problem.design.colwise().mean();
    Eigen::MatrixXd xc = problem.design.rowwise() - col_means;
    const double y_mean = problem.response.mean();
    Eigen::VectorXd yc = problem.response.array() - y_mean;

    Eigen::VectorXd col_scale(m); // (1/k) ||xc_m||^2
    for (Eigen::Index j = 0; j < m; ++j) col_scale[j] = xc.col(j).squaredNorm() / kd;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd resid = yc;

    LassoFit out;
    out.objective_trace.reserve(16);
    int sweep = 0;
    bool done = false;
    while (sweep < problem.max_sweeps && !done) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (col_scale[j] <= 0.0) continue; // constant column
            const double old = beta[j];
            const double rho = xc.col(j).dot(resid) / kd + col_scale[j] * old;
            double next;
            if (problem.penalized_mask[static_cast<size_t>(j)])
                next = detail::soft_threshold(rho, problem.penalty_weight) / col_scale[j];
            else
                next = rho / col_scale[j];
            if (next != old) {
                resid.noalias() -= xc.col(j) * (next - old);
                beta[j] = next;
                max_change = std::max(max_change, std::abs(next - old));
            }
        }
        ++sweep;
        const double intercept_now = y_mean - col_means.dot(beta);
        out.objective_trace.push_back(lasso_objective(problem, beta, intercept_now));
        if (max_change < problem.tolerance) {
            const double kkt = detail::kkt_from_centered(xc, resid, beta, problem.penalized_mask,
                                                         problem.penalty_weight);
            if (kkt <= problem.tolerance) {
                out.kkt_violation = kkt;
                done = true;
            }
        }
    }

    out.coefficients = beta;
    out.intercept = y_mean - col_means.dot(beta);
    out.sweeps_used = sweep;
    out.converged = done;
    if (!done)
        out.kkt_violation = detail::kkt_from_centered(xc, resid, beta, problem.penalized_mask,
                                                      problem.penalty_weight);
    return out;
}

/// Stationarity audit on the original (uncentered) data. Returns the max
/// over coordinates of the subgradient residual, including the intercept
/// condition |mean residual|.
inline double kkt_violation(const LassoProblem& problem, const LassoFit& fit) {
    problem.validate();
    if (fit.coefficients.size() != problem.design.cols())
        throw std::invalid_argument("kkt_violation: coefficient length mismatch");
    const double k = static_cast<double>(problem.design.rows());
    const Eigen::VectorXd resid =
        problem.response - Eigen::VectorXd::Constant(problem.design.rows(), fit.intercept) -
        problem.design * fit.coefficients;
    double worst = std::abs(resid.mean());
    for (Eigen::Index j = 0; j < problem.design.cols(); ++j) {
        const double g = problem.design.col(j).dot(resid) / k;
        double v;
        if (!problem.penalized_mask[static_cast<size_t>(j)]) {
            v = std::abs(g);
        } else if (fit.coefficients[j] != 0.0) {
            v = std::abs(g - problem.penalty_weight * (fit.coefficients[j] > 0.0 ? 1.0 : -1.0));
        } else {
            v = std::max(0.0, std::abs(g) - problem.penalty_weight);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace tailcausal
