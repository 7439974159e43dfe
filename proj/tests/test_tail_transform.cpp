#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tailcausal/rng.hpp"
#include "tailcausal/simgen.hpp"
#include "tailcausal/tail_transform.hpp"

using namespace tailcausal;
using Catch::Approx;

TEST_CASE("rank transform matches the (n+1) pseudo-observation formula", "[tail_transform]") {
    Eigen::VectorXd col(3);
    col << 5.0, 1.0, 3.0;
    const Eigen::VectorXd y = rank_to_pareto(col);
    CHECK(y[0] == Approx(4.0));
    CHECK(y[1] == Approx(4.0 / 3.0));
    CHECK(y[2] == Approx(2.0));

    Eigen::VectorXd single(1);
    single << 7.0;
    CHECK(rank_to_pareto(single)[0] == Approx(2.0));

    Eigen::VectorXd tied(2);
    tied << 2.0, 2.0;
    const Eigen::VectorXd yt = rank_to_pareto(tied);
    CHECK(yt[0] == Approx(1.5));  // tie broken by original index
    CHECK(yt[1] == Approx(3.0));

    Eigen::VectorXd bad(2);
    bad << 1.0, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(rank_to_pareto(bad), std::invalid_argument);
}

TEST_CASE("rank transform is increasing in rank and bounded", "[tail_transform]") {
    Rng rng(3);
    Eigen::VectorXd col(200);
    for (int i = 0; i < 200; ++i) col[i] = rng.uniform(-5, 5);
    const Eigen::VectorXd y = rank_to_pareto(col);
    CHECK(y.maxCoeff() == Approx(201.0));  // rank n maps to n+1, never infinite
    CHECK(y.minCoeff() > 1.0);
    for (int i = 0; i < 200; ++i)
        for (int j = 0; j < 200; ++j)
            if (col[i] < col[j]) CHECK(y[i] < y[j]);
}

TEST_CASE("threshold from beta", "[tail_transform]") {
    CHECK(threshold_from_beta(1000, 0.7) == Approx(7.9433).epsilon(1e-4));
    CHECK(threshold_from_beta(1000, 0.5) == Approx(31.623).epsilon(1e-4));
    CHECK(threshold_from_beta(100, 0.99) == Approx(1.047).epsilon(1e-3));
    CHECK_THROWS_AS(threshold_from_beta(1000, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(threshold_from_beta(1000, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(threshold_from_beta(1, 0.5), std::invalid_argument);
    CHECK(threshold_from_quantile(0.9) == Approx(10.0));
}

TEST_CASE("exceedance selection on a single effective margin", "[tail_transform]") {
    // both columns identical, so the union event reduces to one margin;
    // n=100 with beta=0.5 gives u=10 and exactly the top 10 ranks exceed
    const int n = 100;
    RawPanel panel;
    panel.x.resize(n, 2);
    for (int i = 0; i < n; ++i) panel.x(i, 0) = panel.x(i, 1) = i + 1.0;
    const TailSample s = build_tail_sample(panel, 0.5);
    CHECK(s.u == Approx(10.0));
    CHECK(s.k == 10);
    CHECK(static_cast<int>(s.origin_rows.size()) == s.k);
    for (int t = 0; t < s.k; ++t) {
        CHECK(s.z.row(t).maxCoeff() > 0.0);
        CHECK(s.origin_rows[static_cast<size_t>(t)] >= 90);
    }
}

TEST_CASE("union exceedance count dominates the single-margin count", "[tail_transform]") {
    SimConfig sim;
    sim.n = 1000;
    sim.p = 100;
    sim.m = 1;
    sim.q_conf_count = 10;
    sim.conf_s = 20;
    sim.seed = 17;
    const SimData data = simulate(sim, ProxyMode::none);
    const TailSample s = build_tail_sample(data.panel, 0.7);
    CHECK(s.k >= 126);  // per-margin count at u = 1000^0.3; the union only enlarges
    CHECK(s.k <= 1000);
    for (int t = 0; t < s.k; ++t) CHECK(s.z.row(t).maxCoeff() > 0.0);
}

TEST_CASE("invariance under strictly increasing marginal transforms", "[tail_transform]") {
    Rng rng(11);
    RawPanel a, b;
    a.x.resize(80, 3);
    for (int i = 0; i < 80; ++i)
        for (int j = 0; j < 3; ++j) a.x(i, j) = rng.uniform(-2, 2);
    b.x = a.x.array().exp();
    const TailSample sa = build_tail_sample(a, 0.5);
    const TailSample sb = build_tail_sample(b, 0.5);
    REQUIRE(sa.k == sb.k);
    CHECK(sa.origin_rows == sb.origin_rows);
    CHECK((sa.z - sb.z).cwiseAbs().maxCoeff() == Approx(0.0).margin(1e-12));
}

TEST_CASE("proxy columns follow the selected rows", "[tail_transform]") {
    Rng rng(13);
    RawPanel panel;
    panel.x.resize(60, 2);
    Eigen::MatrixXd proxy(60, 1);
    for (int i = 0; i < 60; ++i) {
        panel.x(i, 0) = rng.uniform(0, 1);
        panel.x(i, 1) = rng.uniform(0, 1);
        proxy(i, 0) = rng.uniform(10, 20);
    }
    panel.proxy_raw = proxy;

    SECTION("raw pass-through keeps original values") {
        const TailSample s = build_tail_sample(panel, 0.5, /*transform_proxy=*/false);
        REQUIRE(s.proxy.has_value());
        for (int t = 0; t < s.k; ++t)
            CHECK((*s.proxy)(t, 0) == proxy(s.origin_rows[static_cast<size_t>(t)], 0));
    }
    SECTION("transformed proxies land on the log-tail scale") {
        const TailSample s = build_tail_sample(panel, 0.5, /*transform_proxy=*/true);
        REQUIRE(s.proxy.has_value());
        const Eigen::VectorXd yp = rank_to_pareto(proxy.col(0));
        for (int t = 0; t < s.k; ++t)
            CHECK((*s.proxy)(t, 0) ==
                  Approx(std::log(yp[s.origin_rows[static_cast<size_t>(t)]]) - std::log(s.u)));
    }
}

TEST_CASE("tail sample edge cases", "[tail_transform]") {
    RawPanel panel;
    panel.x.resize(10, 2);
    for (int i = 0; i < 10; ++i) {
        panel.x(i, 0) = i;
        panel.x(i, 1) = 10 - i;
    }
    // threshold above the max attainable rank value -> empty tail
    CHECK_THROWS_AS(build_tail_sample_at(panel, 100.0), std::runtime_error);

    // k < p flags the under-determined regime
    RawPanel wide;
    wide.x.resize(12, 8);
    Rng rng(5);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 8; ++j) wide.x(i, j) = rng.uniform(0, 1);
    const TailSample s = build_tail_sample_at(wide, 6.0);
    CHECK(s.k < 8);
    CHECK(s.underdetermined);

    RawPanel tiny;
    tiny.x.resize(1, 2);
    tiny.x << 1.0, 2.0;
    CHECK_THROWS_AS(build_tail_sample(tiny, 0.5), std::invalid_argument);
}
