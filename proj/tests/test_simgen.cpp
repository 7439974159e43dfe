#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tailcausal/rng.hpp"
#include "tailcausal/simgen.hpp"

using namespace tailcausal;
using Catch::Approx;

TEST_CASE("frechet inverse-cdf arithmetic", "[simgen]") {
    CHECK(frechet_quantile(std::exp(-1.0)) == Approx(1.0));
    CHECK(frechet_quantile(std::exp(-0.5)) == Approx(2.0));
    CHECK_THROWS_AS(frechet_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS(frechet_quantile(1.0), std::invalid_argument);

    Rng rng(191);
    const Eigen::VectorXd draws = sample_frechet(100000, rng);
    CHECK(draws.minCoeff() > 0.0);
    const double frac = (draws.array() > 10.0).count() / 100000.0;
    CHECK(frac == Approx(1.0 - std::exp(-0.1)).margin(0.01));
}

TEST_CASE("preferential attachment graph shape", "[simgen]") {
    SimConfig cfg;
    cfg.p = 50;
    cfg.m = 1;
    Rng rng(193);
    const Dag tree = gen_dag(cfg, rng);
    CHECK(tree.edge_count() == 49);  // one attachment per arriving node
    CHECK_NOTHROW(topological_order(tree));

    cfg.m = 3;
    const Dag denser = gen_dag(cfg, rng);
    // nodes 1 and 2 attach fewer than m edges; all others exactly m
    CHECK(denser.edge_count() == 1 + 2 + 3 * 47);
    CHECK_NOTHROW(topological_order(denser));
    for (const auto& [i, j] : denser.edges()) CHECK(i < j);

    cfg.m = 0;
    CHECK_THROWS_AS(gen_dag(cfg, rng), std::invalid_argument);
    cfg.m = 50;
    CHECK_THROWS_AS(gen_dag(cfg, rng), std::invalid_argument);
}

TEST_CASE("random graph edge count is calibrated", "[simgen]") {
    SimConfig cfg;
    cfg.p = 50;
    cfg.m = 1;
    cfg.graph_kind = GraphKind::erdos_renyi;
    double total = 0.0;
    for (int seed = 0; seed < 200; ++seed) {
        Rng rng(derive_seed(30, seed));
        const Dag dag = gen_dag(cfg, rng);
        CHECK_NOTHROW(topological_order(dag));
        total += dag.edge_count();
    }
    CHECK(total / 200.0 == Approx(50.0).margin(3.0));  // C(50,2) * 2/49 = 50
}

TEST_CASE("simulation bookkeeping", "[simgen]") {
    SimConfig cfg;
    cfg.n = 200;
    cfg.p = 10;
    cfg.m = 1;
    cfg.q_conf_count = 2;
    cfg.conf_s = 4;
    cfg.seed = 99;
    const SimData data = simulate(cfg, ProxyMode::observed);

    CHECK(data.panel.x.rows() == 200);
    CHECK(data.panel.x.cols() == 10);
    CHECK(data.panel.x.minCoeff() > 0.0);
    CHECK(data.panel.x.allFinite());
    REQUIRE(data.panel.proxy_raw.has_value());
    CHECK(data.panel.proxy_raw->cols() == 2);

    // edge coefficient keys match the dag exactly
    const auto edges = data.truth.dag.edges();
    REQUIRE(data.truth.edge_coefs.size() == edges.size());
    for (const auto& e : edges) {
        REQUIRE(data.truth.edge_coefs.count(e) == 1);
        const double c = data.truth.edge_coefs.at(e);
        CHECK(c >= 0.6);
        CHECK(c <= 0.9);
    }
    for (const auto& exposed : data.truth.conf_exposure) {
        CHECK(exposed.size() == 4);
        CHECK(std::adjacent_find(exposed.begin(), exposed.end()) == exposed.end());
    }
    for (const auto& coefs : data.truth.conf_coefs)
        for (double b : coefs) {
            CHECK(b >= 0.5);
            CHECK(b <= 0.8);
        }

    SECTION("proxy mode selects the handed-over matrix") {
        const SimData oracle = simulate(cfg, ProxyMode::latent_oracle);
        REQUIRE(oracle.panel.proxy_raw.has_value());
        CHECK(*oracle.panel.proxy_raw == oracle.latents);
        CHECK(oracle.panel.x == data.panel.x);  // identical panel across modes

        const SimData none = simulate(cfg, ProxyMode::none);
        CHECK_FALSE(none.panel.proxy_raw.has_value());
        CHECK(none.panel.x == data.panel.x);
    }
    SECTION("no confounders means no proxy columns") {
        SimConfig clean = cfg;
        clean.q_conf_count = 0;
        clean.conf_s = 0;
        const SimData none = simulate(clean, ProxyMode::observed);
        CHECK_FALSE(none.panel.proxy_raw.has_value());
    }
}

TEST_CASE("identical configs reproduce bit-identical panels", "[simgen]") {
    SimConfig cfg;
    cfg.n = 150;
    cfg.p = 8;
    cfg.m = 2;
    cfg.q_conf_count = 1;
    cfg.conf_s = 3;
    cfg.seed = 4242;
    const SimData a = simulate(cfg);
    const SimData b = simulate(cfg);
    CHECK(a.panel.x == b.panel.x);
    CHECK(a.proxies == b.proxies);
    CHECK(a.truth.dag == b.truth.dag);
    CHECK(a.truth.edge_coefs == b.truth.edge_coefs);

    SimConfig other = cfg;
    other.seed = 4243;
    CHECK(simulate(other).panel.x != a.panel.x);
}

TEST_CASE("extreme cause pins down the effect", "[simgen]") {
    // single edge with coefficient locked at 0.8: conditional on the cause
    // being extreme, the child equals 0.8 times the cause
    SimConfig cfg;
    cfg.n = 1000000;
    cfg.p = 2;
    cfg.m = 1;
    cfg.coef_edge_range = {0.8, 0.8};
    cfg.seed = 7;
    const SimData data = simulate(cfg, ProxyMode::none);
    REQUIRE(data.truth.dag.has_edge(0, 1));

    std::vector<double> x0(data.panel.x.col(0).begin(), data.panel.x.col(0).end());
    std::nth_element(x0.begin(), x0.begin() + 999000, x0.end());
    const double q999 = x0[999000];
    long cond = 0, pinned = 0;
    for (int t = 0; t < cfg.n; ++t) {
        if (data.panel.x(t, 0) > q999) {
            ++cond;
            if (data.panel.x(t, 1) == 0.8 * data.panel.x(t, 0)) ++pinned;
        }
    }
    REQUIRE(cond > 500);
    CHECK(static_cast<double>(pinned) / static_cast<double>(cond) >= 0.95);
}

TEST_CASE("marginal tail index of a max-linear child", "[simgen]") {
    // P(X2 > x) ~ (c+1)/x for X2 = max(c X1, eps2); checked at x = 500
    Rng rng(derive_seed(888, 0));
    const double c = 0.8;
    const long n = 10000000;
    long exceed = 0;
    for (long t = 0; t < n; ++t) {
        const double x1 = sample_frechet(rng);
        const double x2 = std::max(c * x1, sample_frechet(rng));
        if (x2 > 500.0) ++exceed;
    }
    const double scaled = static_cast<double>(exceed) / static_cast<double>(n) * 500.0;
    CHECK(scaled == Approx(c + 1.0).epsilon(0.10));
}

TEST_CASE("structural max dominates the log-sum-exp softening", "[simgen]") {
    SimConfig cfg;
    cfg.n = 100;
    cfg.p = 12;
    cfg.m = 2;
    cfg.q_conf_count = 2;
    cfg.conf_s = 5;
    cfg.seed = 31;
    const SimData data = simulate(cfg, ProxyMode::observed);

    // recompute the structural terms per node and row; the log of their sum
    // exceeds the log of their max by at most log(#terms)
    for (int t = 0; t < cfg.n; ++t) {
        for (int j = 0; j < cfg.p; ++j) {
            std::vector<double> terms;
            for (int i : data.truth.dag.parents(j))
                terms.push_back(data.truth.edge_coefs.at({i, j}) * data.panel.x(t, i));
            for (size_t l = 0; l < data.truth.conf_exposure.size(); ++l) {
                const auto& exposed = data.truth.conf_exposure[l];
                const auto it = std::find(exposed.begin(), exposed.end(), j);
                if (it != exposed.end())
                    terms.push_back(data.truth.conf_coefs[l][static_cast<size_t>(
                                        it - exposed.begin())] *
                                    data.latents(t, static_cast<int>(l)));
            }
            // x_j bounds the innovation from above and is itself the max term
            terms.push_back(data.panel.x(t, j));
            double sum = 0.0, max_term = 0.0;
            for (double v : terms) {
                sum += v;
                max_term = std::max(max_term, v);
            }
            CHECK(max_term == data.panel.x(t, j));
            const double gap = std::log(sum) - std::log(max_term);
            CHECK(gap >= 0.0);
            CHECK(gap <= std::log(static_cast<double>(terms.size())) + 1e-12);
        }
    }
}

TEST_CASE("simulation config validation", "[simgen]") {
    SimConfig cfg;
    cfg.p = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.p = 10;
    cfg.conf_s = 11;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.conf_s = 2;
    cfg.q_conf_count = -1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.q_conf_count = 1;
    cfg.coef_edge_range = {0.9, 0.6};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
