#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "tailcausal/metrics.hpp"
#include "tailcausal/rng.hpp"

using namespace tailcausal;
using Catch::Approx;

namespace {

Dag random_dag(Rng& rng, int p, double density) {
    Dag dag(p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            if (i == j || dag.has_edge(i, j) || dag.has_edge(j, i)) continue;
            if (rng.uniform() < density && !would_create_cycle(dag, i, j)) dag.add_edge(i, j);
        }
    return dag;
}

// independent per-pair minimal-edit oracle: each unordered pair costs one
// operation when it needs an insertion, a deletion, or a flip
long shd_oracle(const Dag& a, const Dag& b) {
    long cost = 0;
    for (int i = 0; i < a.node_count(); ++i)
        for (int j = i + 1; j < a.node_count(); ++j) {
            const int sa = a.has_edge(i, j) ? 1 : a.has_edge(j, i) ? 2 : 0;
            const int sb = b.has_edge(i, j) ? 1 : b.has_edge(j, i) ? 2 : 0;
            if (sa != sb) ++cost;
        }
    return cost;
}

Dag relabel(const Dag& dag, const std::vector<int>& perm) {
    Dag out(dag.node_count());
    for (const auto& [s, d] : dag.edges())
        out.add_edge(perm[static_cast<size_t>(s)], perm[static_cast<size_t>(d)]);
    return out;
}

}  // namespace

TEST_CASE("skeleton metrics", "[metrics]") {
    Skeleton truth(4);
    truth.add(0, 1);
    truth.add(1, 2);

    SECTION("identity") {
        const StructureReport r = skeleton_metrics(truth, truth);
        CHECK(r.precision == 1.0);
        CHECK(r.recall == 1.0);
        CHECK(r.f1 == 1.0);
        CHECK(r.shd == 0);
    }
    SECTION("empty estimate") {
        const StructureReport r = skeleton_metrics(Skeleton(4), truth);
        CHECK(r.precision == 0.0);
        CHECK(r.recall == 0.0);
        CHECK(r.f1 == 0.0);
        CHECK(r.shd == 2);
    }
    SECTION("half right") {
        Skeleton est(4);
        est.add(0, 1);
        est.add(0, 2);
        const StructureReport r = skeleton_metrics(est, truth);
        CHECK(r.precision == Approx(0.5));
        CHECK(r.recall == Approx(0.5));
        CHECK(r.f1 == Approx(0.5));
        CHECK(r.shd == 2);
    }
    CHECK_THROWS_AS(skeleton_metrics(Skeleton(3), truth), std::invalid_argument);
}

TEST_CASE("dag metrics with reversal cost one", "[metrics]") {
    Dag truth(3);
    truth.add_edge(0, 1);
    truth.add_edge(1, 2);

    SECTION("one match, one reversal") {
        Dag est(3);
        est.add_edge(0, 1);
        est.add_edge(2, 1);
        const StructureReport r = dag_metrics(est, truth);
        CHECK(r.precision == Approx(0.5));
        CHECK(r.recall == Approx(0.5));
        CHECK(r.shd == 1);
    }
    SECTION("identity") {
        const StructureReport r = dag_metrics(truth, truth);
        CHECK(r.f1 == 1.0);
        CHECK(r.shd == 0);
    }
    SECTION("full reversal") {
        Dag est(3);
        est.add_edge(1, 0);
        est.add_edge(2, 1);
        const StructureReport r = dag_metrics(est, truth);
        CHECK(r.precision == 0.0);
        CHECK(r.recall == 0.0);
        CHECK(r.shd == 2);
    }
}

TEST_CASE("dag shd agrees with the per-pair edit oracle", "[metrics]") {
    Rng rng(211);
    for (int trial = 0; trial < 50; ++trial) {
        const int p = 3 + static_cast<int>(rng.uniform_index(5));
        const Dag a = random_dag(rng, p, 0.4);
        const Dag b = random_dag(rng, p, 0.4);
        CHECK(dag_metrics(a, b).shd == shd_oracle(a, b));
    }
}

TEST_CASE("confounding false positives", "[metrics]") {
    Dag truth_dag(5);
    truth_dag.add_edge(0, 1);
    SimTruth truth(truth_dag);

    SECTION("no confounders, never counted") {
        Skeleton est(5);
        est.add(2, 3);
        const ConfFpResult r = conf_fp(est, truth);
        CHECK(r.count == 0);
        CHECK(r.total_fp == 1);
    }
    SECTION("single co-exposed spurious edge") {
        truth.conf_exposure = {{2, 3}};
        truth.conf_coefs = {{0.6, 0.6}};
        Skeleton est(5);
        est.add(2, 3);
        const ConfFpResult r = conf_fp(est, truth);
        CHECK(r.count == 1);
        REQUIRE(r.fraction.has_value());
        CHECK(*r.fraction == 1.0);
    }
    SECTION("mixed false positives") {
        truth.conf_exposure = {{1, 2, 3}};
        truth.conf_coefs = {{0.6, 0.6, 0.6}};
        Skeleton est(5);
        est.add(1, 2);  // confounded FP
        est.add(2, 3);  // confounded FP
        est.add(0, 4);  // plain FP
        est.add(3, 4);  // plain FP
        est.add(2, 4);  // plain FP
        est.add(0, 1);  // true edge, not an FP
        const ConfFpResult r = conf_fp(est, truth);
        CHECK(r.count == 2);
        CHECK(r.total_fp == 5);
        CHECK(*r.fraction == Approx(0.4));
    }
    SECTION("no false positives leaves the fraction undefined") {
        Skeleton est(5);
        est.add(0, 1);
        const ConfFpResult r = conf_fp(est, truth);
        CHECK(r.count == 0);
        CHECK(r.total_fp == 0);
        CHECK_FALSE(r.fraction.has_value());
    }
}

TEST_CASE("metrics are invariant under node relabeling", "[metrics]") {
    Rng rng(223);
    for (int trial = 0; trial < 20; ++trial) {
        const int p = 4 + static_cast<int>(rng.uniform_index(4));
        const Dag est = random_dag(rng, p, 0.35);
        const Dag truth = random_dag(rng, p, 0.35);
        std::vector<int> perm(static_cast<size_t>(p));
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = p - 1; i > 0; --i)
            std::swap(perm[static_cast<size_t>(i)],
                      perm[rng.uniform_index(static_cast<std::uint64_t>(i + 1))]);
        const StructureReport before = dag_metrics(est, truth);
        const StructureReport after = dag_metrics(relabel(est, perm), relabel(truth, perm));
        CHECK(before.precision == Approx(after.precision));
        CHECK(before.recall == Approx(after.recall));
        CHECK(before.shd == after.shd);
        const StructureReport sk_before = skeleton_metrics(skeleton_of(est), skeleton_of(truth));
        const StructureReport sk_after =
            skeleton_metrics(skeleton_of(relabel(est, perm)), skeleton_of(relabel(truth, perm)));
        CHECK(sk_before.f1 == Approx(sk_after.f1));
        CHECK(sk_before.shd == sk_after.shd);
    }
}

TEST_CASE("projection consistency between the two metric levels", "[metrics]") {
    // orienting both skeletons low -> high turns skeleton metrics into dag
    // metrics with no reversals, so the reports must coincide
    Rng rng(227);
    for (int trial = 0; trial < 20; ++trial) {
        const Dag a = random_dag(rng, 6, 0.4);
        const Dag b = random_dag(rng, 6, 0.4);
        auto orient_low_high = [](const Skeleton& s) {
            Dag d(s.node_count());
            for (const auto& [i, j] : s.edges()) d.add_edge(i, j);
            return d;
        };
        const StructureReport via_skeleton = skeleton_metrics(skeleton_of(a), skeleton_of(b));
        const StructureReport via_dag =
            dag_metrics(orient_low_high(skeleton_of(a)), orient_low_high(skeleton_of(b)));
        CHECK(via_skeleton.precision == Approx(via_dag.precision));
        CHECK(via_skeleton.recall == Approx(via_dag.recall));
        CHECK(via_skeleton.f1 == Approx(via_dag.f1));
        CHECK(via_skeleton.shd == via_dag.shd);
    }
}

TEST_CASE("recall never drops when a true edge is added", "[metrics]") {
    Rng rng(229);
    for (int trial = 0; trial < 20; ++trial) {
        const Dag truth = random_dag(rng, 6, 0.4);
        if (truth.edge_count() == 0) continue;
        Dag est = random_dag(rng, 6, 0.2);
        const auto edges = truth.edges();
        const auto [s, d] = edges[rng.uniform_index(edges.size())];
        if (est.has_edge(s, d) || est.has_edge(d, s) || would_create_cycle(est, s, d)) continue;
        const double before = dag_metrics(est, truth).recall;
        est.add_edge(s, d);
        CHECK(dag_metrics(est, truth).recall >= before);
    }
}
