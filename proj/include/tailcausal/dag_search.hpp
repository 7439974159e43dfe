#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tailcausal/envelope_score.hpp"
#include "tailcausal/graph.hpp"
#include "tailcausal/tail_transform.hpp"

namespace tailcausal {

struct SearchConfig {
    double gamma_ebic = 10.0;
    int d_max = 10;
    double q = 0.05;  // offset quantile
    enum class Init { empty, ordered_orientation };
    Init init_mode = Init::empty;
    long max_iterations = 1000000;

    void validate() const {
        if (gamma_ebic < 0.0) throw std::invalid_argument("SearchConfig: negative EBIC gamma");
        if (d_max < 1) throw std::invalid_argument("SearchConfig: d_max < 1");
        if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("SearchConfig: q outside (0,1)");
        if (max_iterations < 1) throw std::invalid_argument("SearchConfig: max_iterations < 1");
    }
};

enum class MoveKind { add = 0, del = 1, reverse = 2 };

inline const char* move_kind_name(MoveKind k) {
    switch (k) {
        case MoveKind::add: return "add";
        case MoveKind::del: return "delete";
        case MoveKind::reverse: return "reverse";
    }
    return "?";
}

struct Move {
    MoveKind kind;
    int source;
    int target;
    double score_delta = 0.0;
};

namespace detail {

struct IntVecHash {
    size_t operator()(const std::vector<int>& v) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (int x : v) {
            h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(x));
            h *= 1099511628211ULL;
        }
        return static_cast<size_t>(h);
    }
};

inline std::vector<int> sorted_with(const std::vector<int>& v, int extra) {
    std::vector<int> out(v);
    out.insert(std::upper_bound(out.begin(), out.end(), extra), extra);
    return out;
}

inline std::vector<int> sorted_without(const std::vector<int>& v, int drop) {
    std::vector<int> out;
    out.reserve(v.size());
    for (int x : v)
        if (x != drop) out.push_back(x);
    return out;
}

inline std::vector<int> sorted_copy(const std::vector<int>& v) {
    std::vector<int> out(v);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// Shared scoring machinery for the orientation search: the sample-global
/// offset cache plus a per-node memo of Score(j, pa) keyed by the sorted
/// parent set. Both search procedures draw from the same context, so their
/// scores are exactly comparable.
class ScoreContext {
public:
    ScoreContext(const TailSample& sample, const SearchConfig& config)
        : sample_(&sample), config_(config), offsets_(sample, config.q),
          memo_(static_cast<size_t>(sample.p())) {
        config.validate();
    }

    /// Score(j, pa): envelope SAE fit term plus EBIC parent penalty.
    double node_total(int j, const std::vector<int>& pa_sorted) {
        auto& m = memo_[static_cast<size_t>(j)];
        auto it = m.find(pa_sorted);
        if (it != m.end()) return it->second;
        const double s = envelope_sae(*sample_, j, pa_sorted, offsets_);
        const double total =
            node_score(s, sample_->k, static_cast<int>(pa_sorted.size()), config_.gamma_ebic,
                       sample_->p())
                .total;
        m.emplace(pa_sorted, total);
        return total;
    }

    const OffsetTable& offsets() const { return offsets_; }
    const TailSample& sample() const { return *sample_; }
    const SearchConfig& config() const { return config_; }

private:
    const TailSample* sample_;
    SearchConfig config_;
    OffsetTable offsets_;
    std::vector<std::unordered_map<std::vector<int>, double, detail::IntVecHash>> memo_;
};

/// After removing source->target, would target->source close a cycle? True
/// iff source still reaches target along some other directed path.
inline bool reversal_creates_cycle(const Dag& dag, int source, int target) {
    std::vector<char> seen(static_cast<size_t>(dag.node_count()), 0);
    std::vector<int> stack;
    seen[static_cast<size_t>(target)] = 1;
    for (int u : dag.parents(target)) {
        if (u == source) continue;  // the edge being reversed
        if (u == target) continue;
        if (!seen[static_cast<size_t>(u)]) {
            seen[static_cast<size_t>(u)] = 1;
            stack.push_back(u);
        }
    }
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        if (v == source) return true;
        for (int u : dag.parents(v)) {
            if (!seen[static_cast<size_t>(u)]) {
                seen[static_cast<size_t>(u)] = 1;
                stack.push_back(u);
            }
        }
    }
    return false;
}

/// All admissible moves (unscored): additions restricted to skeleton pairs,
/// every move preserving acyclicity and in-degree <= d_max. Deletions of
/// existing edges are always admissible.
inline std::vector<Move> enumerate_moves(const Dag& dag, const Skeleton& skeleton,
                                         const SearchConfig& config) {
    if (dag.node_count() != skeleton.node_count())
        throw std::invalid_argument("enumerate_moves: dimension mismatch");
    const auto dag_edges = dag.edges();
    for (const auto& [s, d] : dag_edges)
        if (!skeleton.has(s, d))
            throw std::logic_error("enumerate_moves: dag edge outside the skeleton");

    std::vector<Move> moves;
    for (const auto& [i, j] : skeleton.edges()) {
        if (dag.has_edge(i, j) || dag.has_edge(j, i)) continue;
        if (dag.in_degree(j) < config.d_max && !would_create_cycle(dag, i, j))
            moves.push_back({MoveKind::add, i, j, 0.0});
        if (dag.in_degree(i) < config.d_max && !would_create_cycle(dag, j, i))
            moves.push_back({MoveKind::add, j, i, 0.0});
    }
    for (const auto& [s, d] : dag_edges) moves.push_back({MoveKind::del, s, d, 0.0});
    for (const auto& [s, d] : dag_edges) {
        if (dag.in_degree(s) + 1 <= config.d_max && !reversal_creates_cycle(dag, s, d))
            moves.push_back({MoveKind::reverse, s, d, 0.0});
    }
    return moves;
}

/// Score change of a move: only nodes whose parent set changes are
/// re-scored. Additions and deletions affect the target; a reversal affects
/// both endpoints.
inline double score_delta(const Move& move, const Dag& dag, ScoreContext& ctx) {
    const auto pa_t = detail::sorted_copy(dag.parents(move.target));
    switch (move.kind) {
        case MoveKind::add:
            return ctx.node_total(move.target, detail::sorted_with(pa_t, move.source)) -
                   ctx.node_total(move.target, pa_t);
        case MoveKind::del:
            return ctx.node_total(move.target, detail::sorted_without(pa_t, move.source)) -
                   ctx.node_total(move.target, pa_t);
        case MoveKind::reverse: {
            const auto pa_s = detail::sorted_copy(dag.parents(move.source));
            const double d_target =
                ctx.node_total(move.target, detail::sorted_without(pa_t, move.source)) -
                ctx.node_total(move.target, pa_t);
            const double d_source =
                ctx.node_total(move.source, detail::sorted_with(pa_s, move.target)) -
                ctx.node_total(move.source, pa_s);
            return d_target + d_source;
        }
    }
    return 0.0;
}

struct MoveLogEntry {
    long iteration;
    MoveKind kind;
    int source;
    int target;
    double delta;
    double score_after;
};

struct SearchResult {
    Dag dag;
    double score = 0.0;
    std::vector<MoveLogEntry> move_log;
    bool truncated = false;
    long iterations = 0;
    long candidates_considered = 0;  // exhaustive search only
    long candidates_valid = 0;       // exhaustive search only

    explicit SearchResult(Dag d) : dag(std::move(d)) {}
};

inline nlohmann::json move_log_to_json(const std::vector<MoveLogEntry>& log) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : log) {
        out.push_back({{"iteration", e.iteration},
                       {"move", move_kind_name(e.kind)},
                       {"source", e.source},
                       {"target", e.target},
                       {"delta", e.delta},
                       {"score", e.score_after}});
    }
    return out;
}

namespace detail {

// total tie order: smaller delta first, then add < delete < reverse,
// then source, then target
inline bool move_precedes(const Move& a, const Move& b) {
    if (a.score_delta != b.score_delta) return a.score_delta < b.score_delta;
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    if (a.source != b.source) return a.source < b.source;
    return a.target < b.target;
}

inline double total_score(const Dag& dag, ScoreContext& ctx) {
    double total = 0.0;
    for (int j = 0; j < dag.node_count(); ++j)
        total += ctx.node_total(j, sorted_copy(dag.parents(j)));
    return total;
}

}  // namespace detail

/// Greedy hill climbing: applies the single best admissible move per round
/// while the best move strictly reduces the score. Deterministic given the
/// config and the tie rule.
inline SearchResult greedy_orient(const Skeleton& skeleton, const TailSample& sample,
                                  const SearchConfig& config, ScoreContext* shared_ctx = nullptr) {
    config.validate();
    if (skeleton.node_count() != sample.p())
        throw std::invalid_argument("greedy_orient: skeleton/sample dimension mismatch");

    std::optional<ScoreContext> local_ctx;
    if (!shared_ctx) local_ctx.emplace(sample, config);
    ScoreContext& ctx = shared_ctx ? *shared_ctx : *local_ctx;

    Dag dag(sample.p());
    if (config.init_mode == SearchConfig::Init::ordered_orientation) {
        // low -> high orientation is acyclic; edges beyond d_max are skipped
        for (const auto& [i, j] : skeleton.edges())
            if (dag.in_degree(j) < config.d_max) dag.add_edge(i, j);
    }

    SearchResult result(dag);
    double score = detail::total_score(result.dag, ctx);
    while (true) {
        auto moves = enumerate_moves(result.dag, skeleton, config);
        const Move* best = nullptr;
        for (auto& m : moves) {
            m.score_delta = score_delta(m, result.dag, ctx);
            if (!best || detail::move_precedes(m, *best)) best = &m;
        }
        if (!best || !(best->score_delta < 0.0)) break;
        if (result.iterations >= config.max_iterations) {
            result.truncated = true;
            break;
        }
        switch (best->kind) {
            case MoveKind::add: result.dag.add_edge(best->source, best->target); break;
            case MoveKind::del: result.dag.remove_edge(best->source, best->target); break;
            case MoveKind::reverse: result.dag.reverse_edge(best->source, best->target); break;
        }
        ++result.iterations;
        score += best->score_delta;
        result.move_log.push_back({result.iterations, best->kind, best->source, best->target,
                                   best->score_delta, score});
    }
    result.score = score;
    return result;
}

/// Exact minimizer for small problems: every skeleton edge is absent,
/// forward, or backward; all acyclic, in-degree-feasible assignments are
/// scored and the global minimum returned. Score ties are broken by the
/// lexicographic order on the directed edge list.
inline SearchResult exhaustive_orient(const Skeleton& skeleton, const TailSample& sample,
                                      const SearchConfig& config,
                                      ScoreContext* shared_ctx = nullptr) {
    config.validate();
    if (skeleton.node_count() != sample.p())
        throw std::invalid_argument("exhaustive_orient: skeleton/sample dimension mismatch");
    if (skeleton.node_count() > 6 || skeleton.edge_count() > 8)
        throw std::invalid_argument(
            "exhaustive_orient: refusing instances beyond p <= 6, |skeleton| <= 8");

    std::optional<ScoreContext> local_ctx;
    if (!shared_ctx) local_ctx.emplace(sample, config);
    ScoreContext& ctx = shared_ctx ? *shared_ctx : *local_ctx;

    const std::vector<std::pair<int, int>> pairs(skeleton.edges().begin(), skeleton.edges().end());
    const int p = skeleton.node_count();
    const int ne = static_cast<int>(pairs.size());
    long assignments = 1;
    for (int e = 0; e < ne; ++e) assignments *= 3;

    SearchResult result{Dag(p)};
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, int>> best_edges;
    bool have_best = false;

    std::vector<std::vector<int>> parents(static_cast<size_t>(p));
    for (long code = 0; code < assignments; ++code) {
        ++result.candidates_considered;
        for (auto& v : parents) v.clear();
        long rest = code;
        bool feasible = true;
        std::vector<std::pair<int, int>> edges;
        for (int e = 0; e < ne; ++e) {
            const int state = static_cast<int>(rest % 3);
            rest /= 3;
            if (state == 1) edges.emplace_back(pairs[static_cast<size_t>(e)].first,
                                               pairs[static_cast<size_t>(e)].second);
            else if (state == 2) edges.emplace_back(pairs[static_cast<size_t>(e)].second,
                                                    pairs[static_cast<size_t>(e)].first);
        }
        for (const auto& [s, d] : edges) {
            parents[static_cast<size_t>(d)].push_back(s);
            if (static_cast<int>(parents[static_cast<size_t>(d)].size()) > config.d_max)
                feasible = false;
        }
        if (!feasible) continue;
        // acyclicity via Kahn over the candidate parent lists
        {
            std::vector<int> indeg(static_cast<size_t>(p), 0);
            std::vector<std::vector<int>> children(static_cast<size_t>(p));
            for (const auto& [s, d] : edges) {
                ++indeg[static_cast<size_t>(d)];
                children[static_cast<size_t>(s)].push_back(d);
            }
            std::vector<int> queue;
            for (int v = 0; v < p; ++v)
                if (indeg[static_cast<size_t>(v)] == 0) queue.push_back(v);
            int seen = 0;
            while (!queue.empty()) {
                const int v = queue.back();
                queue.pop_back();
                ++seen;
                for (int c : children[static_cast<size_t>(v)])
                    if (--indeg[static_cast<size_t>(c)] == 0) queue.push_back(c);
            }
            if (seen != p) continue;
        }
        ++result.candidates_valid;
        double score = 0.0;
        for (int j = 0; j < p; ++j)
            score += ctx.node_total(j, detail::sorted_copy(parents[static_cast<size_t>(j)]));
        std::sort(edges.begin(), edges.end());
        if (!have_best || score < best_score ||
            (score == best_score && edges < best_edges)) {
            have_best = true;
            best_score = score;
            best_edges = edges;
        }
    }

    Dag dag(p);
    for (const auto& [s, d] : best_edges) dag.add_edge(s, d);
    result.dag = dag;
    result.score = best_score;
    return result;
}

}  // namespace tailcausal
