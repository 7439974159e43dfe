#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <sstream>
#include <utility>
#include <vector>

#include <json.hpp>

namespace tailcausal {

class Dag;
bool would_create_cycle(const Dag& dag, int source, int target);

/// Directed acyclic graph over p nodes, stored as per-node parent lists.
/// Mutators validate acyclicity, so an instance can never hold a cycle,
/// a self-loop, or a duplicate parent.
class Dag {
public:
    explicit Dag(int p) : p_(p), edge_count_(0), parents_(static_cast<size_t>(p)) {
        if (p < 0) throw std::invalid_argument("Dag: negative node count");
    }

    int node_count() const { return p_; }
    int edge_count() const { return edge_count_; }

    const std::vector<int>& parents(int j) const {
        check_node(j);
        return parents_[static_cast<size_t>(j)];
    }

    int in_degree(int j) const { return static_cast<int>(parents(j).size()); }

    bool has_edge(int src, int dst) const {
        check_node(src);
        check_node(dst);
        const auto& pa = parents_[static_cast<size_t>(dst)];
        return std::find(pa.begin(), pa.end(), src) != pa.end();
    }

    void add_edge(int src, int dst) {
        check_node(src);
        check_node(dst);
        if (src == dst) throw std::invalid_argument("Dag: self-loop");
        if (has_edge(src, dst)) throw std::invalid_argument("Dag: duplicate edge");
        if (would_create_cycle(*this, src, dst))
            throw std::invalid_argument("Dag: edge would create a cycle");
        parents_[static_cast<size_t>(dst)].push_back(src);
        ++edge_count_;
    }

    void remove_edge(int src, int dst) {
        check_node(src);
        check_node(dst);
        auto& pa = parents_[static_cast<size_t>(dst)];
        auto it = std::find(pa.begin(), pa.end(), src);
        if (it == pa.end()) throw std::invalid_argument("Dag: edge not present");
        pa.erase(it);
        --edge_count_;
    }

    /// Replaces src->dst by dst->src. Restores the original edge and throws
    /// if the reversal would create a cycle.
    void reverse_edge(int src, int dst) {
        remove_edge(src, dst);
        if (would_create_cycle(*this, dst, src)) {
            parents_[static_cast<size_t>(dst)].push_back(src);
            ++edge_count_;
            throw std::invalid_argument("Dag: reversal would create a cycle");
        }
        parents_[static_cast<size_t>(src)].push_back(dst);
        ++edge_count_;
    }

    /// All edges as (src, dst), sorted.
    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(static_cast<size_t>(edge_count_));
        for (int j = 0; j < p_; ++j)
            for (int i : parents_[static_cast<size_t>(j)]) out.emplace_back(i, j);
        std::sort(out.begin(), out.end());
        return out;
    }

    bool operator==(const Dag& other) const {
        return p_ == other.p_ && edges() == other.edges();
    }

private:
    void check_node(int v) const {
        if (v < 0 || v >= p_) throw std::invalid_argument("Dag: node id out of range");
    }

    int p_;
    int edge_count_;
    std::vector<std::vector<int>> parents_;
};

/// True iff adding source->target would close a directed cycle, i.e. target
/// already reaches source. Walks ancestor lists from source by DFS; the dag
/// is not mutated.
inline bool would_create_cycle(const Dag& dag, int source, int target) {
    if (source < 0 || source >= dag.node_count() || target < 0 || target >= dag.node_count())
        throw std::invalid_argument("would_create_cycle: node id out of range");
    if (source == target) throw std::invalid_argument("would_create_cycle: self-loop query");
    // target ~> source exists iff target is an ancestor of source.
    std::vector<char> seen(static_cast<size_t>(dag.node_count()), 0);
    std::vector<int> stack{source};
    seen[static_cast<size_t>(source)] = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u : dag.parents(v)) {
            if (u == target) return true;
            if (!seen[static_cast<size_t>(u)]) {
                seen[static_cast<size_t>(u)] = 1;
                stack.push_back(u);
            }
        }
    }
    return false;
}

/// Kahn's algorithm, smallest-id-first for a deterministic order. Every
/// parent precedes each of its children. Throws if the structure is corrupt
/// (cannot happen through the public Dag mutators).
inline std::vector<int> topological_order(const Dag& dag) {
    const int p = dag.node_count();
    std::vector<int> remaining(static_cast<size_t>(p));
    std::set<int> ready;
    for (int j = 0; j < p; ++j) {
        remaining[static_cast<size_t>(j)] = dag.in_degree(j);
        if (remaining[static_cast<size_t>(j)] == 0) ready.insert(j);
    }
    // child lists, derived once
    std::vector<std::vector<int>> children(static_cast<size_t>(p));
    for (int j = 0; j < p; ++j)
        for (int i : dag.parents(j)) children[static_cast<size_t>(i)].push_back(j);

    std::vector<int> order;
    order.reserve(static_cast<size_t>(p));
    while (!ready.empty()) {
        const int v = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(v);
        for (int c : children[static_cast<size_t>(v)])
            if (--remaining[static_cast<size_t>(c)] == 0) ready.insert(c);
    }
    if (static_cast<int>(order.size()) != p)
        throw std::logic_error("topological_order: cycle detected");
    return order;
}

/// Undirected candidate edge set over p nodes. Pairs are stored normalized
/// with i < j, so the structure is symmetric by construction.
class Skeleton {
public:
    explicit Skeleton(int p) : p_(p) {
        if (p < 0) throw std::invalid_argument("Skeleton: negative node count");
    }

    int node_count() const { return p_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    static std::pair<int, int> normalize(int i, int j) {
        return i < j ? std::make_pair(i, j) : std::make_pair(j, i);
    }

    void add(int i, int j) {
        check_pair(i, j);
        edges_.insert(normalize(i, j));
    }

    void remove(int i, int j) {
        check_pair(i, j);
        edges_.erase(normalize(i, j));
    }

    bool has(int i, int j) const {
        check_pair(i, j);
        return edges_.count(normalize(i, j)) > 0;
    }

    const std::set<std::pair<int, int>>& edges() const { return edges_; }

    std::vector<int> neighbors(int j) const {
        if (j < 0 || j >= p_) throw std::invalid_argument("Skeleton: node id out of range");
        std::vector<int> nb;
        for (const auto& [a, b] : edges_) {
            if (a == j) nb.push_back(b);
            else if (b == j) nb.push_back(a);
        }
        std::sort(nb.begin(), nb.end());
        return nb;
    }

    bool operator==(const Skeleton& other) const {
        return p_ == other.p_ && edges_ == other.edges_;
    }

private:
    void check_pair(int i, int j) const {
        if (i < 0 || i >= p_ || j < 0 || j >= p_)
            throw std::invalid_argument("Skeleton: node id out of range");
        if (i == j) throw std::invalid_argument("Skeleton: self-pair");
    }

    int p_;
    std::set<std::pair<int, int>> edges_;
};

/// Unordered projection of the dag's edge set.
inline Skeleton skeleton_of(const Dag& dag) {
    Skeleton s(dag.node_count());
    for (const auto& [src, dst] : dag.edges()) s.add(src, dst);
    return s;
}

// --- serialization ---------------------------------------------------------

inline nlohmann::json to_json(const Dag& dag) {
    nlohmann::json j;
    j["p"] = dag.node_count();
    j["edges"] = nlohmann::json::array();
    for (const auto& [s, d] : dag.edges()) j["edges"].push_back({s, d});
    return j;
}

inline Dag dag_from_json(const nlohmann::json& j) {
    Dag dag(j.at("p").get<int>());
    for (const auto& e : j.at("edges"))
        dag.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
    return dag;
}

inline nlohmann::json to_json(const Skeleton& skel) {
    nlohmann::json j;
    j["p"] = skel.node_count();
    j["edges"] = nlohmann::json::array();
    for (const auto& [a, b] : skel.edges()) j["edges"].push_back({a, b});
    return j;
}

inline Skeleton skeleton_from_json(const nlohmann::json& j) {
    Skeleton s(j.at("p").get<int>());
    for (const auto& e : j.at("edges"))
        s.add(e.at(0).get<int>(), e.at(1).get<int>());
    return s;
}

inline std::string to_dot(const Dag& dag, const std::vector<std::string>& labels = {}) {
    auto name = [&](int v) -> std::string {
        if (v < static_cast<int>(labels.size())) return "\"" + labels[static_cast<size_t>(v)] + "\"";
        return std::to_string(v);
    };
    std::ostringstream os;
    os << "digraph G {\n";
    for (const auto& [s, d] : dag.edges()) os << "  " << name(s) << " -> " << name(d) << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace tailcausal
