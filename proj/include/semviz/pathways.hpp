#pragma once

// Signed regulation graph and bounded upstream pathway search.
//
// Pathway length counts nodes. A search toward a target is capped at
// kMaxPathwayLength nodes and reduced further when the number of walks ending
// at the target (an upper bound on the number of simple paths) exceeds a budget.

#include "semviz/index.hpp"
#include "semviz/taxonomy.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace semviz {

inline constexpr int kMaxPathwayLength = 5;
inline constexpr int kMinPathwayLength = 2;
inline constexpr uint64_t kDefaultWalkBudget = 10000;

struct RegulationEdge {
    uint32_t from = 0;
    uint32_t to = 0;
    std::string relation;
    Polarity polarity = Polarity::Affect;
    std::vector<uint32_t> record_ords; // ascending
    std::vector<uint32_t> doc_ords;    // evidence of those records, ascending
    std::vector<int32_t> pmid_ords;    // distinct pmids among doc_ords

    friend bool operator==(const RegulationEdge&, const RegulationEdge&) = default;
};

// One edge per (subject, object, relation type); parallel edges between a pair
// carry different relation types.
class RegulationGraph {
public:
    RegulationGraph() = default;

    RegulationGraph(std::vector<std::string> nodes, std::vector<RegulationEdge> edges)
        : nodes_(std::move(nodes)), edges_(std::move(edges)) {
        for (uint32_t i = 0; i < nodes_.size(); ++i) node_ids_.emplace(nodes_[i], i);
        in_.assign(nodes_.size(), {});
        out_.assign(nodes_.size(), {});
        for (uint32_t e = 0; e < edges_.size(); ++e) {
            in_[edges_[e].to].push_back(e);
            out_[edges_[e].from].push_back(e);
        }
        auto by_neighbor = [&](bool incoming) {
            return [&, incoming](uint32_t a, uint32_t b) {
                const auto& ea = edges_[a];
                const auto& eb = edges_[b];
                const auto& na = nodes_[incoming ? ea.from : ea.to];
                const auto& nb = nodes_[incoming ? eb.from : eb.to];
                return std::tie(na, ea.relation) < std::tie(nb, eb.relation);
            };
        };
        for (auto& l : in_) std::sort(l.begin(), l.end(), by_neighbor(true));
        for (auto& l : out_) std::sort(l.begin(), l.end(), by_neighbor(false));
    }

    size_t node_count() const { return nodes_.size(); }
    size_t edge_count() const { return edges_.size(); }
    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::vector<RegulationEdge>& edges() const { return edges_; }
    const std::string& node(uint32_t id) const { return nodes_[id]; }
    const RegulationEdge& edge(uint32_t id) const { return edges_[id]; }

    std::optional<uint32_t> node_id(std::string_view key) const {
        auto it = node_ids_.find(std::string(key));
        if (it == node_ids_.end()) return std::nullopt;
        return it->second;
    }

    // Incoming / outgoing edge ids, sorted by (neighbor, relation).
    const std::vector<uint32_t>& in_edges(uint32_t node) const { return in_[node]; }
    const std::vector<uint32_t>& out_edges(uint32_t node) const { return out_[node]; }

private:
    std::vector<std::string> nodes_;
    std::unordered_map<std::string, uint32_t> node_ids_;
    std::vector<RegulationEdge> edges_;
    std::vector<std::vector<uint32_t>> in_;
    std::vector<std::vector<uint32_t>> out_;
};

// Graph over the records whose relation type is in `relation_filter`.
// Throws ConfigError when the filter is empty.
inline RegulationGraph build_graph(const Index& index, const std::set<std::string>& relation_filter = {"Activation"}) {
    if (relation_filter.empty()) throw ConfigError("pathway relation filter is empty", "relations");
    std::set<std::string> wanted;
    for (const auto& r : relation_filter) wanted.insert(text::key(r));

    const auto& records = index.records();
    std::map<std::tuple<std::string, std::string, std::string>, std::vector<uint32_t>> grouped;
    std::set<std::string> nodes;
    for (uint32_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (!wanted.contains(text::key(r.relation))) continue;
        grouped[{r.subject, r.object, r.relation}].push_back(i);
        nodes.insert(r.subject);
        nodes.insert(r.object);
    }
    std::vector<std::string> node_list(nodes.begin(), nodes.end());
    std::unordered_map<std::string, uint32_t> ids;
    for (uint32_t i = 0; i < node_list.size(); ++i) ids.emplace(node_list[i], i);

    std::vector<RegulationEdge> edges;
    edges.reserve(grouped.size());
    for (auto& [key, ords] : grouped) {
        RegulationEdge e;
        e.from = ids.at(std::get<0>(key));
        e.to = ids.at(std::get<1>(key));
        e.relation = std::get<2>(key);
        e.polarity = index.taxonomy().lookup(e.relation).polarity;
        e.record_ords = std::move(ords);
        for (auto r : e.record_ords) {
            auto docs = index.docs_of_record(r);
            e.doc_ords.insert(e.doc_ords.end(), docs.begin(), docs.end());
        }
        std::sort(e.doc_ords.begin(), e.doc_ords.end());
        e.doc_ords.erase(std::unique(e.doc_ords.begin(), e.doc_ords.end()), e.doc_ords.end());
        for (auto d : e.doc_ords) {
            if (index.doc_pmid(d) >= 0) e.pmid_ords.push_back(index.doc_pmid(d));
        }
        std::sort(e.pmid_ords.begin(), e.pmid_ords.end());
        e.pmid_ords.erase(std::unique(e.pmid_ords.begin(), e.pmid_ords.end()), e.pmid_ords.end());
        edges.push_back(std::move(e));
    }
    return RegulationGraph(std::move(node_list), std::move(edges));
}

namespace detail {

inline uint64_t saturating_add(uint64_t a, uint64_t b) {
    return a > std::numeric_limits<uint64_t>::max() - b ? std::numeric_limits<uint64_t>::max() : a + b;
}

// walks[k] = number of walks with k+1 nodes ending at target, k = 1..max_nodes-1.
inline std::vector<uint64_t> walk_counts(const RegulationGraph& graph, uint32_t target, int max_nodes) {
    std::vector<uint64_t> per_length(static_cast<size_t>(std::max(max_nodes, 1)), 0);
    std::vector<uint64_t> current(graph.node_count(), 0);
    std::vector<uint64_t> next(graph.node_count(), 0);
    current[target] = 1;
    for (int nodes = 2; nodes <= max_nodes; ++nodes) {
        std::fill(next.begin(), next.end(), 0);
        uint64_t total = 0;
        for (const auto& e : graph.edges()) {
            if (current[e.to] == 0) continue;
            next[e.from] = saturating_add(next[e.from], current[e.to]);
            total = saturating_add(total, current[e.to]);
        }
        per_length[static_cast<size_t>(nodes - 1)] = total;
        std::swap(current, next);
        if (total == 0) break;
    }
    return per_length;
}

} // namespace detail

// Number of directed walks (node repetition allowed) with 2..depth nodes ending
// at `target`. Saturates at UINT64_MAX; zero for unknown targets.
inline uint64_t walk_count_estimate(const RegulationGraph& graph, std::string_view target, int depth) {
    if (depth < kMinPathwayLength) throw QueryError("depth must be at least 2", "depth");
    const auto t = graph.node_id(target);
    if (!t) return 0;
    uint64_t sum = 0;
    for (auto c : detail::walk_counts(graph, *t, depth)) sum = detail::saturating_add(sum, c);
    return sum;
}

// Largest d in [2, min(max_depth, 5)] whose walk estimate fits the budget; 2 when none does.
inline int effective_depth(const RegulationGraph& graph, std::string_view target, int max_depth = kMaxPathwayLength,
                           uint64_t budget = kDefaultWalkBudget) {
    if (max_depth < kMinPathwayLength) throw QueryError("max_depth must be at least 2", "max_depth");
    const int cap = std::min(max_depth, kMaxPathwayLength);
    const auto t = graph.node_id(target);
    if (!t) return cap;
    const auto counts = detail::walk_counts(graph, *t, cap);
    uint64_t cumulative = 0;
    int best = kMinPathwayLength;
    for (int d = kMinPathwayLength; d <= cap; ++d) {
        cumulative = detail::saturating_add(cumulative, counts[static_cast<size_t>(d - 1)]);
        if (cumulative > budget) break;
        best = d;
    }
    return best;
}

struct Pathway {
    std::vector<uint32_t> nodes; // start ... target
    std::vector<uint32_t> edges; // edges[i] connects nodes[i] -> nodes[i+1]
    Polarity net_polarity = Polarity::Increase;

    size_t length() const { return nodes.size(); }

    friend bool operator==(const Pathway&, const Pathway&) = default;
};

// Total order: length, node names, relation names along the path.
inline bool pathway_less(const RegulationGraph& g, const Pathway& a, const Pathway& b) {
    if (a.nodes.size() != b.nodes.size()) return a.nodes.size() < b.nodes.size();
    for (size_t i = 0; i < a.nodes.size(); ++i) {
        if (a.nodes[i] != b.nodes[i]) return g.node(a.nodes[i]) < g.node(b.nodes[i]);
    }
    for (size_t i = 0; i < a.edges.size(); ++i) {
        const auto& ra = g.edge(a.edges[i]).relation;
        const auto& rb = g.edge(b.edges[i]).relation;
        if (ra != rb) return ra < rb;
    }
    return false;
}

// All simple paths with 2..depth nodes ending at `target`.
inline std::vector<Pathway> enumerate_pathways(const RegulationGraph& graph, std::string_view target, int depth) {
    if (depth < kMinPathwayLength) throw QueryError("depth must be at least 2", "depth");
    const auto t = graph.node_id(target);
    if (!t) return {};

    std::vector<Pathway> out;
    std::vector<char> on_path(graph.node_count(), 0);
    // Built target-first, reversed on emit.
    std::vector<uint32_t> nodes{*t};
    std::vector<uint32_t> edges;
    on_path[*t] = 1;

    auto emit = [&] {
        Pathway p;
        p.nodes.assign(nodes.rbegin(), nodes.rend());
        p.edges.assign(edges.rbegin(), edges.rend());
        Polarity net = Polarity::Increase;
        for (auto e : p.edges) net = compose_polarity(net, graph.edge(e).polarity);
        p.net_polarity = net;
        out.push_back(std::move(p));
    };
    auto dfs = [&](auto&& self, uint32_t node) -> void {
        if (static_cast<int>(nodes.size()) >= depth) return;
        for (auto e : graph.in_edges(node)) {
            const auto from = graph.edge(e).from;
            if (on_path[from]) continue;
            on_path[from] = 1;
            nodes.push_back(from);
            edges.push_back(e);
            emit();
            self(self, from);
            nodes.pop_back();
            edges.pop_back();
            on_path[from] = 0;
        }
    };
    dfs(dfs, *t);
    std::sort(out.begin(), out.end(), [&](const Pathway& a, const Pathway& b) { return pathway_less(graph, a, b); });
    return out;
}

enum class RankBy : uint8_t { Evidence, Articles };

struct RankedEntity {
    std::string entity;
    size_t evidence_count = 0;
    size_t article_count = 0;

    friend bool operator==(const RankedEntity&, const RankedEntity&) = default;
};

namespace detail {

inline std::vector<RankedEntity> rank(std::map<std::string, std::pair<std::set<uint32_t>, std::set<int32_t>>>& acc,
                                      size_t k, RankBy by) {
    std::vector<RankedEntity> out;
    out.reserve(acc.size());
    for (auto& [entity, ev] : acc) out.push_back({entity, ev.first.size(), ev.second.size()});
    auto score = [by](const RankedEntity& r) { return by == RankBy::Evidence ? r.evidence_count : r.article_count; };
    std::sort(out.begin(), out.end(), [&](const RankedEntity& a, const RankedEntity& b) {
        if (score(a) != score(b)) return score(a) > score(b);
        return a.entity < b.entity;
    });
    if (out.size() > k) out.resize(k);
    return out;
}

} // namespace detail

// Direct regulators of `target` ranked by supporting evidence docs (or distinct
// articles), ties by entity name, truncated to k.
inline std::vector<RankedEntity> top_members(const RegulationGraph& graph, std::string_view target, size_t k = 10,
                                             RankBy by = RankBy::Evidence) {
    if (k < 1) throw QueryError("k must be at least 1", "k");
    const auto t = graph.node_id(target);
    if (!t) return {};
    std::map<std::string, std::pair<std::set<uint32_t>, std::set<int32_t>>> acc;
    for (auto e : graph.in_edges(*t)) {
        const auto& edge = graph.edge(e);
        if (edge.from == *t) continue;
        auto& slot = acc[graph.node(edge.from)];
        slot.first.insert(edge.doc_ords.begin(), edge.doc_ords.end());
        slot.second.insert(edge.pmid_ords.begin(), edge.pmid_ords.end());
    }
    return detail::rank(acc, k, by);
}

// Entities x with x -> m -> target for some direct regulator m (x, m, target
// distinct), ranked by the evidence of their x -> m edges.
inline std::vector<RankedEntity> top_upstream(const RegulationGraph& graph, std::string_view target, size_t k = 10,
                                              RankBy by = RankBy::Evidence) {
    if (k < 1) throw QueryError("k must be at least 1", "k");
    const auto t = graph.node_id(target);
    if (!t) return {};
    std::set<uint32_t> members;
    for (auto e : graph.in_edges(*t)) {
        if (graph.edge(e).from != *t) members.insert(graph.edge(e).from);
    }
    std::map<std::string, std::pair<std::set<uint32_t>, std::set<int32_t>>> acc;
    for (auto m : members) {
        for (auto e : graph.in_edges(m)) {
            const auto& edge = graph.edge(e);
            if (edge.from == *t || edge.from == m) continue;
            auto& slot = acc[graph.node(edge.from)];
            slot.first.insert(edge.doc_ords.begin(), edge.doc_ords.end());
            slot.second.insert(edge.pmid_ords.begin(), edge.pmid_ords.end());
        }
    }
    return detail::rank(acc, k, by);
}

// Evidence doc ordinals of the pathway's first edge, ascending.
inline std::vector<uint32_t> first_edge_evidence(const RegulationGraph& graph, const Pathway& pathway) {
    if (pathway.edges.empty()) return {};
    return graph.edge(pathway.edges.front()).doc_ords;
}

} // namespace semviz
