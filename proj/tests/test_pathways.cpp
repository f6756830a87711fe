#include "semviz/pathways.hpp"

#include "oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

namespace semviz {
namespace {

using testing::edge_corpus;
using testing::EdgeSpec;
using testing::ingest;
namespace oracle = testing::oracle;

std::vector<std::vector<std::string>> node_lists(const RegulationGraph& g, const std::vector<Pathway>& paths) {
    std::vector<std::vector<std::string>> out;
    for (const auto& p : paths) {
        std::vector<std::string> names;
        for (auto n : p.nodes) names.push_back(g.node(n));
        out.push_back(std::move(names));
    }
    return out;
}

TEST(Graph, RelationFilter) {
    auto c = ingest(edge_corpus({{"A", "B"}, {"B", "C"}, {"A", "C", "Inhibition"}}));
    auto g = build_graph(c.index, {"Activation"});
    EXPECT_EQ(g.node_count(), 3u);
    EXPECT_EQ(g.edge_count(), 2u);
    auto both = build_graph(c.index, {"Activation", "inhibition"});
    EXPECT_EQ(both.node_count(), 3u);
    EXPECT_EQ(both.edge_count(), 3u);
    EXPECT_THROW(build_graph(c.index, {}), ConfigError);
}

TEST(Enumerate, Chain) {
    auto c = ingest(edge_corpus({{"A", "B"}, {"B", "C"}}));
    auto g = build_graph(c.index);
    auto paths = enumerate_pathways(g, "c", 3);
    EXPECT_EQ(node_lists(g, paths), (std::vector<std::vector<std::string>>{{"b", "c"}, {"a", "b", "c"}}));
    EXPECT_EQ(paths[1].net_polarity, Polarity::Increase);
    EXPECT_TRUE(enumerate_pathways(g, "unknown", 3).empty());
    EXPECT_THROW(enumerate_pathways(g, "c", 1), QueryError);
}

TEST(Enumerate, NetPolarityComposes) {
    auto c = ingest(edge_corpus({{"A", "B", "Inhibition"}, {"B", "C", "Inhibition"}, {"D", "C", "Inhibition"}}));
    auto g = build_graph(c.index, {"Activation", "Inhibition"});
    auto paths = enumerate_pathways(g, "c", 3);
    ASSERT_EQ(paths.size(), 3u);
    EXPECT_EQ(paths[2].net_polarity, Polarity::Increase);
    EXPECT_EQ(paths[0].net_polarity, Polarity::Decrease);
}

TEST(WalkCount, Examples) {
    std::vector<EdgeSpec> star;
    for (int i = 0; i < 10; ++i) star.push_back({"L" + std::to_string(i), "T"});
    auto s = ingest(edge_corpus(star));
    EXPECT_EQ(walk_count_estimate(build_graph(s.index), "t", 2), 10u);

    auto chain = ingest(edge_corpus({{"A", "B"}, {"B", "C"}}));
    EXPECT_EQ(walk_count_estimate(build_graph(chain.index), "c", 3), 2u);

    auto cycle = ingest(edge_corpus({{"A", "B"}, {"B", "A"}, {"A", "T"}}));
    EXPECT_EQ(walk_count_estimate(build_graph(cycle.index), "t", 4), 3u);
    EXPECT_EQ(walk_count_estimate(build_graph(cycle.index), "nowhere", 4), 0u);
    EXPECT_THROW(walk_count_estimate(build_graph(cycle.index), "t", 1), QueryError);
}

TEST(EffectiveDepth, SparseGraphGetsFullDepth) {
    auto c = ingest(edge_corpus({{"A", "B"}, {"B", "C"}, {"C", "D"}, {"D", "E"}, {"E", "F"}}));
    auto g = build_graph(c.index);
    EXPECT_EQ(effective_depth(g, "f"), 5);
    EXPECT_EQ(effective_depth(g, "f", 9), 5);
    EXPECT_EQ(effective_depth(g, "f", 3), 3);
    EXPECT_THROW(effective_depth(g, "f", 1), QueryError);
}

// Layers of 50, 99, 2 and 100 nodes, each completely connected to the next:
// walks up to 3 nodes = 50 + 50*99 = 5000, up to 4 nodes = 14900.
TEST(EffectiveDepth, DenseGraphReducesDepth) {
    std::vector<std::vector<std::string>> layers(4);
    const size_t sizes[] = {50, 99, 2, 100};
    for (size_t l = 0; l < 4; ++l) {
        for (size_t i = 0; i < sizes[l]; ++i) layers[l].push_back("n" + std::to_string(l) + "_" + std::to_string(i));
    }
    std::vector<EdgeSpec> edges;
    for (const auto& n : layers[0]) edges.push_back({n, "T"});
    for (size_t l = 1; l < 4; ++l) {
        for (const auto& from : layers[l]) {
            for (const auto& to : layers[l - 1]) edges.push_back({from, to});
        }
    }
    auto c = ingest(edge_corpus(edges));
    auto g = build_graph(c.index);
    EXPECT_EQ(walk_count_estimate(g, "t", 3), 5000u);
    EXPECT_EQ(walk_count_estimate(g, "t", 4), 14900u);
    EXPECT_EQ(walk_count_estimate(g, "t", 5), 1004900u);
    EXPECT_EQ(effective_depth(g, "t", 5, 10000), 3);
    EXPECT_LT(effective_depth(g, "t"), 5);
    EXPECT_GE(walk_count_estimate(g, "t", 3), enumerate_pathways(g, "t", 3).size());
}

TEST(EffectiveDepth, FloorsAtTwo) {
    std::vector<EdgeSpec> edges;
    for (int i = 0; i < 20000; ++i) edges.push_back({"r" + std::to_string(i), "T"});
    auto c = ingest(edge_corpus(edges));
    auto g = build_graph(c.index);
    EXPECT_EQ(effective_depth(g, "t", 5, 10000), 2);
    EXPECT_EQ(enumerate_pathways(g, "t", 2).size(), 20000u);
}

TEST(Ranking, TopMembersTieRuleAndEvidence) {
    auto c = ingest(edge_corpus({{"B", "T", "Activation", 2}, {"A", "T", "Activation", 2}, {"C", "T", "Activation", 3},
                                 {"D", "T", "Activation", 1}, {"X", "A", "Activation", 1}, {"T", "A", "Activation", 1},
                                 {"Y", "B", "Activation", 4}}));
    auto g = build_graph(c.index);
    auto top = top_members(g, "t", 3);
    ASSERT_EQ(top.size(), 3u);
    EXPECT_EQ(top[0].entity, "c");
    EXPECT_EQ(top[1].entity, "a");
    EXPECT_EQ(top[2].entity, "b");
    EXPECT_EQ(top[0].evidence_count, 3u);
    auto up = top_upstream(g, "t", 10);
    ASSERT_EQ(up.size(), 2u);
    EXPECT_EQ(up[0].entity, "y");
    EXPECT_EQ(up[1].entity, "x");
    EXPECT_THROW(top_members(g, "t", 0), QueryError);
}

TEST(Ranking, FirstEdgeEvidenceInDocOrder) {
    auto c = ingest(edge_corpus({{"A", "B", "Activation", 3}, {"B", "C"}}));
    auto g = build_graph(c.index);
    auto paths = enumerate_pathways(g, "c", 3);
    ASSERT_EQ(paths.size(), 2u);
    auto ev = first_edge_evidence(g, paths[1]);
    ASSERT_EQ(ev.size(), 3u);
    EXPECT_EQ(c.index.docs()[ev[0]].id, "ca0:1:0");
    EXPECT_EQ(c.index.docs()[ev[1]].id, "ca0:1:1");
    EXPECT_EQ(c.index.docs()[ev[2]].id, "ca0:1:2");
}

std::set<oracle::PathKey> keys(const RegulationGraph& g, const std::vector<Pathway>& paths) {
    std::set<oracle::PathKey> out;
    for (const auto& p : paths) {
        oracle::PathKey k;
        for (auto n : p.nodes) k.first.push_back(g.node(n));
        for (auto e : p.edges) k.second.push_back(g.edge(e).relation);
        EXPECT_TRUE(out.insert(k).second);
    }
    return out;
}

TEST(Enumerate, MatchesForwardSearchOnRandomGraphs) {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 60; ++round) {
        const size_t n = std::uniform_int_distribution<size_t>(2, 30)(rng);
        const size_t m = std::uniform_int_distribution<size_t>(1, 3 * n)(rng);
        std::vector<EdgeSpec> edges;
        for (size_t i = 0; i < m; ++i) {
            const auto a = std::uniform_int_distribution<size_t>(0, n - 1)(rng);
            const auto b = std::uniform_int_distribution<size_t>(0, n - 1)(rng);
            edges.push_back({"v" + std::to_string(a), "v" + std::to_string(b), rng() % 3 ? "Activation" : "Inhibition"});
        }
        auto c = ingest(edge_corpus(edges));
        auto g = build_graph(c.index, {"Activation", "Inhibition"});
        auto og = oracle::graph(c, {"Activation", "Inhibition"});
        for (int t = 0; t < 3; ++t) {
            const auto target = "v" + std::to_string(std::uniform_int_distribution<size_t>(0, n - 1)(rng));
            for (int depth = 2; depth <= 4; ++depth) {
                auto paths = enumerate_pathways(g, target, depth);
                EXPECT_EQ(keys(g, paths), oracle::simple_paths(og, target, depth));
                const auto walks = walk_count_estimate(g, target, depth);
                EXPECT_EQ(walks, oracle::walks(og, target, depth));
                EXPECT_GE(walks, paths.size());
                for (size_t i = 1; i < paths.size(); ++i) EXPECT_FALSE(pathway_less(g, paths[i], paths[i - 1]));
            }
        }
    }
}

TEST(EffectiveDepth, NeverIncreasesAsEdgesAreAdded) {
    std::mt19937_64 rng(21);
    for (int round = 0; round < 20; ++round) {
        std::vector<EdgeSpec> edges;
        int previous = kMaxPathwayLength;
        for (int step = 0; step < 40; ++step) {
            edges.push_back({"v" + std::to_string(rng() % 12), "v" + std::to_string(rng() % 12)});
            auto c = ingest(edge_corpus(edges));
            auto g = build_graph(c.index);
            if (!g.node_id("v0")) continue;
            const int d = effective_depth(g, "v0", 5, 60);
            EXPECT_LE(d, previous);
            previous = d;
            for (const auto& p : enumerate_pathways(g, "v0", d)) {
                EXPECT_EQ(g.node(p.nodes.back()), "v0");
                std::set<uint32_t> distinct(p.nodes.begin(), p.nodes.end());
                EXPECT_EQ(distinct.size(), p.nodes.size());
            }
        }
    }
}

} // namespace
} // namespace semviz
