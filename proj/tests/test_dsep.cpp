#include "support.hpp"

#include "twinrecover/dsep.hpp"
#include "twinrecover/twin.hpp"

#include <doctest.h>

using namespace twinrec;

namespace {

CausalGraph without_edge(const CausalGraph& g, std::size_t skip) {
    CausalGraph::Builder b;
    b.synthesize_exogenous(false).counterfactual_copies(true);
    for (NodeId v = 0; v < g.size(); ++v) b.node(g.name(v), g.kind(v));
    const auto edges = g.edges();
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (i != skip) b.edge(g.name(edges[i].first), g.name(edges[i].second));
    return b.build();
}

}  // namespace

TEST_CASE("chain and collider") {
    const auto chain = parse_graph("node A endo; node B endo; node C endo; edge A -> B; edge B -> C");
    CHECK(d_separated(chain, {{"A"}, {"C"}, {"B"}}));
    CHECK_FALSE(d_separated(chain, {{"A"}, {"C"}, {}}));

    const auto collider = parse_graph("node A endo; node B endo; node C endo; node D endo; edge A -> B; "
                                      "edge C -> B; edge B -> D");
    CHECK(d_separated(collider, {{"A"}, {"C"}, {}}));
    CHECK_FALSE(d_separated(collider, {{"A"}, {"C"}, {"B"}}));
    // Conditioning on a descendant of the collider opens it too.
    CHECK_FALSE(d_separated(collider, {{"A"}, {"C"}, {"D"}}));
    CHECK(d_separated_oracle(collider, {{"A"}, {"C"}, {}}));
    CHECK_FALSE(d_separated_oracle(collider, {{"A"}, {"C"}, {"D"}}));
}

TEST_CASE("twins of the fixtures") {
    const auto twin_of = [](const char* name) { return build_twin(testing::fixture(name)).graph; };
    CHECK(d_separated(twin_of("fig2a"), {{"S"}, {"Y*"}, {}}));
    CHECK_FALSE(d_separated(twin_of("fig2b"), {{"S"}, {"Y*"}, {}}));
    CHECK(d_separated(twin_of("fig3c"), {{"S"}, {"Y*"}, {"W1", "W3"}}));
    CHECK(d_separated(twin_of("fig3c"), {{"S"}, {"Y*"}, {"W1", "W4"}}));
    CHECK_FALSE(d_separated(twin_of("fig3c"), {{"S"}, {"Y*"}, {"W1"}}));
}

TEST_CASE("engine and oracle agree on fixture twins") {
    for (const char* name : testing::kAllFixtures) {
        CAPTURE(name);
        const auto g = build_twin(testing::fixture(name)).graph;
        if (g.size() > kOracleMaxNodes) continue;
        const DsepEngine e(g);
        const auto endo = g.nodes_of_kind(NodeKind::Endogenous).names();
        for (std::uint32_t mask = 0; mask < (1u << std::min<std::size_t>(endo.size(), 10)); ++mask) {
            NodeSet z;
            for (std::size_t i = 0; i < endo.size() && i < 10; ++i)
                if (mask >> i & 1u) z.insert(endo[i]);
            if (z.contains("Y*")) continue;
            const DsepQuery q{{"S"}, {"Y*"}, z};
            CHECK(e.separated(q) == d_separated_oracle(g, q));
        }
    }
}

TEST_CASE("fig9 fixture: no endogenous set blocks S from Y*") {
    // The twin has 21 nodes. S* is childless and never queried, and dropping such
    // a barren node leaves every d-separation statement unchanged, so the oracle
    // runs on the remaining 20.
    const auto full = build_twin(testing::fixture("fig9")).graph;
    CausalGraph::Builder b;
    b.synthesize_exogenous(false).counterfactual_copies(true);
    for (NodeId v = 0; v < full.size(); ++v)
        if (full.name(v) != "S*") b.node(full.name(v), full.kind(v));
    for (const auto& [p, c] : full.edges())
        if (full.name(c) != "S*") b.edge(full.name(p), full.name(c));
    const auto g = b.build();
    REQUIRE(g.size() == kOracleMaxNodes);
    const NodeSet candidates{"W1", "W2", "W3", "W4"};
    for (std::uint32_t mask = 0; mask < 16; ++mask) {
        NodeSet z;
        for (std::size_t i = 0; i < 4; ++i)
            if (mask >> i & 1u) z.insert(candidates[i]);
        CHECK_FALSE(d_separated_oracle(g, {{"S"}, {"Y*"}, z}));
        CHECK_FALSE(d_separated(full, {{"S"}, {"Y*"}, z}));
    }
}

TEST_CASE("query validation") {
    const auto g = testing::fixture("fig2b");
    CHECK_THROWS_AS(d_separated(g, {{"X"}, {"X"}, {}}), QueryError);
    CHECK_THROWS_AS(d_separated(g, {{"X"}, {"Y"}, {"X"}}), QueryError);
    CHECK_THROWS_AS(d_separated(g, {{"X"}, {"Nope"}, {}}), GraphError);
    const auto big = build_twin(testing::fixture("fig3c")).graph;
    CHECK(big.size() > kOracleMaxNodes);
    CHECK_THROWS_AS(d_separated_oracle(big, {{"S"}, {"Y*"}, {}}), QueryError);
}

TEST_CASE("random DAGs: engine equals oracle, symmetry, edge removal") {
    Philox4x32 rng(20240501, 3);
    std::size_t graphs = 0, queries = 0;
    for (; graphs < 1000; ++graphs) {
        const std::size_t n = 3 + graphs % 6;
        const auto g = testing::random_dag(rng, n, 0.2 + 0.3 * rng.uniform());
        const DsepEngine e(g);
        for (NodeId a = 0; a < n; ++a)
            for (NodeId b = a + 1; b < n; ++b) {
                std::vector<NodeId> rest;
                for (NodeId v = 0; v < n; ++v)
                    if (v != a && v != b) rest.push_back(v);
                for (std::uint32_t mask = 0; mask < (1u << rest.size()); ++mask) {
                    std::vector<NodeId> z;
                    for (std::size_t i = 0; i < rest.size(); ++i)
                        if (mask >> i & 1u) z.push_back(rest[i]);
                    const DsepQuery q{g.to_set({a}), g.to_set({b}), g.to_set(z)};
                    const bool fast = e.separated({a}, {b}, z);
                    REQUIRE(fast == d_separated_oracle(g, q));
                    REQUIRE(fast == e.separated({b}, {a}, z));
                    ++queries;
                }
            }
        if (graphs % 10 == 0 && g.edge_count() > 0) {
            for (NodeId a = 0; a < n; ++a)
                for (NodeId b = a + 1; b < n; ++b) {
                    if (!e.separated({a}, {b}, {})) continue;
                    for (std::size_t k = 0; k < g.edge_count(); ++k)
                        CHECK(d_separated(without_edge(g, k), {g.to_set({a}), g.to_set({b}), {}}));
                }
        }
    }
    CHECK(graphs == 1000);
    MESSAGE(queries << " queries compared");
}

TEST_CASE("active path is a real connecting path") {
    const auto g = build_twin(testing::fixture("fig9")).graph;
    const DsepEngine e(g);
    const auto path = e.active_path({{"S"}, {"Y*"}, {"W1"}});
    REQUIRE(path);
    CHECK(g.name(path->front()) == "S");
    CHECK(g.name(path->back()) == "Y*");
    for (std::size_t i = 0; i + 1 < path->size(); ++i) {
        const NodeId u = (*path)[i], v = (*path)[i + 1];
        CHECK((g.has_edge(u, v) || g.has_edge(v, u)));
    }
    CHECK_FALSE(e.active_path({{"S"}, {"Y*"}, {}}) == std::nullopt);
    const DsepEngine e2(build_twin(testing::fixture("fig2a")).graph);
    CHECK(e2.active_path({{"S"}, {"Y*"}, {}}) == std::nullopt);
}
