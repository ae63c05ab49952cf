#include "support.hpp"

#include "twinrecover/dsep.hpp"
#include "twinrecover/twin.hpp"

#include <doctest.h>

#include <queue>

using namespace twinrec;

namespace {

bool edge(const CausalGraph& g, const std::string& a, const std::string& b) { return g.has_edge(g.id(a), g.id(b)); }

// Connected components of the undirected skeleton after removing exogenous nodes.
bool halves_connected(const TwinNetwork& t) {
    const auto& g = t.graph;
    std::vector<bool> seen(g.size(), false);
    std::queue<NodeId> q;
    for (NodeId v = 0; v < g.size(); ++v)
        if (g.kind(v) != NodeKind::Exogenous && !is_counterfactual_name(g.name(v))) {
            seen[v] = true;
            q.push(v);
        }
    while (!q.empty()) {
        NodeId v = q.front();
        q.pop();
        auto visit = [&](NodeId u) {
            if (g.kind(u) == NodeKind::Exogenous || seen[u]) return;
            seen[u] = true;
            q.push(u);
        };
        for (NodeId u : g.parents(v)) visit(u);
        for (NodeId u : g.children(v)) visit(u);
    }
    for (NodeId v = 0; v < g.size(); ++v)
        if (seen[v] && is_counterfactual_name(g.name(v))) return true;
    return false;
}

}  // namespace

TEST_CASE("fig1 fixture twin") {
    const auto g = testing::fixture("fig1");
    const auto t = build_twin(g, "X", "Y");
    const auto& tg = t.graph;
    CHECK(tg.size() == 9);
    CHECK(t.intervention == "X*");
    CHECK(t.outcome == "Y*");
    CHECK(edge(tg, "X*", "Y*"));
    CHECK(edge(tg, "X*", "S*"));
    CHECK(edge(tg, "Y*", "S*"));
    CHECK(edge(tg, "U_Y", "Y"));
    CHECK(edge(tg, "U_Y", "Y*"));
    CHECK(edge(tg, "U_S", "S"));
    CHECK(edge(tg, "U_S", "S*"));
    CHECK(tg.parents(tg.id("X*")).empty());
    CHECK(t.factual_of.at("S*") == "S");
}

TEST_CASE("smallest twin") {
    const auto g = parse_graph("node X endo; node Y endo; node S sel; edge X -> Y; edge X -> S");
    const auto t = build_twin(g, "X", "Y");
    const auto& tg = t.graph;
    CHECK(tg.to_set(tg.parents(tg.id("Y*"))) == NodeSet{"U_Y", "X*"});
}

TEST_CASE("fig3c fixture twin") {
    const auto t = build_twin(testing::fixture("fig3c"), "X", "Y");
    const auto& tg = t.graph;
    std::size_t factual_or_copy = 0;
    for (NodeId v = 0; v < tg.size(); ++v) factual_or_copy += tg.kind(v) != NodeKind::Exogenous;
    CHECK(factual_or_copy == 14);
    CHECK(tg.nodes_of_kind(NodeKind::Exogenous).size() == 7);
    CHECK(tg.parents(tg.id("X*")).empty());
    CHECK(edge(tg, "W1", "X"));
    CHECK_FALSE(edge(tg, "W1*", "X*"));
    CHECK(edge(tg, "W1*", "W2*"));
}

TEST_CASE("twin invariants on every fixture") {
    for (const char* name : testing::kAllFixtures) {
        CAPTURE(name);
        const auto g = testing::fixture(name);
        const auto t = build_twin(g);
        const auto& tg = t.graph;
        const std::size_t copied =
            g.nodes_of_kind(NodeKind::Endogenous).size() + g.nodes_of_kind(NodeKind::Selection).size();
        CHECK(tg.size() == 2 * copied + g.nodes_of_kind(NodeKind::Exogenous).size());
        CHECK(tg.parents(tg.id(t.intervention)).empty());

        for (const auto& [p, c] : g.edges()) {
            const auto& pn = g.name(p);
            const auto& cn = g.name(c);
            CHECK(edge(tg, pn, cn));
            const std::string cc = counterfactual_name(cn);
            if (g.kind(p) == NodeKind::Exogenous) {
                if (cn != t.treatment) CHECK(edge(tg, pn, cc));
            } else if (cn != t.treatment) {
                CHECK(edge(tg, counterfactual_name(pn), cc));
            }
        }
        // No edge between a factual and a counterfactual node.
        for (const auto& [p, c] : tg.edges()) {
            if (tg.kind(p) == NodeKind::Exogenous) continue;
            CHECK(is_counterfactual_name(tg.name(p)) == is_counterfactual_name(tg.name(c)));
        }
        CHECK_FALSE(halves_connected(t));
        CHECK(t.factual_half() == g);
        // Rebuilding from the factual half gives the same twin.
        CHECK(render_twin(build_twin(t.factual_half())) == render_twin(t));
    }
}

TEST_CASE("fig2b fixture confounder path is active") {
    const auto t = build_twin(testing::fixture("fig2b"));
    const DsepEngine e(t.graph);
    const DsepQuery q{{"S"}, {"Y*"}, {}};
    REQUIRE_FALSE(e.separated(q));
    const auto path = e.active_path(q);
    REQUIRE(path);
    CHECK(format_path(t.graph, *path) == "S <- X <- W <- U_W -> W* -> Y*");
}

TEST_CASE("twin preconditions") {
    const auto g = testing::fixture("fig2b");
    CHECK_THROWS_AS(build_twin(g, "X", "X"), GraphError);
    CHECK_THROWS_AS(build_twin(g, "U_X", "Y"), GraphError);
    CHECK_THROWS_AS(build_twin(g, "X", "S"), GraphError);
    const auto no_sel = parse_graph("node X endo; node Y endo; edge X -> Y");
    CHECK_THROWS_AS(build_twin(no_sel, "X", "Y"), GraphError);
}

TEST_CASE("rendered twin parses back with starred names") {
    const auto t = build_twin(testing::fixture("fig3c"));
    const std::string text = render_twin(t);
    CHECK(text.find("node X* endo") != std::string::npos);
    CHECK(text.find("edge U_W1 -> W1*") != std::string::npos);
    CHECK(text.find("-> X*\n") == std::string::npos);
}
