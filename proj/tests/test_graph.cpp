#include "support.hpp"

#include "twinrecover/graph.hpp"

#include <doctest.h>

using namespace twinrec;

TEST_CASE("fig1 fixture from a one-line statement list") {
    const auto g = parse_graph("node X endo; node Y endo; node S sel; edge X->Y; edge X->S; edge Y->S");
    CHECK(g.nodes_of_kind(NodeKind::Endogenous) == NodeSet{"X", "Y"});
    CHECK(g.nodes_of_kind(NodeKind::Selection) == NodeSet{"S"});
    // One synthesized exogenous parent per endogenous and selection node.
    CHECK(g.nodes_of_kind(NodeKind::Exogenous) == NodeSet{"U_S", "U_X", "U_Y"});
    CHECK(g.implicit_exogenous());
    CHECK(g.size() == 6);
    CHECK(g.edge_count() == 6);
    CHECK(g.has_edge(g.id("X"), g.id("Y")));
    CHECK_FALSE(g.has_edge(g.id("Y"), g.id("X")));
    REQUIRE(g.selection());
    CHECK(g.name(*g.selection()) == "S");
}

TEST_CASE("fig3c fixture sizes") {
    const auto g = testing::fixture("fig3c");
    CHECK(g.nodes_of_kind(NodeKind::Endogenous).size() == 6);
    CHECK(g.nodes_of_kind(NodeKind::Selection).size() == 1);
    CHECK(g.nodes_of_kind(NodeKind::Exogenous).size() == 7);
    CHECK(g.size() == 14);
    CHECK(g.edge_count() == 15);  // 8 structural edges plus 7 exogenous ones
    CHECK(g.topological_order().size() == g.size());
}

TEST_CASE("explicit exogenous nodes are kept as written") {
    const auto g = parse_graph(R"(
        node U exo
        node X endo
        node Y endo
        node S sel
        edge U -> X ; edge U -> Y   # shared noise
        edge X -> Y
        edge X -> S
    )");
    // X and Y already have U; S gets a synthesized parent.
    CHECK(g.nodes_of_kind(NodeKind::Exogenous) == NodeSet{"U", "U_S"});
}

TEST_CASE("parse errors carry positions and reasons") {
    auto error_of = [](const std::string& text) -> std::string {
        try {
            parse_graph(text);
        } catch (const GraphError& e) {
            return e.what();
        }
        return "";
    };
    CHECK(error_of("") == "no nodes declared");
    CHECK(error_of("# only a comment\n") == "no nodes declared");

    try {
        parse_graph("node X endo\nnode Y endo\nedge X -> Q\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() == 11);
        CHECK(std::string(e.what()).find("unknown node 'Q'") != std::string::npos);
    }
    try {
        parse_graph("node X endo\nnode Y% endo\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 7);
    }

    CHECK(error_of("node X endo; node Y endo; edge X -> Y; edge Y -> X").find("cycle") != std::string::npos);
    CHECK(error_of("node S sel; node T sel").find("multiple selection nodes") != std::string::npos);
    CHECK(error_of("node U exo; node X endo; edge X -> U").find("exogenous node 'U' has a parent") !=
          std::string::npos);
    CHECK(error_of("node X endo; node S sel; edge S -> X").find("selection node 'S' has a child") !=
          std::string::npos);
    CHECK(error_of("node X* endo").find("reserved") != std::string::npos);
    CHECK(error_of("node X endo; node X exo").find("redeclared") != std::string::npos);
    CHECK(error_of("node X blah").find("unknown node kind") != std::string::npos);
    CHECK(error_of("node X endo; target X -> Z").find("unknown node 'Z'") != std::string::npos);
    CHECK(error_of("frobnicate X").find("unknown statement") != std::string::npos);
}

TEST_CASE("node order in the file does not change the graph") {
    const auto a = parse_graph("node X endo; node Y endo; node S sel; edge X -> Y; edge Y -> S");
    const auto b = parse_graph("edge Y -> S\nnode S sel\nedge X -> Y\nnode Y endo\nnode X endo");
    CHECK(a == b);
    CHECK(render(a) == render(b));
}

TEST_CASE("render round-trips every fixture") {
    for (const char* name : testing::kAllFixtures) {
        CAPTURE(name);
        const auto g = testing::fixture(name);
        const auto again = parse_graph(render(g));
        CHECK(again == g);
        CHECK(render(again) == render(g));
    }
}

TEST_CASE("ancestors") {
    const auto chain = parse_graph("node A endo; node B endo; node C endo; edge A -> B; edge B -> C");
    CHECK(ancestors(chain, {"C"}) == NodeSet{"A", "B", "C", "U_A", "U_B", "U_C"});
    CHECK(ancestors(chain, {}) == NodeSet{});
    CHECK(descendants(chain, {"A"}) == NodeSet{"A", "B", "C"});

    const auto fig1 = testing::fixture("fig1");
    CHECK(ancestors(fig1, {"S"}).minus(fig1.nodes_of_kind(NodeKind::Exogenous)) == NodeSet{"S", "X", "Y"});
    CHECK_THROWS_AS(ancestors(fig1, {"nope"}), GraphError);
}

TEST_CASE("ancestors are monotone") {
    for (const char* name : testing::kAllFixtures) {
        const auto g = testing::fixture(name);
        const auto& all = g.names();
        // Every prefix of the node list is a subset of the next prefix.
        NodeSet prev;
        for (const auto& n : all) {
            NodeSet next = prev;
            next.insert(n);
            CHECK(ancestors(g, prev).subset_of(ancestors(g, next)));
            prev = next;
        }
    }
}

TEST_CASE("a back-edge makes any fixture cyclic") {
    for (const char* name : testing::kAllFixtures) {
        CAPTURE(name);
        const auto g = testing::fixture(name);
        for (const auto& [p, c] : g.edges()) {
            if (g.kind(p) == NodeKind::Exogenous || g.kind(c) == NodeKind::Selection) continue;
            const std::string text = render(g) + "edge " + g.name(c) + " -> " + g.name(p) + "\n";
            try {
                parse_graph(text);
                FAIL("accepted a cycle");
            } catch (const GraphError& e) {
                CHECK(std::string(e.what()).find("cycle") != std::string::npos);
            }
        }
    }
}

TEST_CASE("topological order respects every edge") {
    for (const char* name : testing::kAllFixtures) {
        const auto g = testing::fixture(name);
        std::vector<std::size_t> pos(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) pos[g.topological_order()[i]] = i;
        for (const auto& [p, c] : g.edges()) CHECK(pos[p] < pos[c]);
    }
}

TEST_CASE("node sets") {
    NodeSet s{"b", "a", "b"};
    CHECK(s.size() == 2);
    CHECK(s.str() == "{a,b}");
    CHECK(NodeSet{"z"} < NodeSet{"a", "b"});
    CHECK(NodeSet{"a", "b"} < NodeSet{"a", "c"});
    CHECK(s.united({"c"}) == NodeSet{"a", "b", "c"});
    CHECK(s.minus({"a"}) == NodeSet{"b"});
    CHECK(s.intersected({"b", "q"}) == NodeSet{"b"});
    CHECK(NodeSet{}.str() == "{}");
}
