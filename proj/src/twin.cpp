#include "twinrecover/twin.hpp"

#include <sstream>

namespace twinrec {

std::string counterfactual_name(std::string_view factual) { return std::string(factual) + "*"; }

TwinNetwork build_twin(const CausalGraph& g, std::string_view x, std::string_view y) {
    const NodeId xi = g.id(x);
    const NodeId yi = g.id(y);
    if (g.kind(xi) != NodeKind::Endogenous) throw GraphError("treatment '" + std::string(x) + "' is not endogenous");
    if (g.kind(yi) != NodeKind::Endogenous) throw GraphError("outcome '" + std::string(y) + "' is not endogenous");
    if (xi == yi) throw GraphError("treatment and outcome must differ");
    if (!g.selection()) throw GraphError("graph has no selection node");

    std::map<std::string, std::string> factual_of;
    CausalGraph::Builder b;
    b.synthesize_exogenous(false).counterfactual_copies(true);

    for (NodeId v = 0; v < g.size(); ++v) b.node(g.name(v), g.kind(v));
    for (NodeId v = 0; v < g.size(); ++v) {
        if (g.kind(v) == NodeKind::Exogenous) continue;
        auto copy = counterfactual_name(g.name(v));
        b.node(copy, g.kind(v));
        factual_of.emplace(copy, g.name(v));
    }
    for (auto [u, v] : g.edges()) {
        b.edge(g.name(u), g.name(v));
        if (v == xi) continue;  // do(X*) removes every edge into the copy
        const std::string parent = g.kind(u) == NodeKind::Exogenous ? g.name(u) : counterfactual_name(g.name(u));
        b.edge(parent, counterfactual_name(g.name(v)));
    }

    return TwinNetwork{b.build(), std::move(factual_of), std::string(x), counterfactual_name(x),
                       counterfactual_name(y), g.target()};
}

TwinNetwork build_twin(const CausalGraph& g) {
    if (!g.target()) throw GraphError("graph declares no target");
    return build_twin(g, g.target()->treatment, g.target()->outcome);
}

CausalGraph TwinNetwork::factual_half() const {
    CausalGraph::Builder b;
    b.synthesize_exogenous(false);
    for (NodeId v = 0; v < graph.size(); ++v)
        if (!is_counterfactual_name(graph.name(v))) b.node(graph.name(v), graph.kind(v));
    for (auto [u, v] : graph.edges())
        if (!is_counterfactual_name(graph.name(u)) && !is_counterfactual_name(graph.name(v)))
            b.edge(graph.name(u), graph.name(v));
    if (factual_target) b.target(factual_target->treatment, factual_target->outcome);
    return b.build();
}

std::string render_twin(const TwinNetwork& twin) {
    std::ostringstream out;
    out << "# twin network: intervention " << twin.intervention << ", outcome " << twin.outcome << '\n';
    out << render(twin.graph);
    return out.str();
}

}  // namespace twinrec
