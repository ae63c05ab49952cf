#include "twinrecover/twin_sim.hpp"

#include "twinrecover/philox.hpp"

#include <cmath>
#include <stdexcept>

namespace twinrec {

namespace {

std::vector<NodeId> structural_parents(const CausalGraph& g, NodeId v) {
    std::vector<NodeId> out;
    for (auto p : g.parents(v))
        if (g.kind(p) != NodeKind::Exogenous) out.push_back(p);
    return out;
}

}  // namespace

BinaryScm random_binary_scm(const CausalGraph& g, std::uint64_t seed) {
    BinaryScm scm{g, std::vector<std::vector<double>>(g.size())};
    Philox4x32 rng(seed, 7);
    for (NodeId v : g.topological_order()) {
        if (g.kind(v) == NodeKind::Exogenous) continue;
        const auto pa = structural_parents(g, v);
        if (pa.size() > 20) throw std::invalid_argument("too many parents for a tabular model");
        scm.thresholds[v].resize(std::size_t{1} << pa.size());
        for (auto& t : scm.thresholds[v]) t = 0.1 + 0.8 * rng.uniform();
    }
    return scm;
}

TwinDraws simulate_twin(const BinaryScm& scm, std::string_view x, int x_value, std::size_t n, std::uint64_t seed) {
    const CausalGraph& g = scm.graph;
    const NodeId xi = g.id(x);
    if (g.kind(xi) != NodeKind::Endogenous) throw std::invalid_argument("intervention target must be endogenous");

    std::vector<std::vector<NodeId>> pa(g.size()), exo(g.size());
    for (NodeId v = 0; v < g.size(); ++v) {
        pa[v] = structural_parents(g, v);
        for (auto p : g.parents(v))
            if (g.kind(p) == NodeKind::Exogenous) exo[v].push_back(p);
    }

    TwinDraws out;
    out.factual.assign(n, std::vector<std::uint8_t>(g.size(), 0));
    out.counterfactual.assign(n, std::vector<std::uint8_t>(g.size(), 0));
    Philox4x32 rng(seed);
    std::vector<double> u(g.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (NodeId v = 0; v < g.size(); ++v) u[v] = g.kind(v) == NodeKind::Exogenous ? rng.uniform() : 0.0;
        auto evaluate = [&](std::vector<std::uint8_t>& row, bool intervene) {
            for (NodeId v : g.topological_order()) {
                if (g.kind(v) == NodeKind::Exogenous) continue;
                if (intervene && v == xi) {
                    row[v] = static_cast<std::uint8_t>(x_value);
                    continue;
                }
                double noise = 0;
                for (auto e : exo[v]) noise += u[e];
                noise -= std::floor(noise);
                std::size_t cfg = 0;
                for (std::size_t k = 0; k < pa[v].size(); ++k) cfg |= std::size_t{row[pa[v][k]]} << k;
                row[v] = noise < scm.thresholds[v][cfg] ? 1 : 0;
            }
        };
        evaluate(out.factual[i], false);
        evaluate(out.counterfactual[i], true);
    }
    return out;
}

}  // namespace twinrec
