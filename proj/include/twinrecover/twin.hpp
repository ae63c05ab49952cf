#pragma once

#include "twinrecover/graph.hpp"

#include <map>
#include <string>
#include <string_view>

namespace twinrec {

/// Factual graph plus counterfactual copies of every endogenous and selection
/// node. Copies share the factual exogenous parents; edges into the copy of the
/// treatment are removed.
struct TwinNetwork {
    CausalGraph graph;
    std::map<std::string, std::string> factual_of;  // "Y*" -> "Y"
    std::string treatment;                          // factual X
    std::string intervention;                       // X*
    std::string outcome;                            // Y*
    std::optional<Target> factual_target;

    /// The factual half, which reproduces the graph the twin was built from.
    CausalGraph factual_half() const;
};

std::string counterfactual_name(std::string_view factual);

/// Throws GraphError when x or y is not endogenous, x == y, or there is no selection node.
TwinNetwork build_twin(const CausalGraph& g, std::string_view x, std::string_view y);
/// Uses the graph's declared target.
TwinNetwork build_twin(const CausalGraph& g);

/// Graph-format text with starred counterfactual names.
std::string render_twin(const TwinNetwork& twin);

}  // namespace twinrec
