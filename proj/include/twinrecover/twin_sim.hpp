#pragma once

#include "twinrecover/graph.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace twinrec {

/// Binary structural model over a causal graph: every exogenous node is a
/// Uniform(0,1) variable and every other node is 1{(sum of its exogenous
/// parents mod 1) < threshold(values of its other parents)}.
struct BinaryScm {
    CausalGraph graph;
    /// Per node, one threshold per configuration of its non-exogenous parents
    /// (bit i of the index is the i-th such parent). Empty for exogenous nodes.
    std::vector<std::vector<double>> thresholds;
};

/// Thresholds drawn uniformly from [0.1, 0.9].
BinaryScm random_binary_scm(const CausalGraph& g, std::uint64_t seed);

/// Factual values of every node and their values in the world where `x` is
/// forced to `x_value`; both worlds share the exogenous draws. Rows are units,
/// columns follow node ids; exogenous columns hold 0.
struct TwinDraws {
    std::vector<std::vector<std::uint8_t>> factual;
    std::vector<std::vector<std::uint8_t>> counterfactual;
};

TwinDraws simulate_twin(const BinaryScm& scm, std::string_view x, int x_value, std::size_t n, std::uint64_t seed);

}  // namespace twinrec
