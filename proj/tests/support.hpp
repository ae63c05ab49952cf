#pragma once

#include "twinrecover/graph.hpp"
#include "twinrecover/philox.hpp"

#include <string>

namespace testing {

inline std::string source_path(const std::string& rel) { return std::string(TWINRECOVER_SOURCE_DIR) + "/" + rel; }

inline twinrec::CausalGraph fixture(const std::string& name) {
    return twinrec::load_graph(source_path("fixtures/" + name + ".graph"));
}

inline const char* kAllFixtures[] = {"fig1", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b",
                                     "fig3c", "fig9", "continuous_basic", "continuous_advanced", "pneumonia"};

/// Random DAG over endogenous nodes N0..N{n-1}, edges only from lower to higher
/// index. Exogenous parents are not synthesized, so every node takes part in queries.
inline twinrec::CausalGraph random_dag(twinrec::Philox4x32& rng, std::size_t n, double edge_prob) {
    twinrec::CausalGraph::Builder b;
    b.synthesize_exogenous(false).counterfactual_copies(true);
    for (std::size_t i = 0; i < n; ++i) b.node("N" + std::to_string(i), twinrec::NodeKind::Endogenous);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (rng.uniform() < edge_prob) b.edge("N" + std::to_string(i), "N" + std::to_string(j));
    return b.build();
}

}  // namespace testing
