#pragma once

#include "twinrecover/dsep.hpp"
#include "twinrecover/graph.hpp"
#include "twinrecover/parallel.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace twinrec {

/// A d-separation fact a derivation relies on; replayable against the graph.
struct DsepCheck {
    enum class On { Twin, Factual };
    On on = On::Twin;
    NodeSet x, y, z;
    bool holds = false;
};

struct DerivationStep {
    std::string text;
    std::optional<DsepCheck> check;
};

/// Variables recorded in the biased experiment (M) and variables with known
/// population distributions (W, also used as the external set T of RC).
struct DataRegime {
    NodeSet biased_measured;
    NodeSet external_unbiased;
};

/// One node of an RC derivation tree. `step` is the rule that fired (1-4), or 5 for FAIL.
struct RcNode {
    int step = 5;
    bool recovered = false;
    NodeSet w, z;
    NodeSet separator;  // the C of rule 3
    std::optional<DsepCheck> check;
    std::vector<RcNode> children;
    std::string note;
};

class RcBudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PlanKind { Natural, Adjusted };

struct FormulaPlan {
    NodeSet adjustment_set;
    PlanKind kind = PlanKind::Adjusted;
    std::string formula;
    std::vector<DerivationStep> derivation;
    std::optional<RcNode> rc;
};

struct Natural {
    FormulaPlan plan;
};
struct RecoverableWith {
    std::vector<FormulaPlan> plans;  // by cardinality, then lexicographic
};
struct Failure {
    std::string reason;
    std::vector<DerivationStep> trace;
};
using RecoverabilityVerdict = std::variant<Natural, RecoverableWith, Failure>;

struct DecideOptions {
    std::size_t max_size = 4;
    std::size_t depth_budget = 8;
    Exec exec = Exec::Parallel;
};

/// S ⟂ Y* | ∅ in the twin network.
bool check_natural(const CausalGraph& g, std::string_view x, std::string_view y);

/// Every z ⊆ candidates with |z| <= max_size and S ⟂ Y* | z in the twin, minimal sets first.
std::vector<NodeSet> find_admissible_sets(const CausalGraph& g, std::string_view x, std::string_view y,
                                          const NodeSet& candidates, std::size_t max_size,
                                          Exec exec = Exec::Parallel);

/// Subsets of `items` with 1 <= |s| <= max_size, by cardinality then lexicographic.
std::vector<NodeSet> subsets_by_size(const NodeSet& items, std::size_t max_size, std::size_t min_size = 1);

struct RcResult {
    bool recovered = false;
    RcNode tree;
};

/// Recovers P(w | z) from P(T) and P(M | S=1). Throws RcBudgetExhausted when no
/// branch succeeds and at least one ran out of depth.
RcResult rc(const CausalGraph& g, const NodeSet& w, const NodeSet& z, const DataRegime& regime,
            std::size_t depth_budget = 8);

RecoverabilityVerdict decide(const CausalGraph& g, std::string_view x, std::string_view y,
                             const DataRegime& regime, const DecideOptions& opts = {});

/// Re-run every cited d-separation query; true when all recorded answers reproduce.
bool replay(const CausalGraph& g, std::string_view x, std::string_view y, const FormulaPlan& plan);

std::string recovery_formula(const NodeSet& adjustment, std::string_view x, std::string_view y);

inline bool is_natural(const RecoverabilityVerdict& v) { return std::holds_alternative<Natural>(v); }
inline bool is_failure(const RecoverabilityVerdict& v) { return std::holds_alternative<Failure>(v); }

}  // namespace twinrec
