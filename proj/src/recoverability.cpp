#include "twinrecover/recoverability.hpp"

#include "twinrecover/twin.hpp"

#include <algorithm>
#include <functional>

namespace twinrec {

namespace {

std::string dsep_text(const DsepCheck& c) {
    std::string s = c.x.str() + (c.holds ? " ⟂ " : " not ⟂ ") + c.y.str() + " | " + c.z.str();
    return s + (c.on == DsepCheck::On::Twin ? " (twin)" : " (factual)");
}

DsepCheck run_check(const DsepEngine& e, DsepCheck::On on, NodeSet x, NodeSet y, NodeSet z) {
    DsepCheck c{on, std::move(x), std::move(y), std::move(z), false};
    c.holds = e.separated({c.x, c.y, c.z});
    return c;
}

const std::string& selection_name(const CausalGraph& g) {
    if (!g.selection()) throw GraphError("graph has no selection node");
    return g.name(*g.selection());
}

void require_endogenous(const CausalGraph& g, const NodeSet& set, const char* what) {
    for (const auto& n : set)
        if (g.kind(n) != NodeKind::Endogenous)
            throw std::invalid_argument(std::string(what) + " contains non-endogenous node '" + n + "'");
}

std::vector<NodeSet> admissible_with(const DsepEngine& twin_engine, const std::string& s, const std::string& ystar,
                                     const NodeSet& candidates, std::size_t max_size, Exec exec) {
    const auto subsets = subsets_by_size(candidates, max_size);
    const auto sid = twin_engine.graph().ids(NodeSet{s});
    const auto yid = twin_engine.graph().ids(NodeSet{ystar});
    std::vector<char> ok(subsets.size(), 0);
    const long count = static_cast<long>(subsets.size());
    const int threads = exec == Exec::Parallel ? thread_budget() : 1;
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads) if (exec == Exec::Parallel)
    for (long i = 0; i < count; ++i)
        ok[i] = twin_engine.separated(sid, yid, twin_engine.graph().ids(subsets[i])) ? 1 : 0;
    std::vector<NodeSet> out;
    for (std::size_t i = 0; i < subsets.size(); ++i)
        if (ok[i]) out.push_back(subsets[i]);
    return out;
}

enum class RcStatus { Recovered, Fail, Exhausted };

struct RcRunner {
    const DsepEngine& factual;
    const DataRegime& regime;
    const std::string& s;

    RcStatus run(const NodeSet& w, const NodeSet& z, std::size_t depth, RcNode& node) const {
        node.w = w;
        node.z = z;
        if (depth == 0) {
            node.note = "depth budget exhausted";
            return RcStatus::Exhausted;
        }
        const NodeSet& T = regime.external_unbiased;
        const NodeSet& M = regime.biased_measured;
        const NodeSet wz = w.united(z);

        if (wz.subset_of(T)) {
            node.step = 1;
            node.recovered = true;
            node.note = "P(" + w.str() + " | " + z.str() + ") available from external data";
            return RcStatus::Recovered;
        }

        bool exhausted = false;
        if (wz.subset_of(M)) {
            auto c2 = run_check(factual, DsepCheck::On::Factual, NodeSet{s}, w, z);
            if (c2.holds) {
                node.step = 2;
                node.recovered = true;
                node.check = c2;
                node.note = "P(" + w.str() + " | " + z.str() + ") = P(" + w.str() + " | " + z.str() + ", S=1)";
                return RcStatus::Recovered;
            }
            for (const auto& c : subsets_by_size(M.minus(wz), M.size())) {
                auto c3 = run_check(factual, DsepCheck::On::Factual, NodeSet{s}, w, z.united(c));
                if (!c3.holds) continue;
                node.separator = c;
                node.check = c3;
                if (c.united(z).subset_of(T)) {
                    node.step = 3;
                    node.recovered = true;
                    node.note = "sum over " + c.str() + " with P(" + c.str() + " | " + z.str() + ") external";
                    return RcStatus::Recovered;
                }
                RcNode child;
                auto st = run(c, z, depth - 1, child);
                if (st == RcStatus::Recovered) {
                    node.step = 3;
                    node.recovered = true;
                    node.note = "sum over " + c.str() + " with P(" + c.str() + " | " + z.str() + ") recovered recursively";
                    node.children.push_back(std::move(child));
                    return RcStatus::Recovered;
                }
                exhausted = exhausted || st == RcStatus::Exhausted;
                break;  // only the minimal separator is tried
            }
        }

        if (w.size() >= 2) {
            for (const auto& part : subsets_by_size(w, w.size() - 1)) {
                const NodeSet rest = w.minus(part);
                RcNode a, b;
                auto sa = run(part, rest.united(z), depth - 1, a);
                if (sa != RcStatus::Recovered) {
                    exhausted = exhausted || sa == RcStatus::Exhausted;
                    continue;
                }
                auto sb = run(rest, z, depth - 1, b);
                if (sb == RcStatus::Recovered) {
                    node.step = 4;
                    node.recovered = true;
                    node.separator = {};
                    node.note = "chain rule: P(" + part.str() + " | " + rest.str() + " ∪ " + z.str() + ") P(" +
                                rest.str() + " | " + z.str() + ")";
                    node.children.push_back(std::move(a));
                    node.children.push_back(std::move(b));
                    return RcStatus::Recovered;
                }
                exhausted = exhausted || sb == RcStatus::Exhausted;
            }
        }

        node.step = 5;
        node.recovered = false;
        node.note = exhausted ? "no rule applies within the depth budget" : "FAIL: no rule applies";
        return exhausted ? RcStatus::Exhausted : RcStatus::Fail;
    }
};

void flatten_rc(const RcNode& node, std::vector<DerivationStep>& out) {
    std::string text = "RC(" + node.w.str() + ", " + node.z.str() + ") rule " + std::to_string(node.step) + ": " + node.note;
    out.push_back({std::move(text), node.check});
    for (const auto& c : node.children) flatten_rc(c, out);
}

}  // namespace

std::vector<NodeSet> subsets_by_size(const NodeSet& items, std::size_t max_size, std::size_t min_size) {
    std::vector<NodeSet> out;
    const std::size_t n = items.size();
    max_size = std::min(max_size, n);
    for (std::size_t k = std::max<std::size_t>(min_size, 0); k <= max_size; ++k) {
        if (k == 0) {
            out.emplace_back();
            continue;
        }
        // Lexicographic k-combinations of the sorted items.
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            std::vector<std::string> names;
            names.reserve(k);
            for (auto i : idx) names.push_back(items[i]);
            out.emplace_back(std::move(names));
            std::size_t i = k;
            while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return out;
}

bool check_natural(const CausalGraph& g, std::string_view x, std::string_view y) {
    const auto twin = build_twin(g, x, y);
    return DsepEngine(twin.graph).separated({NodeSet{selection_name(g)}, NodeSet{twin.outcome}, {}});
}

std::vector<NodeSet> find_admissible_sets(const CausalGraph& g, std::string_view x, std::string_view y,
                                          const NodeSet& candidates, std::size_t max_size, Exec exec) {
    require_endogenous(g, candidates, "candidate set");
    if (candidates.contains(x) || candidates.contains(y))
        throw std::invalid_argument("candidate set may not contain the treatment or outcome");
    const auto twin = build_twin(g, x, y);
    return admissible_with(DsepEngine(twin.graph), selection_name(g), twin.outcome, candidates, max_size, exec);
}

RcResult rc(const CausalGraph& g, const NodeSet& w, const NodeSet& z, const DataRegime& regime,
            std::size_t depth_budget) {
    if (depth_budget == 0) throw std::invalid_argument("RC depth budget must be positive");
    require_endogenous(g, w, "RC target set");
    require_endogenous(g, z, "RC conditioning set");
    DsepEngine factual(g);
    RcRunner runner{factual, regime, selection_name(g)};
    RcResult out;
    auto st = runner.run(w, z, depth_budget, out.tree);
    if (st == RcStatus::Exhausted)
        throw RcBudgetExhausted("RC depth budget of " + std::to_string(depth_budget) + " exhausted recovering P(" +
                                w.str() + " | " + z.str() + ")");
    out.recovered = st == RcStatus::Recovered;
    return out;
}

std::string recovery_formula(const NodeSet& adjustment, std::string_view x, std::string_view y) {
    const std::string target = "P(" + std::string(y) + "*_{" + std::string(x) + "*})";
    if (adjustment.empty()) return target + " = " + target.substr(0, target.size() - 1) + " | S=1)";
    std::string vars;
    for (const auto& n : adjustment) vars += (vars.empty() ? "" : ",") + n;
    return target + " = sum_{" + vars + "} P(" + std::string(y) + "*_{" + std::string(x) + "*} | " + vars +
           ", S=1) P(" + vars + ")";
}

RecoverabilityVerdict decide(const CausalGraph& g, std::string_view x, std::string_view y, const DataRegime& regime,
                             const DecideOptions& opts) {
    require_endogenous(g, regime.biased_measured, "biased-measured set");
    require_endogenous(g, regime.external_unbiased, "external set");

    const auto twin = build_twin(g, x, y);
    const DsepEngine twin_engine(twin.graph);
    const std::string& s = selection_name(g);

    auto natural = run_check(twin_engine, DsepCheck::On::Twin, NodeSet{s}, NodeSet{twin.outcome}, {});
    if (natural.holds) {
        FormulaPlan plan;
        plan.kind = PlanKind::Natural;
        plan.formula = recovery_formula({}, x, y);
        plan.derivation.push_back({"natural: " + dsep_text(natural), natural});
        return Natural{std::move(plan)};
    }

    std::vector<DerivationStep> trace;
    {
        std::string text = "not natural: " + dsep_text(natural);
        if (auto p = twin_engine.active_path({natural.x, natural.y, {}}))
            text += "; active path " + format_path(twin.graph, *p);
        trace.push_back({std::move(text), natural});
    }

    NodeSet candidates = regime.biased_measured.minus(NodeSet{std::string(x), std::string(y)});
    auto sets = admissible_with(twin_engine, s, twin.outcome, candidates, opts.max_size, opts.exec);
    if (sets.empty()) {
        trace.push_back({"no subset of " + candidates.str() + " with at most " + std::to_string(opts.max_size) +
                             " members d-separates " + s + " from " + twin.outcome,
                         std::nullopt});
        return Failure{"no admissible set", std::move(trace)};
    }

    DsepEngine factual(g);
    RcRunner runner{factual, regime, s};
    std::vector<FormulaPlan> plans;
    for (const auto& z : sets) {
        FormulaPlan plan;
        plan.adjustment_set = z;
        plan.kind = PlanKind::Adjusted;
        plan.formula = recovery_formula(z, x, y);
        plan.derivation = trace;
        auto adm = run_check(twin_engine, DsepCheck::On::Twin, NodeSet{s}, NodeSet{twin.outcome}, z);
        plan.derivation.push_back({"admissible: " + dsep_text(adm), adm});

        RcNode tree;
        auto st = runner.run(z, {}, opts.depth_budget, tree);
        if (st == RcStatus::Recovered) {
            flatten_rc(tree, plan.derivation);
            plan.rc = std::move(tree);
            plans.push_back(std::move(plan));
        } else {
            trace.push_back({"admissible set " + z.str() + " rejected: P(" + z.str() + ") " +
                                 (st == RcStatus::Exhausted ? "not recovered within the RC depth budget"
                                                            : "not s-recoverable (RC FAIL)"),
                             adm});
        }
    }
    if (plans.empty()) return Failure{"RC failed on all admissible sets", std::move(trace)};
    std::sort(plans.begin(), plans.end(),
              [](const FormulaPlan& a, const FormulaPlan& b) { return a.adjustment_set < b.adjustment_set; });
    return RecoverableWith{std::move(plans)};
}

bool replay(const CausalGraph& g, std::string_view x, std::string_view y, const FormulaPlan& plan) {
    const auto twin = build_twin(g, x, y);
    const DsepEngine twin_engine(twin.graph);
    const DsepEngine factual(g);
    auto check_all = [&](const DsepCheck& c) {
        const auto& e = c.on == DsepCheck::On::Twin ? twin_engine : factual;
        return e.separated({c.x, c.y, c.z}) == c.holds;
    };
    for (const auto& step : plan.derivation)
        if (step.check && !check_all(*step.check)) return false;
    std::function<bool(const RcNode&)> walk = [&](const RcNode& n) {
        if (n.check && !check_all(*n.check)) return false;
        return std::all_of(n.children.begin(), n.children.end(), walk);
    };
    return !plan.rc || walk(*plan.rc);
}

}  // namespace twinrec
