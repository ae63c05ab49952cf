#include "twinrecover/verdict_json.hpp"

namespace twinrec {

using nlohmann::json;

json to_json(const NodeSet& s) { return json(s.names()); }

json to_json(const DsepCheck& c) {
    return {{"graph", c.on == DsepCheck::On::Twin ? "twin" : "factual"},
            {"x", to_json(c.x)},
            {"y", to_json(c.y)},
            {"z", to_json(c.z)},
            {"holds", c.holds}};
}

json to_json(const RcNode& n) {
    json j{{"rule", n.step},      {"recovered", n.recovered}, {"w", to_json(n.w)},
           {"z", to_json(n.z)},   {"note", n.note},           {"check", n.check ? to_json(*n.check) : json(nullptr)},
           {"children", json::array()}};
    if (n.step == 3) j["separator"] = to_json(n.separator);
    for (const auto& c : n.children) j["children"].push_back(to_json(c));
    return j;
}

namespace {

json steps_json(const std::vector<DerivationStep>& steps) {
    json out = json::array();
    for (const auto& s : steps)
        out.push_back({{"text", s.text}, {"check", s.check ? to_json(*s.check) : json(nullptr)}});
    return out;
}

}  // namespace

json to_json(const FormulaPlan& p) {
    return {{"adjustment_set", to_json(p.adjustment_set)},
            {"kind", p.kind == PlanKind::Natural ? "natural" : "adjusted"},
            {"formula", p.formula},
            {"derivation", steps_json(p.derivation)},
            {"rc", p.rc ? to_json(*p.rc) : json(nullptr)}};
}

json to_json(const ErrorReport& r) {
    return {{"l1", r.l1},
            {"l2", r.l2},
            {"js", r.js},
            {"wasserstein", r.wasserstein},
            {"grid", {{"min", r.grid.min}, {"max", r.grid.max}, {"points", r.grid.points}}},
            {"n", r.n},
            {"seeds", r.seeds}};
}

std::string_view verdict_kind(const RecoverabilityVerdict& v) {
    if (std::holds_alternative<Natural>(v)) return "natural";
    if (std::holds_alternative<RecoverableWith>(v)) return "recoverable";
    return "failure";
}

json verdict_json(const RecoverabilityVerdict& v, std::string_view x, std::string_view y, const DataRegime& regime,
                  const DecideOptions& opts) {
    json j{{"kind", verdict_kind(v)},
           {"treatment", std::string(x)},
           {"outcome", std::string(y)},
           {"regime", {{"measured", to_json(regime.biased_measured)}, {"external", to_json(regime.external_unbiased)}}},
           {"options", {{"max_size", opts.max_size}, {"depth_budget", opts.depth_budget}}},
           {"interpretation",
            "adjustment sets range over subsets of the measured set M (minus treatment and outcome); a set is usable "
            "when it lies in the external set W or RC recovers its distribution, with RC's T taken to be W"},
           {"plans", json::array()}};
    std::visit(
        [&](const auto& alt) {
            using T = std::decay_t<decltype(alt)>;
            if constexpr (std::is_same_v<T, Natural>) {
                j["plans"].push_back(to_json(alt.plan));
            } else if constexpr (std::is_same_v<T, RecoverableWith>) {
                for (const auto& p : alt.plans) j["plans"].push_back(to_json(p));
            } else {
                j["reason"] = alt.reason;
                j["trace"] = steps_json(alt.trace);
            }
        },
        v);
    return j;
}

}  // namespace twinrec
