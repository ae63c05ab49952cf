#include "twinrecover/dsep.hpp"

#include <deque>
#include <functional>

namespace twinrec {

namespace {

struct ResolvedQuery {
    std::vector<NodeId> x, y, z;
};

ResolvedQuery resolve(const CausalGraph& g, const DsepQuery& q) {
    ResolvedQuery r{g.ids(q.x), g.ids(q.y), g.ids(q.z)};
    if (!q.x.intersected(q.y).empty() || !q.x.intersected(q.z).empty() || !q.y.intersected(q.z).empty())
        throw QueryError("d-separation query sets must be pairwise disjoint");
    return r;
}

}  // namespace

DsepEngine::DsepEngine(CausalGraph g) : g_(std::move(g)), desc_(g_.size()) {
    const auto& topo = g_.topological_order();
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        auto& d = desc_[*it];
        d.resize(g_.size());
        d.set(*it);
        for (NodeId c : g_.children(*it)) d |= desc_[c];
    }
}

boost::dynamic_bitset<> DsepEngine::ancestor_mask(const std::vector<NodeId>& z) const {
    boost::dynamic_bitset<> zmask(g_.size());
    for (NodeId v : z) zmask.set(v);
    boost::dynamic_bitset<> anc(g_.size());
    for (NodeId v = 0; v < g_.size(); ++v)
        if (desc_[v].intersects(zmask)) anc.set(v);
    return anc;
}

bool DsepEngine::separated(const DsepQuery& q) const {
    auto r = resolve(g_, q);
    return separated(r.x, r.y, r.z);
}

bool DsepEngine::separated(const std::vector<NodeId>& x, const std::vector<NodeId>& y,
                           const std::vector<NodeId>& z) const {
    const std::size_t n = g_.size();
    boost::dynamic_bitset<> in_z(n), in_y(n);
    for (NodeId v : z) in_z.set(v);
    for (NodeId v : y) in_y.set(v);
    const auto anc = ancestor_mask(z);

    // State: (node, arrived-from-child). Traversal follows the blocking rule:
    // non-colliders pass unless conditioned, colliders pass when in anc(Z).
    std::vector<bool> seen_up(n, false), seen_down(n, false);
    std::deque<std::pair<NodeId, bool>> queue;
    for (NodeId v : x) queue.emplace_back(v, true);
    while (!queue.empty()) {
        auto [v, up] = queue.front();
        queue.pop_front();
        auto& seen = up ? seen_up : seen_down;
        if (seen[v]) continue;
        seen[v] = true;
        const bool conditioned = in_z.test(v);
        if (!conditioned && in_y.test(v)) return false;
        if (up) {
            if (conditioned) continue;
            for (NodeId p : g_.parents(v)) queue.emplace_back(p, true);
            for (NodeId c : g_.children(v)) queue.emplace_back(c, false);
        } else {
            if (!conditioned)
                for (NodeId c : g_.children(v)) queue.emplace_back(c, false);
            if (anc.test(v))
                for (NodeId p : g_.parents(v)) queue.emplace_back(p, true);
        }
    }
    return true;
}

std::optional<std::vector<NodeId>> DsepEngine::active_path(const DsepQuery& q) const {
    auto r = resolve(g_, q);
    const std::size_t n = g_.size();
    boost::dynamic_bitset<> in_z(n), in_y(n);
    for (NodeId v : r.z) in_z.set(v);
    for (NodeId v : r.y) in_y.set(v);
    const auto anc = ancestor_mask(r.z);

    // Depth-first search over simple paths, pruning as soon as an interior node blocks.
    std::vector<NodeId> path;
    std::vector<bool> on_path(n, false);
    auto interior_ok = [&](NodeId prev, NodeId mid, NodeId next) {
        const bool collider = g_.has_edge(prev, mid) && g_.has_edge(next, mid);
        return collider ? anc.test(mid) : !in_z.test(mid);
    };
    std::function<bool(NodeId)> dfs = [&](NodeId v) -> bool {
        if (in_y.test(v)) return true;
        auto try_next = [&](NodeId w) {
            if (on_path[w]) return false;
            if (path.size() >= 2 && !interior_ok(path[path.size() - 2], v, w)) return false;
            path.push_back(w);
            on_path[w] = true;
            if (dfs(w)) return true;
            on_path[w] = false;
            path.pop_back();
            return false;
        };
        for (NodeId w : g_.parents(v))
            if (try_next(w)) return true;
        for (NodeId w : g_.children(v))
            if (try_next(w)) return true;
        return false;
    };
    for (NodeId s : r.x) {
        path.assign(1, s);
        std::fill(on_path.begin(), on_path.end(), false);
        on_path[s] = true;
        if (dfs(s)) return path;
    }
    return std::nullopt;
}

bool d_separated(const CausalGraph& g, const DsepQuery& q) { return DsepEngine(g).separated(q); }

bool d_separated_oracle(const CausalGraph& g, const DsepQuery& q) {
    if (g.size() > kOracleMaxNodes)
        throw QueryError("graph too large for the path-enumeration oracle (" + std::to_string(g.size()) +
                         " nodes, limit " + std::to_string(kOracleMaxNodes) + ")");
    auto r = resolve(g, q);
    const std::size_t n = g.size();

    // Descendants by plain DFS, independent of the engine's cache.
    std::vector<std::vector<bool>> desc(n, std::vector<bool>(n, false));
    for (NodeId s = 0; s < n; ++s) {
        std::vector<NodeId> stack{s};
        desc[s][s] = true;
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            for (NodeId c : g.children(u))
                if (!desc[s][c]) {
                    desc[s][c] = true;
                    stack.push_back(c);
                }
        }
    }
    std::vector<bool> in_z(n, false);
    for (NodeId v : r.z) in_z[v] = true;

    auto path_active = [&](const std::vector<NodeId>& p) {
        for (std::size_t i = 1; i + 1 < p.size(); ++i) {
            const NodeId a = p[i - 1], v = p[i], b = p[i + 1];
            const bool collider = g.has_edge(a, v) && g.has_edge(b, v);
            if (collider) {
                bool opened = false;
                for (NodeId d = 0; d < n && !opened; ++d) opened = desc[v][d] && in_z[d];
                if (!opened) return false;
            } else if (in_z[v]) {
                return false;
            }
        }
        return true;
    };

    std::vector<NodeId> path;
    std::vector<bool> on_path(n, false);
    bool connected = false;
    std::function<void(NodeId, NodeId)> enumerate = [&](NodeId v, NodeId goal) {
        if (connected) return;
        if (v == goal) {
            connected = path_active(path);
            return;
        }
        std::vector<NodeId> nbrs = g.parents(v);
        nbrs.insert(nbrs.end(), g.children(v).begin(), g.children(v).end());
        for (NodeId w : nbrs) {
            if (on_path[w]) continue;
            on_path[w] = true;
            path.push_back(w);
            enumerate(w, goal);
            path.pop_back();
            on_path[w] = false;
        }
    };
    for (NodeId s : r.x) {
        for (NodeId t : r.y) {
            path.assign(1, s);
            std::fill(on_path.begin(), on_path.end(), false);
            on_path[s] = true;
            enumerate(s, t);
            if (connected) return false;
        }
    }
    return true;
}

std::string format_path(const CausalGraph& g, const std::vector<NodeId>& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += g.has_edge(path[i - 1], path[i]) ? " -> " : " <- ";
        out += g.name(path[i]);
    }
    return out;
}

}  // namespace twinrec
