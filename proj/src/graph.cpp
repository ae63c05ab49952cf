#include "twinrecover/graph.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <queue>
#include <sstream>

namespace twinrec {

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Endogenous: return "endo";
        case NodeKind::Exogenous: return "exo";
        case NodeKind::Selection: return "sel";
    }
    return "?";
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : GraphError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

bool is_counterfactual_name(std::string_view name) {
    return !name.empty() && name.back() == '*';
}

// ---------------------------------------------------------------- NodeSet

NodeSet::NodeSet(std::initializer_list<std::string> names)
    : NodeSet(std::vector<std::string>(names)) {}

NodeSet::NodeSet(std::vector<std::string> names) : names_(std::move(names)) {
    std::sort(names_.begin(), names_.end());
    names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
}

bool NodeSet::contains(std::string_view name) const {
    return std::binary_search(names_.begin(), names_.end(), name);
}

void NodeSet::insert(std::string name) {
    auto it = std::lower_bound(names_.begin(), names_.end(), name);
    if (it == names_.end() || *it != name) names_.insert(it, std::move(name));
}

bool NodeSet::subset_of(const NodeSet& other) const {
    return std::includes(other.names_.begin(), other.names_.end(), names_.begin(), names_.end());
}

NodeSet NodeSet::united(const NodeSet& other) const {
    NodeSet out;
    std::set_union(names_.begin(), names_.end(), other.names_.begin(), other.names_.end(),
                   std::back_inserter(out.names_));
    return out;
}

NodeSet NodeSet::minus(const NodeSet& other) const {
    NodeSet out;
    std::set_difference(names_.begin(), names_.end(), other.names_.begin(), other.names_.end(),
                        std::back_inserter(out.names_));
    return out;
}

NodeSet NodeSet::intersected(const NodeSet& other) const {
    NodeSet out;
    std::set_intersection(names_.begin(), names_.end(), other.names_.begin(), other.names_.end(),
                          std::back_inserter(out.names_));
    return out;
}

std::string NodeSet::str() const {
    std::string s = "{";
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (i) s += ',';
        s += names_[i];
    }
    return s + "}";
}

bool operator<(const NodeSet& a, const NodeSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.names_ < b.names_;
}

// ---------------------------------------------------------------- CausalGraph

std::optional<NodeId> CausalGraph::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

NodeId CausalGraph::id(std::string_view name) const {
    if (auto v = find(name)) return *v;
    throw GraphError("unknown node '" + std::string(name) + "'");
}

std::vector<NodeId> CausalGraph::ids(const NodeSet& set) const {
    std::vector<NodeId> out;
    out.reserve(set.size());
    for (const auto& n : set) out.push_back(id(n));
    return out;
}

NodeSet CausalGraph::to_set(const std::vector<NodeId>& ids) const {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (NodeId v : ids) out.push_back(names_.at(v));
    return NodeSet(std::move(out));
}

bool CausalGraph::has_edge(NodeId from, NodeId to) const {
    const auto& ch = children_.at(from);
    return std::find(ch.begin(), ch.end(), to) != ch.end();
}

std::vector<std::pair<NodeId, NodeId>> CausalGraph::edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count_);
    for (NodeId u = 0; u < size(); ++u)
        for (NodeId v : children_[u]) out.emplace_back(u, v);
    return out;
}

NodeSet CausalGraph::nodes_of_kind(NodeKind kind) const {
    std::vector<std::string> out;
    for (NodeId v = 0; v < size(); ++v)
        if (kinds_[v] == kind) out.push_back(names_[v]);
    return NodeSet(std::move(out));
}

bool operator==(const CausalGraph& a, const CausalGraph& b) {
    if (a.size() != b.size() || a.edge_count_ != b.edge_count_ || a.target_ != b.target_) return false;
    for (NodeId v = 0; v < a.size(); ++v) {
        auto w = b.find(a.names_[v]);
        if (!w || b.kinds_[*w] != a.kinds_[v]) return false;
    }
    for (auto [u, v] : a.edges()) {
        if (!b.has_edge(b.id(a.names_[u]), b.id(a.names_[v]))) return false;
    }
    return true;
}

// ---------------------------------------------------------------- Builder

CausalGraph::Builder& CausalGraph::Builder::node(std::string name, NodeKind kind) {
    nodes_.emplace_back(std::move(name), kind);
    return *this;
}

CausalGraph::Builder& CausalGraph::Builder::edge(std::string parent, std::string child) {
    edges_.emplace_back(std::move(parent), std::move(child));
    return *this;
}

CausalGraph::Builder& CausalGraph::Builder::target(std::string treatment, std::string outcome) {
    target_ = Target{std::move(treatment), std::move(outcome)};
    return *this;
}

CausalGraph::Builder& CausalGraph::Builder::synthesize_exogenous(bool on) {
    synthesize_ = on;
    return *this;
}

CausalGraph::Builder& CausalGraph::Builder::counterfactual_copies(bool on) {
    counterfactual_ = on;
    return *this;
}

CausalGraph CausalGraph::Builder::build() const {
    if (nodes_.empty()) throw GraphError("no nodes declared");

    CausalGraph g;
    auto add_node = [&g](const std::string& name, NodeKind kind) {
        if (auto it = g.index_.find(name); it != g.index_.end()) {
            if (g.kinds_[it->second] != kind)
                throw GraphError("node '" + name + "' redeclared with a different kind");
            return;
        }
        g.index_.emplace(name, g.names_.size());
        g.names_.push_back(name);
        g.kinds_.push_back(kind);
    };

    for (const auto& [name, kind] : nodes_) {
        if (name.empty()) throw GraphError("empty node name");
        if (!counterfactual_ && name.find('*') != std::string::npos)
            throw GraphError("node name '" + name + "' uses reserved character '*'");
        add_node(name, kind);
    }

    std::vector<std::pair<NodeId, NodeId>> edge_ids;
    for (const auto& [p, c] : edges_) {
        auto pi = g.find(p);
        auto ci = g.find(c);
        if (!pi) throw GraphError("unknown node '" + p + "' in edge " + p + " -> " + c);
        if (!ci) throw GraphError("unknown node '" + c + "' in edge " + p + " -> " + c);
        if (*pi == *ci) throw GraphError("self-loop on '" + p + "'");
        edge_ids.emplace_back(*pi, *ci);
    }

    if (synthesize_) {
        std::vector<bool> has_exo(g.size(), false);
        for (auto [p, c] : edge_ids)
            if (g.kinds_[p] == NodeKind::Exogenous) has_exo[c] = true;
        const std::size_t declared = g.size();
        for (NodeId v = 0; v < declared; ++v) {
            if (g.kinds_[v] == NodeKind::Exogenous || has_exo[v]) continue;
            const std::string u = "U_" + g.names_[v];
            if (g.find(u)) throw GraphError("cannot synthesize '" + u + "': name already in use");
            add_node(u, NodeKind::Exogenous);
            edge_ids.emplace_back(g.id(u), v);
            g.implicit_exogenous_ = true;
        }
    }

    const std::size_t n = g.size();
    g.parents_.assign(n, {});
    g.children_.assign(n, {});
    for (auto [p, c] : edge_ids) {
        auto& ch = g.children_[p];
        if (std::find(ch.begin(), ch.end(), c) != ch.end()) continue;
        ch.push_back(c);
        g.parents_[c].push_back(p);
        ++g.edge_count_;
    }
    for (auto& v : g.parents_) std::sort(v.begin(), v.end());
    for (auto& v : g.children_) std::sort(v.begin(), v.end());

    for (NodeId v = 0; v < n; ++v) {
        const auto& name = g.names_[v];
        switch (g.kinds_[v]) {
            case NodeKind::Exogenous:
                if (!g.parents_[v].empty())
                    throw GraphError("exogenous node '" + name + "' has a parent ('" +
                                     g.names_[g.parents_[v].front()] + "')");
                break;
            case NodeKind::Selection:
                if (!g.children_[v].empty())
                    throw GraphError("selection node '" + name + "' has a child ('" +
                                     g.names_[g.children_[v].front()] + "')");
                if (!is_counterfactual_name(name)) {
                    if (g.selection_) throw GraphError("multiple selection nodes declared");
                    g.selection_ = v;
                }
                break;
            case NodeKind::Endogenous:
                if (!synthesize_ && !counterfactual_) {
                    bool ok = std::any_of(g.parents_[v].begin(), g.parents_[v].end(), [&](NodeId p) {
                        return g.kinds_[p] == NodeKind::Exogenous;
                    });
                    if (!ok) throw GraphError("endogenous node '" + name + "' has no exogenous parent");
                }
                break;
        }
    }

    // Kahn's algorithm; smallest id first keeps the order deterministic.
    std::vector<std::size_t> indeg(n);
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (NodeId v = 0; v < n; ++v) {
        indeg[v] = g.parents_[v].size();
        if (indeg[v] == 0) ready.push(v);
    }
    while (!ready.empty()) {
        NodeId v = ready.top();
        ready.pop();
        g.topo_.push_back(v);
        for (NodeId c : g.children_[v])
            if (--indeg[c] == 0) ready.push(c);
    }
    if (g.topo_.size() != n) {
        std::string on_cycle;
        for (NodeId v = 0; v < n; ++v)
            if (indeg[v] > 0) on_cycle += (on_cycle.empty() ? "" : ", ") + g.names_[v];
        throw GraphError("cycle detected among {" + on_cycle + "}");
    }

    if (target_) {
        for (const auto* name : {&target_->treatment, &target_->outcome})
            if (!g.find(*name)) throw GraphError("unknown node '" + *name + "' in target");
        g.target_ = target_;
    }
    return g;
}

// ---------------------------------------------------------------- parser

namespace {

struct Token {
    enum Type { Ident, Arrow } type;
    std::string text;
    std::size_t column;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> tokenize(std::string_view stmt, std::size_t line, std::size_t col0) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < stmt.size()) {
        char c = stmt[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '-' && i + 1 < stmt.size() && stmt[i + 1] == '>') {
            out.push_back({Token::Arrow, "->", col0 + i});
            i += 2;
        } else if (ident_start(c)) {
            std::size_t j = i;
            while (j < stmt.size() && ident_char(stmt[j])) ++j;
            out.push_back({Token::Ident, std::string(stmt.substr(i, j - i)), col0 + i});
            i = j;
        } else if (c == '*') {
            throw ParseError(line, col0 + i, "'*' is reserved for counterfactual copies");
        } else {
            throw ParseError(line, col0 + i, std::string("unexpected character '") + c + "'");
        }
    }
    return out;
}

struct PendingEdge {
    std::string parent, child;
    std::size_t line, parent_col, child_col;
};

}  // namespace

CausalGraph parse_graph(std::string_view text) {
    CausalGraph::Builder b;
    std::unordered_map<std::string, NodeKind> declared;
    std::vector<PendingEdge> edges;
    std::optional<std::pair<Token, Token>> target;
    std::size_t target_line = 0;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        std::size_t start = 0;
        while (start <= line.size()) {
            std::size_t semi = line.find(';', start);
            if (semi == std::string_view::npos) semi = line.size();
            auto toks = tokenize(line.substr(start, semi - start), line_no, start + 1);
            start = semi + 1;
            if (toks.empty()) continue;

            const Token& kw = toks[0];
            if (kw.type != Token::Ident) throw ParseError(line_no, kw.column, "expected a statement keyword");
            auto expect_ident = [&](std::size_t i, const char* what) -> const Token& {
                if (i >= toks.size() || toks[i].type != Token::Ident)
                    throw ParseError(line_no, i < toks.size() ? toks[i].column : toks.back().column,
                                     std::string("expected ") + what);
                return toks[i];
            };
            auto expect_arrow = [&](std::size_t i) {
                if (i >= toks.size() || toks[i].type != Token::Arrow)
                    throw ParseError(line_no, i < toks.size() ? toks[i].column : toks.back().column,
                                     "expected '->'");
            };
            auto expect_end = [&](std::size_t i) {
                if (i < toks.size()) throw ParseError(line_no, toks[i].column, "unexpected trailing token");
            };

            if (kw.text == "node") {
                const Token& name = expect_ident(1, "node name");
                const Token& kind_tok = expect_ident(2, "node kind (endo|exo|sel)");
                expect_end(3);
                NodeKind kind;
                if (kind_tok.text == "endo") kind = NodeKind::Endogenous;
                else if (kind_tok.text == "exo") kind = NodeKind::Exogenous;
                else if (kind_tok.text == "sel") kind = NodeKind::Selection;
                else throw ParseError(line_no, kind_tok.column, "unknown node kind '" + kind_tok.text + "'");
                if (auto it = declared.find(name.text); it != declared.end()) {
                    if (it->second != kind)
                        throw ParseError(line_no, name.column, "node '" + name.text + "' redeclared with a different kind");
                    continue;
                }
                if (kind == NodeKind::Selection) {
                    for (const auto& [n, k] : declared)
                        if (k == NodeKind::Selection)
                            throw ParseError(line_no, name.column, "multiple selection nodes ('" + n + "' and '" + name.text + "')");
                }
                declared.emplace(name.text, kind);
                b.node(name.text, kind);
            } else if (kw.text == "edge") {
                const Token& p = expect_ident(1, "parent node");
                expect_arrow(2);
                const Token& c = expect_ident(3, "child node");
                expect_end(4);
                edges.push_back({p.text, c.text, line_no, p.column, c.column});
            } else if (kw.text == "target") {
                const Token& x = expect_ident(1, "treatment node");
                expect_arrow(2);
                const Token& y = expect_ident(3, "outcome node");
                expect_end(4);
                if (target) throw ParseError(line_no, kw.column, "target declared more than once");
                target = std::make_pair(x, y);
                target_line = line_no;
            } else {
                throw ParseError(line_no, kw.column, "unknown statement '" + kw.text + "'");
            }
        }
        if (eol == text.size()) break;
        pos = eol + 1;
    }

    if (declared.empty()) throw GraphError("no nodes declared");
    for (const auto& e : edges) {
        if (!declared.count(e.parent)) throw ParseError(e.line, e.parent_col, "unknown node '" + e.parent + "' in edge");
        if (!declared.count(e.child)) throw ParseError(e.line, e.child_col, "unknown node '" + e.child + "' in edge");
        b.edge(e.parent, e.child);
    }
    if (target) {
        for (const Token* t : {&target->first, &target->second})
            if (!declared.count(t->text)) throw ParseError(target_line, t->column, "unknown node '" + t->text + "' in target");
        b.target(target->first.text, target->second.text);
    }
    return b.build();
}

CausalGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw GraphError("cannot open graph file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_graph(ss.str());
}

std::string render(const CausalGraph& g) {
    std::ostringstream out;
    if (const auto& t = g.target()) out << "target " << t->treatment << " -> " << t->outcome << '\n';
    std::vector<NodeId> order(g.size());
    for (NodeId v = 0; v < g.size(); ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return g.name(a) < g.name(b); });
    for (NodeId v : order) out << "node " << g.name(v) << ' ' << to_string(g.kind(v)) << '\n';
    std::vector<std::pair<std::string, std::string>> edges;
    for (auto [u, v] : g.edges()) edges.emplace_back(g.name(u), g.name(v));
    std::sort(edges.begin(), edges.end());
    for (const auto& [u, v] : edges) out << "edge " << u << " -> " << v << '\n';
    return out.str();
}

namespace {

NodeSet closure(const CausalGraph& g, const NodeSet& v, bool up) {
    std::vector<bool> seen(g.size(), false);
    std::vector<NodeId> stack = g.ids(v);
    for (NodeId s : stack) seen[s] = true;
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        for (NodeId w : up ? g.parents(u) : g.children(u)) {
            if (!seen[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
        }
    }
    std::vector<NodeId> out;
    for (NodeId u = 0; u < g.size(); ++u)
        if (seen[u]) out.push_back(u);
    return g.to_set(out);
}

}  // namespace

NodeSet ancestors(const CausalGraph& g, const NodeSet& v) { return closure(g, v, true); }
NodeSet descendants(const CausalGraph& g, const NodeSet& v) { return closure(g, v, false); }

}  // namespace twinrec
