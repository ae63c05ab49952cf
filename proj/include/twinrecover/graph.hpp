#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace twinrec {

enum class NodeKind { Endogenous, Exogenous, Selection };

std::string_view to_string(NodeKind kind);

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax or reference error in a graph file, positioned at a 1-based line/column.
class ParseError : public GraphError {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

using NodeId = std::size_t;

/// Sorted, deduplicated set of node names.
class NodeSet {
public:
    NodeSet() = default;
    NodeSet(std::initializer_list<std::string> names);
    explicit NodeSet(std::vector<std::string> names);

    bool contains(std::string_view name) const;
    void insert(std::string name);
    bool empty() const noexcept { return names_.empty(); }
    std::size_t size() const noexcept { return names_.size(); }
    bool subset_of(const NodeSet& other) const;

    NodeSet united(const NodeSet& other) const;
    NodeSet minus(const NodeSet& other) const;
    NodeSet intersected(const NodeSet& other) const;

    auto begin() const noexcept { return names_.begin(); }
    auto end() const noexcept { return names_.end(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::string& operator[](std::size_t i) const { return names_[i]; }

    /// "{A,B,C}"
    std::string str() const;

    friend bool operator==(const NodeSet&, const NodeSet&) = default;
    /// Cardinality first, then lexicographic.
    friend bool operator<(const NodeSet& a, const NodeSet& b);

private:
    std::vector<std::string> names_;
};

/// Treatment/outcome pair declared by a `target` statement.
struct Target {
    std::string treatment;
    std::string outcome;
    friend bool operator==(const Target&, const Target&) = default;
};

/// Selection-augmented causal DAG. Immutable once built.
class CausalGraph {
public:
    class Builder;

    std::size_t size() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::string& name(NodeId v) const { return names_.at(v); }
    NodeKind kind(NodeId v) const { return kinds_.at(v); }
    NodeKind kind(std::string_view name) const { return kinds_.at(id(name)); }

    std::optional<NodeId> find(std::string_view name) const;
    /// Throws GraphError on unknown names.
    NodeId id(std::string_view name) const;
    std::vector<NodeId> ids(const NodeSet& set) const;
    NodeSet to_set(const std::vector<NodeId>& ids) const;

    const std::vector<NodeId>& parents(NodeId v) const { return parents_.at(v); }
    const std::vector<NodeId>& children(NodeId v) const { return children_.at(v); }
    bool has_edge(NodeId from, NodeId to) const;
    std::size_t edge_count() const noexcept { return edge_count_; }
    /// Edges as (parent, child), ordered by parent id then child id.
    std::vector<std::pair<NodeId, NodeId>> edges() const;

    const std::vector<NodeId>& topological_order() const noexcept { return topo_; }

    /// The factual selection node, if any.
    std::optional<NodeId> selection() const noexcept { return selection_; }
    const std::optional<Target>& target() const noexcept { return target_; }
    bool implicit_exogenous() const noexcept { return implicit_exogenous_; }

    NodeSet nodes_of_kind(NodeKind kind) const;

    /// Same node names with the same kinds, same edge set, same target.
    friend bool operator==(const CausalGraph& a, const CausalGraph& b);

private:
    CausalGraph() = default;

    std::vector<std::string> names_;
    std::vector<NodeKind> kinds_;
    std::unordered_map<std::string, NodeId> index_;
    std::vector<std::vector<NodeId>> parents_;
    std::vector<std::vector<NodeId>> children_;
    std::vector<NodeId> topo_;
    std::size_t edge_count_ = 0;
    std::optional<NodeId> selection_;
    std::optional<Target> target_;
    bool implicit_exogenous_ = false;
};

class CausalGraph::Builder {
public:
    Builder& node(std::string name, NodeKind kind);
    Builder& edge(std::string parent, std::string child);
    Builder& target(std::string treatment, std::string outcome);

    /// Add U_<name> for every endogenous or selection node without an exogenous parent (default on).
    Builder& synthesize_exogenous(bool on);

    /// Permit `*`-suffixed names and one extra selection copy; used by the twin builder.
    Builder& counterfactual_copies(bool on);

    CausalGraph build() const;

private:
    std::vector<std::pair<std::string, NodeKind>> nodes_;
    std::vector<std::pair<std::string, std::string>> edges_;
    std::optional<Target> target_;
    bool synthesize_ = true;
    bool counterfactual_ = false;
};

CausalGraph parse_graph(std::string_view text);
CausalGraph load_graph(const std::filesystem::path& path);

/// Canonical text form: target, nodes by name, edges by (parent, child) name.
std::string render(const CausalGraph& g);

/// v plus every node with a directed path into v.
NodeSet ancestors(const CausalGraph& g, const NodeSet& v);
NodeSet descendants(const CausalGraph& g, const NodeSet& v);

bool is_counterfactual_name(std::string_view name);

}  // namespace twinrec
