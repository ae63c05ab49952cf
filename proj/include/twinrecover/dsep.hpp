#pragma once

#include "twinrecover/graph.hpp"

#include <boost/dynamic_bitset.hpp>

#include <optional>
#include <stdexcept>
#include <vector>

namespace twinrec {

/// X ⟂ Y | Z. The three sets must be pairwise disjoint.
struct DsepQuery {
    NodeSet x;
    NodeSet y;
    NodeSet z;
};

class QueryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Reachability-based d-separation over one graph. Descendant sets are built
/// once at construction, so queries never write and may run concurrently.
class DsepEngine {
public:
    explicit DsepEngine(CausalGraph g);

    const CausalGraph& graph() const noexcept { return g_; }

    bool separated(const DsepQuery& q) const;
    bool separated(const std::vector<NodeId>& x, const std::vector<NodeId>& y,
                   const std::vector<NodeId>& z) const;

    /// One active path from x to y when connected; nodes listed in path order.
    std::optional<std::vector<NodeId>> active_path(const DsepQuery& q) const;

    /// desc(v) including v itself.
    const boost::dynamic_bitset<>& descendants_of(NodeId v) const { return desc_.at(v); }

private:
    boost::dynamic_bitset<> ancestor_mask(const std::vector<NodeId>& z) const;

    CausalGraph g_;
    std::vector<boost::dynamic_bitset<>> desc_;
};

bool d_separated(const CausalGraph& g, const DsepQuery& q);

inline constexpr std::size_t kOracleMaxNodes = 20;

/// Exhaustive check over every simple undirected path. Throws QueryError when
/// the graph has more than kOracleMaxNodes nodes.
bool d_separated_oracle(const CausalGraph& g, const DsepQuery& q);

/// "S <- X -> W1 <- U_W1 -> W1* -> Y*"
std::string format_path(const CausalGraph& g, const std::vector<NodeId>& path);

}  // namespace twinrec
