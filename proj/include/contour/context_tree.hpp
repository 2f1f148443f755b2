#pragma once

#include "contour/geometry.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace contour {

using Probabilities = std::array<double, 3>;
using SymbolCounts = std::array<double, 3>;

struct TreeNode {
    /// N(l.u), N(s.u), N(r.u): how often each symbol followed this context.
    /// Real-valued because added children inherit fractional shares.
    SymbolCounts counts{};
    std::array<std::int32_t, 3> children{-1, -1, -1};
    std::int32_t parent = -1;
    std::uint8_t depth = 0;
    /// Symbol on the link from the parent; meaningless for the root.
    Symbol label = Symbol::L;

    double total() const { return counts[0] + counts[1] + counts[2]; }
    int child_count() const;
    bool is_leaf() const { return child_count() == 0; }
};

/// Ternary trie over reversed contexts (most recent symbol first). Serves as
/// the count trie, the pruned context tree and the total suffix tree.
/// Node 0 is the root (empty context).
class ContextTree {
public:
    static constexpr std::int32_t kRoot = 0;

    ContextTree();

    /// Builds the tree containing every listed context and its ancestors.
    /// Contexts are written most-recent-first, e.g. "sll".
    static ContextTree from_contexts(std::span<const std::string> contexts);

    std::size_t size() const { return nodes_.size(); }
    const TreeNode& node(std::int32_t id) const { return nodes_[static_cast<std::size_t>(id)]; }
    TreeNode& node(std::int32_t id) { return nodes_[static_cast<std::size_t>(id)]; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }

    std::int32_t child(std::int32_t id, Symbol s) const {
        return nodes_[static_cast<std::size_t>(id)].children[static_cast<std::size_t>(s)];
    }
    std::int32_t add_child(std::int32_t parent, Symbol s, const SymbolCounts& counts = {});

    /// Node for an exact context, or -1.
    std::int32_t find(std::span<const Symbol> context) const;
    std::int32_t find(std::string_view context) const;

    /// Context string of a node, most recent symbol first.
    std::vector<Symbol> context(std::int32_t id) const;
    std::string context_string(std::int32_t id) const;

    /// Walks from the root along `recent_first` until an end node is reached
    /// or the history runs out; returns the node where the walk stopped.
    std::int32_t match(std::span<const Symbol> recent_first) const;
    /// Same walk, reading a chronological past backwards from its end.
    std::int32_t match_past(std::span<const Symbol> past) const;

    /// Every node has zero or three children.
    bool is_full() const;
    std::vector<std::int32_t> end_nodes() const;
    std::vector<std::int32_t> preorder() const;
    int max_depth() const;

    /// Preorder copy with children visited l, s, r. Node ids become canonical.
    ContextTree canonical() const;

    std::vector<std::string> end_node_strings() const;

private:
    std::vector<TreeNode> nodes_;
};

/// Geometric straightness of a context: the context is drawn as a lattice
/// path of |w|+2 points from an eastward initial edge, applying the symbols
/// in written order; the result is the largest perpendicular distance of a
/// point from the chord joining the first and last points. When the path
/// closes on itself the distance to the first point is used instead.
double straightness(std::span<const Symbol> context);
double straightness(std::string_view context);

/// Memoized straightness keyed by context string.
class StraightnessCache {
public:
    double get(std::span<const Symbol> context);
    std::size_t size() const { return cache_.size(); }

private:
    std::unordered_map<std::string, double> cache_;
};

/// -(1/L) sum_x N(x.w) ln(N(x.w)/N(w)); zero when N(w) = 0.
double likelihood_term(const SymbolCounts& counts, double training_size);

/// End-node cost f(w): likelihood term plus a * ln(L)/L * s(w).
double node_cost(const SymbolCounts& counts, double straightness_value, double training_size, double a);

/// F(T): sum of node costs over the end nodes of `tree`.
double objective(const ContextTree& tree, double training_size, double a);

struct PruneResult {
    ContextTree tree;
    double cost = 0.0; ///< minimized F
};

/// Bottom-up selection of the full subtree minimizing F. A node becomes an
/// end node whenever its own cost is no larger than its children's optimum.
PruneResult prune(const ContextTree& full_tree, double training_size, double a);

/// -(1/L) sum_v N(u.v) KL(P(.|u.v) || P(.|u)) for a node whose three
/// children are end nodes. Parent counts must be consistent with the
/// children (a symbol seen under a child is seen under the parent).
double kld_prune_delta(const SymbolCounts& parent, const std::array<SymbolCounts, 3>& children,
                       double training_size);

/// Smoothed distribution (N(x.w) + beta) / (N(w) + 3 beta) at node `id`.
Probabilities node_probabilities(const ContextTree& tree, std::int32_t id, double beta);

/// Distribution for the next symbol, history given most recent first.
Probabilities lookup(std::span<const Symbol> recent_first, const ContextTree& tree, double beta);

/// Suffix closure of every node of `tree`. Contains `tree` as a subtree.
ContextTree build_tst(const ContextTree& tree);

/// Length of the longest recent-first prefix of `recent_first` that is a
/// root-down path of `tst` ending at an end node (or the whole history if
/// it runs out first).
std::size_t truncate_history(std::span<const Symbol> recent_first, const ContextTree& tst);

} // namespace contour
