#include "contour/context_tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

namespace contour {

int TreeNode::child_count() const {
    return static_cast<int>(std::count_if(children.begin(), children.end(), [](auto c) { return c >= 0; }));
}

ContextTree::ContextTree() { nodes_.emplace_back(); }

ContextTree ContextTree::from_contexts(std::span<const std::string> contexts) {
    ContextTree t;
    for (const auto& ctx : contexts) {
        std::int32_t cur = kRoot;
        for (char c : ctx) {
            const Symbol s = symbol_from_char(c);
            std::int32_t next = t.child(cur, s);
            if (next < 0) next = t.add_child(cur, s);
            cur = next;
        }
    }
    return t;
}

std::int32_t ContextTree::add_child(std::int32_t parent, Symbol s, const SymbolCounts& counts) {
    if (child(parent, s) >= 0) throw std::logic_error("add_child: child already present");
    TreeNode n;
    n.counts = counts;
    n.parent = parent;
    n.depth = static_cast<std::uint8_t>(node(parent).depth + 1);
    n.label = s;
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(n);
    node(parent).children[static_cast<std::size_t>(s)] = id;
    return id;
}

std::int32_t ContextTree::find(std::span<const Symbol> ctx) const {
    std::int32_t cur = kRoot;
    for (Symbol s : ctx) {
        cur = child(cur, s);
        if (cur < 0) return -1;
    }
    return cur;
}

std::int32_t ContextTree::find(std::string_view ctx) const {
    const auto symbols = parse_symbols(ctx);
    return find(symbols);
}

std::vector<Symbol> ContextTree::context(std::int32_t id) const {
    std::vector<Symbol> out(node(id).depth);
    for (std::int32_t cur = id; cur != kRoot; cur = node(cur).parent)
        out[node(cur).depth - 1] = node(cur).label;
    return out;
}

std::string ContextTree::context_string(std::int32_t id) const { return to_string(context(id)); }

std::int32_t ContextTree::match(std::span<const Symbol> recent_first) const {
    std::int32_t cur = kRoot;
    for (Symbol s : recent_first) {
        if (node(cur).is_leaf()) break;
        const auto next = child(cur, s);
        // Non-full trees (count tries) may lack the branch.
        if (next < 0) break;
        cur = next;
    }
    return cur;
}

std::int32_t ContextTree::match_past(std::span<const Symbol> past) const {
    std::int32_t cur = kRoot;
    for (auto it = past.rbegin(); it != past.rend(); ++it) {
        if (node(cur).is_leaf()) break;
        const auto next = child(cur, *it);
        if (next < 0) break;
        cur = next;
    }
    return cur;
}

bool ContextTree::is_full() const {
    return std::all_of(nodes_.begin(), nodes_.end(), [](const TreeNode& n) {
        const int c = n.child_count();
        return c == 0 || c == 3;
    });
}

std::vector<std::int32_t> ContextTree::preorder() const {
    std::vector<std::int32_t> order;
    order.reserve(nodes_.size());
    std::vector<std::int32_t> stack{kRoot};
    while (!stack.empty()) {
        const auto id = stack.back();
        stack.pop_back();
        order.push_back(id);
        const auto& ch = node(id).children;
        for (auto it = ch.rbegin(); it != ch.rend(); ++it)
            if (*it >= 0) stack.push_back(*it);
    }
    return order;
}

std::vector<std::int32_t> ContextTree::end_nodes() const {
    std::vector<std::int32_t> out;
    for (auto id : preorder())
        if (node(id).is_leaf()) out.push_back(id);
    return out;
}

int ContextTree::max_depth() const {
    int d = 0;
    for (const auto& n : nodes_) d = std::max(d, static_cast<int>(n.depth));
    return d;
}

ContextTree ContextTree::canonical() const {
    ContextTree out;
    out.nodes_.front().counts = node(kRoot).counts;
    std::vector<std::int32_t> remap(nodes_.size(), -1);
    remap[kRoot] = kRoot;
    for (auto id : preorder()) {
        if (id == kRoot) continue;
        const auto& n = node(id);
        remap[static_cast<std::size_t>(id)] = out.add_child(remap[static_cast<std::size_t>(n.parent)], n.label, n.counts);
    }
    return out;
}

std::vector<std::string> ContextTree::end_node_strings() const {
    std::vector<std::string> out;
    for (auto id : end_nodes()) out.push_back(context_string(id));
    return out;
}

double straightness(std::span<const Symbol> context) {
    std::vector<GridPoint> pts;
    pts.reserve(context.size() + 2);
    GridPoint p{0, 0};
    Direction d = Direction::E;
    pts.push_back(p);
    p = step(p, d);
    pts.push_back(p);
    for (Symbol s : context) {
        d = rotate(d, s);
        p = step(p, d);
        pts.push_back(p);
    }
    const GridPoint a = pts.front();
    const GridPoint b = pts.back();
    const double cx = b.x - a.x;
    const double cy = b.y - a.y;
    const double chord = std::hypot(cx, cy);
    double best = 0.0;
    for (GridPoint q : pts) {
        const double qx = q.x - a.x;
        const double qy = q.y - a.y;
        const double dist = chord > 0.0 ? std::abs(cx * qy - cy * qx) / chord : std::hypot(qx, qy);
        best = std::max(best, dist);
    }
    return best;
}

double straightness(std::string_view context) {
    const auto symbols = parse_symbols(context);
    return straightness(std::span<const Symbol>(symbols));
}

double StraightnessCache::get(std::span<const Symbol> context) {
    auto key = to_string(context);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const double v = straightness(context);
    cache_.emplace(std::move(key), v);
    return v;
}

double likelihood_term(const SymbolCounts& counts, double training_size) {
    const double total = counts[0] + counts[1] + counts[2];
    if (total <= 0.0) return 0.0;
    double sum = 0.0;
    for (double n : counts)
        if (n > 0.0) sum += n * std::log(n / total);
    return -sum / training_size;
}

double node_cost(const SymbolCounts& counts, double straightness_value, double training_size, double a) {
    const double prior = training_size > 1.0 ? a * std::log(training_size) / training_size : 0.0;
    return likelihood_term(counts, training_size) + prior * straightness_value;
}

double objective(const ContextTree& tree, double training_size, double a) {
    double f = 0.0;
    for (auto id : tree.end_nodes())
        f += node_cost(tree.node(id).counts, straightness(tree.context(id)), training_size, a);
    return f;
}

PruneResult prune(const ContextTree& full_tree, double training_size, double a) {
    if (!full_tree.is_full()) throw std::invalid_argument("prune: tree is not full");
    const std::size_t n = full_tree.size();
    std::vector<double> best(n, 0.0);
    std::vector<char> keep_children(n, 0);
    StraightnessCache cache;

    // Children carry larger ids than parents only after canonical(); walk a
    // reversed preorder so every child is resolved before its parent.
    const auto order = full_tree.preorder();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto id = *it;
        const auto& nd = full_tree.node(id);
        const double own = node_cost(nd.counts, cache.get(full_tree.context(id)), training_size, a);
        if (nd.is_leaf()) {
            best[static_cast<std::size_t>(id)] = own;
            continue;
        }
        double split = 0.0;
        for (auto c : nd.children) split += best[static_cast<std::size_t>(c)];
        if (split < own) {
            best[static_cast<std::size_t>(id)] = split;
            keep_children[static_cast<std::size_t>(id)] = 1;
        } else {
            best[static_cast<std::size_t>(id)] = own;
        }
    }

    PruneResult result;
    result.cost = best[ContextTree::kRoot];
    result.tree.node(ContextTree::kRoot).counts = full_tree.node(ContextTree::kRoot).counts;
    std::function<void(std::int32_t, std::int32_t)> copy = [&](std::int32_t src, std::int32_t dst) {
        if (!keep_children[static_cast<std::size_t>(src)]) return;
        for (Symbol s : kSymbols) {
            const auto c = full_tree.child(src, s);
            const auto nc = result.tree.add_child(dst, s, full_tree.node(c).counts);
            copy(c, nc);
        }
    };
    copy(ContextTree::kRoot, ContextTree::kRoot);
    return result;
}

double kld_prune_delta(const SymbolCounts& parent, const std::array<SymbolCounts, 3>& children,
                       double training_size) {
    const double parent_total = parent[0] + parent[1] + parent[2];
    double sum = 0.0;
    for (const auto& child : children) {
        const double child_total = child[0] + child[1] + child[2];
        if (child_total <= 0.0) continue;
        double kl = 0.0;
        for (std::size_t x = 0; x < 3; ++x) {
            if (child[x] <= 0.0) continue;
            if (parent[x] <= 0.0) throw std::invalid_argument("kld_prune_delta: inconsistent counts");
            const double p = child[x] / child_total;
            const double q = parent[x] / parent_total;
            kl += p * std::log(p / q);
        }
        sum += child_total * kl;
    }
    return -sum / training_size;
}

Probabilities node_probabilities(const ContextTree& tree, std::int32_t id, double beta) {
    const auto& c = tree.node(id).counts;
    const double total = c[0] + c[1] + c[2] + 3.0 * beta;
    if (total <= 0.0) return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return {(c[0] + beta) / total, (c[1] + beta) / total, (c[2] + beta) / total};
}

Probabilities lookup(std::span<const Symbol> recent_first, const ContextTree& tree, double beta) {
    return node_probabilities(tree, tree.match(recent_first), beta);
}

ContextTree build_tst(const ContextTree& tree) {
    ContextTree tst;
    for (std::int32_t id = 0; id < static_cast<std::int32_t>(tree.size()); ++id) {
        const auto ctx = tree.context(id);
        for (std::size_t k = 0; k < ctx.size(); ++k) {
            std::int32_t cur = ContextTree::kRoot;
            for (std::size_t i = k; i < ctx.size(); ++i) {
                auto next = tst.child(cur, ctx[i]);
                if (next < 0) next = tst.add_child(cur, ctx[i]);
                cur = next;
            }
        }
    }
    if (!tst.is_full()) throw std::logic_error("build_tst: suffix closure of a full tree is not full");
    return tst.canonical();
}

std::size_t truncate_history(std::span<const Symbol> recent_first, const ContextTree& tst) {
    std::int32_t cur = ContextTree::kRoot;
    std::size_t k = 0;
    while (k < recent_first.size() && !tst.node(cur).is_leaf()) {
        cur = tst.child(cur, recent_first[k]);
        ++k;
    }
    return k;
}

} // namespace contour
