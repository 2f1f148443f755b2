#pragma once

// Reference implementations used by the unit and acceptance tests. They are
// deliberately naive: exhaustive enumeration and direct formula evaluation.

#include "contour/context_tree.hpp"
#include "contour/geometry.hpp"
#include "contour/lossy_codec.hpp"
#include "contour/synthetic.hpp"
#include "contour/training.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace contour::testing {

inline ContextTree reference_tree() {
    const std::vector<std::string> ctx{"l", "sll", "sls", "slr", "ss", "sr", "rl", "rs", "rr"};
    return ContextTree::from_contexts(ctx);
}

/// f(w) written out directly from counts.
inline double direct_node_cost(const SymbolCounts& n, double s, double L, double a) {
    const double total = n[0] + n[1] + n[2];
    double lik = 0.0;
    for (double c : n)
        if (c > 0) lik -= c * std::log(c / total);
    return lik / L + a * std::log(L) / L * s;
}

/// Random full ternary tree of depth <= max_depth with consistent counts:
/// every internal node's counts are the sums of its children's.
inline ContextTree random_filled_tree(Rng& rng, int max_depth, double split_probability = 0.7) {
    ContextTree t;
    std::function<void(std::int32_t, int)> grow = [&](std::int32_t id, int depth) {
        if (depth < max_depth && uniform01(rng) < split_probability) {
            for (Symbol s : kSymbols) grow(t.add_child(id, s), depth + 1);
            SymbolCounts sum{};
            for (Symbol s : kSymbols) {
                const auto& c = t.node(t.child(id, s)).counts;
                for (int x = 0; x < 3; ++x) sum[x] += c[x];
            }
            t.node(id).counts = sum;
        } else {
            auto& c = t.node(id).counts;
            for (auto& v : c) v = uniform01(rng) < 0.2 ? 0.0 : static_cast<double>(uniform_below(rng, 40));
        }
    };
    grow(ContextTree::kRoot, 0);
    return t.canonical();
}

/// Every full subtree of `tree` (sharing its root), as lists of end nodes.
inline std::vector<std::vector<std::int32_t>> all_full_subtrees(const ContextTree& tree, std::int32_t id) {
    std::vector<std::vector<std::int32_t>> out{{id}};
    const auto& n = tree.node(id);
    if (n.is_leaf()) return out;
    auto a = all_full_subtrees(tree, n.children[0]);
    auto b = all_full_subtrees(tree, n.children[1]);
    auto c = all_full_subtrees(tree, n.children[2]);
    for (const auto& x : a)
        for (const auto& y : b)
            for (const auto& z : c) {
                std::vector<std::int32_t> e = x;
                e.insert(e.end(), y.begin(), y.end());
                e.insert(e.end(), z.begin(), z.end());
                out.push_back(std::move(e));
            }
    return out;
}

inline double subtree_cost(const ContextTree& tree, const std::vector<std::int32_t>& ends, double L, double a) {
    double f = 0.0;
    for (auto id : ends) f += direct_node_cost(tree.node(id).counts, straightness(tree.context(id)), L, a);
    return f;
}

struct ExhaustiveMin {
    double cost = std::numeric_limits<double>::infinity();
    std::vector<std::string> end_nodes;
    std::size_t subtrees = 0;
};

inline ExhaustiveMin exhaustive_min(const ContextTree& tree, double L, double a) {
    ExhaustiveMin best;
    const auto all = all_full_subtrees(tree, ContextTree::kRoot);
    best.subtrees = all.size();
    for (const auto& ends : all) {
        const double f = subtree_cost(tree, ends, L, a);
        if (f < best.cost) {
            best.cost = f;
            best.end_nodes.clear();
            for (auto id : ends) best.end_nodes.push_back(tree.context_string(id));
        }
    }
    return best;
}

/// Exhaustive search over every symbol string of length 1..N that keeps
/// all endpoints within d_max of the original endpoints and first reaches
/// the original end point at its last symbol.
struct BruteForce {
    bool feasible = false;
    CostUnits best = 0;
    DccContour argmin;
    std::size_t candidates = 0;
};

inline BruteForce brute_force_rd(const DccContour& x, const RdModel& model, const RdParams& params) {
    const auto original = endpoints(x);
    const GridPoint target = original.back();
    const double limit = params.d_max * params.d_max;
    BruteForce out;
    DccContour cand{x.start, x.initial, {}};
    std::function<void(GridPoint, Direction)> dfs = [&](GridPoint p, Direction d) {
        for (Symbol s : kSymbols) {
            const Direction nd = rotate(d, s);
            const GridPoint np = step(p, nd);
            if (static_cast<double>(min_squared_distance(np, original)) > limit) continue;
            cand.symbols.push_back(s);
            if (np == target) {
                ++out.candidates;
                const auto c = candidate_cost(x, cand, model, params);
                if (!out.feasible || c < out.best) {
                    out.feasible = true;
                    out.best = c;
                    out.argmin = cand;
                }
            } else if (cand.symbols.size() < x.symbols.size()) {
                dfs(np, nd);
            }
            cand.symbols.pop_back();
        }
    };
    dfs(original.front(), x.initial);
    return out;
}

/// Small model trained on outline-like Markov data.
inline TrainedModel markov_model(std::uint64_t seed, std::size_t length, int depth, int budget, double a = 0.25) {
    Rng rng(seed);
    TrainingCorpus corpus;
    corpus.strings.push_back(MarkovSource::outline_like().generate(length, rng));
    TreeParams p;
    p.depth = depth;
    p.budget = budget;
    p.a = a;
    return train(corpus, p);
}

/// Model trained on the traced synthetic mask suite for several seeds.
inline TrainedModel suite_model(std::uint64_t first_seed, int seeds) {
    std::vector<DccContour> all;
    for (int i = 0; i < seeds; ++i) {
        auto c = synthetic_contours(first_seed + static_cast<std::uint64_t>(i));
        all.insert(all.end(), c.begin(), c.end());
    }
    return train(TrainingCorpus::from_contours(all), TreeParams{});
}

} // namespace contour::testing
