#include "contour/training.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace contour {

std::uint64_t TrainingCorpus::total_symbols() const {
    std::uint64_t total = 0;
    for (const auto& s : strings) total += s.size();
    return total;
}

TrainingCorpus TrainingCorpus::from_contours(std::span<const DccContour> contours) {
    TrainingCorpus c;
    c.strings.reserve(contours.size());
    for (const auto& ct : contours) c.strings.push_back(ct.symbols);
    return c;
}

TreeParams TreeParams::defaults_for(std::uint64_t training_size) {
    TreeParams p;
    if (training_size > 1) {
        // Integer search avoids ceil() landing one off on exact powers of 3.
        std::uint64_t power = 1;
        int d = 0;
        while (power < training_size) {
            power *= 3;
            ++d;
        }
        p.depth = d;
    }
    p.budget = 3 * p.depth * p.depth * p.depth;
    return p;
}

std::uint64_t count_occurrences(const TrainingCorpus& corpus, std::span<const Symbol> u) {
    if (u.empty()) throw std::invalid_argument("count_occurrences: empty sub-string");
    const std::size_t n = u.size();
    std::uint64_t count = 0;
    for (const auto& s : corpus.strings) {
        if (s.size() < n) continue;
        // u[0] is the most recent symbol, so it sits at the window's end.
        for (std::size_t end = n - 1; end < s.size(); ++end) {
            bool hit = true;
            for (std::size_t k = 0; k < n && hit; ++k) hit = s[end - k] == u[k];
            count += hit ? 1 : 0;
        }
    }
    return count;
}

namespace {

struct CountNode {
    std::array<std::uint64_t, 3> counts{};
    std::array<std::int32_t, 3> children{-1, -1, -1};
    std::int32_t parent = -1;
    std::uint8_t depth = 0;
    Symbol label = Symbol::L;

    std::uint64_t total() const { return counts[0] + counts[1] + counts[2]; }
};

} // namespace

InitialTree build_initial_tree(const TrainingCorpus& corpus, const TreeParams& params) {
    const auto depth = static_cast<std::size_t>(std::max(params.depth, 0));
    const auto admit_limit = 2 * static_cast<std::size_t>(std::max(params.budget, 0));

    std::vector<CountNode> trie(1);
    std::size_t counted = 0;
    InitialTree result;

    for (const auto& s : corpus.strings) {
        for (std::size_t i = depth + 1; i < s.size(); ++i) {
            const auto x = static_cast<std::size_t>(s[i]);
            ++trie[0].counts[x];
            std::int32_t cur = 0;
            for (std::size_t k = 1; k <= depth; ++k) {
                const Symbol past = s[i - k];
                std::int32_t next = trie[static_cast<std::size_t>(cur)].children[static_cast<std::size_t>(past)];
                if (next < 0) {
                    if (counted >= admit_limit) break;
                    CountNode n;
                    n.parent = cur;
                    n.depth = static_cast<std::uint8_t>(k);
                    n.label = past;
                    next = static_cast<std::int32_t>(trie.size());
                    trie.push_back(n);
                    trie[static_cast<std::size_t>(cur)].children[static_cast<std::size_t>(past)] = next;
                    ++counted;
                }
                ++trie[static_cast<std::size_t>(next)].counts[x];
                cur = next;
            }
            result.peak_nodes = std::max(result.peak_nodes, counted);
        }
    }

    // Rank non-root nodes; contexts are compared as recent-first strings.
    auto context_of = [&](std::int32_t id) {
        std::vector<Symbol> ctx(trie[static_cast<std::size_t>(id)].depth);
        for (auto cur = id; cur != 0; cur = trie[static_cast<std::size_t>(cur)].parent)
            ctx[trie[static_cast<std::size_t>(cur)].depth - 1] = trie[static_cast<std::size_t>(cur)].label;
        return ctx;
    };
    std::vector<std::int32_t> ranked(trie.size() - 1);
    std::iota(ranked.begin(), ranked.end(), 1);
    std::vector<std::vector<Symbol>> contexts(trie.size());
    for (auto id : ranked) contexts[static_cast<std::size_t>(id)] = context_of(id);
    std::sort(ranked.begin(), ranked.end(), [&](std::int32_t a, std::int32_t b) {
        const auto& na = trie[static_cast<std::size_t>(a)];
        const auto& nb = trie[static_cast<std::size_t>(b)];
        if (na.total() != nb.total()) return na.total() > nb.total();
        if (na.depth != nb.depth) return na.depth < nb.depth;
        return contexts[static_cast<std::size_t>(a)] < contexts[static_cast<std::size_t>(b)];
    });

    std::vector<char> keep(trie.size(), 0);
    keep[0] = 1;
    const auto quota = std::min(ranked.size(), static_cast<std::size_t>(std::max(params.budget, 0)));
    for (std::size_t r = 0; r < quota; ++r)
        for (auto cur = ranked[r]; cur >= 0 && !keep[static_cast<std::size_t>(cur)];
             cur = trie[static_cast<std::size_t>(cur)].parent)
            keep[static_cast<std::size_t>(cur)] = 1;

    auto as_counts = [](const CountNode& n) {
        return SymbolCounts{static_cast<double>(n.counts[0]), static_cast<double>(n.counts[1]),
                            static_cast<double>(n.counts[2])};
    };
    result.tree.node(ContextTree::kRoot).counts = as_counts(trie[0]);
    std::function<void(std::int32_t, std::int32_t)> copy = [&](std::int32_t src, std::int32_t dst) {
        for (Symbol s : kSymbols) {
            const auto c = trie[static_cast<std::size_t>(src)].children[static_cast<std::size_t>(s)];
            if (c < 0 || !keep[static_cast<std::size_t>(c)]) continue;
            copy(c, result.tree.add_child(dst, s, as_counts(trie[static_cast<std::size_t>(c)])));
        }
    };
    copy(0, ContextTree::kRoot);
    return result;
}

ContextTree fill_to_full(const ContextTree& tree) {
    ContextTree out = tree;
    const auto original = static_cast<std::int32_t>(out.size());
    for (std::int32_t id = 0; id < original; ++id) {
        const auto& nd = out.node(id);
        const int present = nd.child_count();
        if (present == 0 || present == 3) continue;
        const SymbolCounts parent = nd.counts;
        const double parent_total = nd.total();
        double existing = 0.0;
        for (auto c : nd.children)
            if (c >= 0) existing += out.node(c).total();
        const double remainder = std::max(0.0, parent_total - existing);
        const double share = remainder / static_cast<double>(3 - present);
        for (Symbol s : kSymbols) {
            if (out.child(id, s) >= 0) continue;
            SymbolCounts counts{};
            if (parent_total > 0.0)
                for (std::size_t x = 0; x < 3; ++x) counts[x] = parent[x] * share / parent_total;
            out.add_child(id, s, counts);
        }
    }
    return out.canonical();
}

TrainedModel train(const TrainingCorpus& corpus, TreeParams params, TrainingReport* report) {
    const auto size = corpus.total_symbols();
    if (corpus.strings.empty() || size == 0) throw Error("training corpus is empty");
    const auto defaults = TreeParams::defaults_for(size);
    if (params.depth <= 0) params.depth = defaults.depth;
    if (params.budget <= 0) params.budget = 3 * params.depth * params.depth * params.depth;

    const auto initial = build_initial_tree(corpus, params);
    const auto filled = fill_to_full(initial.tree);
    const double L = static_cast<double>(size);
    auto pruned = prune(filled, L, params.a);

    if (report) {
        report->training_size = size;
        report->string_count = corpus.string_count();
        report->params = params;
        report->initial_nodes = filled.size();
        report->initial_end_nodes = filled.end_nodes().size();
        report->end_nodes = pruned.tree.end_nodes().size();
        report->peak_nodes = initial.peak_nodes;
        report->initial_cost = objective(filled, L, params.a);
        report->cost = objective(pruned.tree, L, params.a);
    }
    return {std::move(pruned.tree), params, size};
}

} // namespace contour
