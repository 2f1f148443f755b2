#pragma once

#include "contour/context_tree.hpp"
#include "contour/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace contour {

struct TrainingCorpus {
    std::vector<std::vector<Symbol>> strings;

    std::size_t string_count() const { return strings.size(); }
    std::uint64_t total_symbols() const;

    static TrainingCorpus from_contours(std::span<const DccContour> contours);
};

struct TreeParams {
    int depth = 0;      ///< D, maximum context length
    int budget = 0;     ///< K, contexts kept in the initial tree
    double a = 0.25;    ///< prior weight coefficient, alpha = a ln L
    double beta = 1.0;  ///< additive smoothing applied at lookup time

    /// D = ceil(ln L / ln 3), K = 3 D^3, a = 0.25, beta = 1.
    static TreeParams defaults_for(std::uint64_t training_size);
};

/// Occurrences of `u` (written most recent first) over all strings.
std::uint64_t count_occurrences(const TrainingCorpus& corpus, std::span<const Symbol> u);

struct InitialTree {
    ContextTree tree;
    /// Largest number of non-root nodes held while counting, bounded by 2K.
    std::size_t peak_nodes = 0;
};

/// Single counting pass followed by top-K selection. Positions i >= D+2
/// (1-based) are counted; the first 2K distinct contexts met are admitted;
/// then the K contexts with the largest N(u) survive, ties to shorter and
/// then lexicographically smaller contexts. The root is always counted.
InitialTree build_initial_tree(const TrainingCorpus& corpus, const TreeParams& params);

/// Completes every intermediate node with its missing children. Added
/// children share the remainder N(u) - sum of existing children (clamped at
/// zero) equally and copy the parent's conditional distribution.
ContextTree fill_to_full(const ContextTree& tree);

struct TrainedModel {
    ContextTree tree; ///< pruned, full
    TreeParams params;
    std::uint64_t training_size = 0; ///< L
};

struct TrainingReport {
    std::uint64_t training_size = 0;
    std::size_t string_count = 0;
    TreeParams params;
    std::size_t initial_nodes = 0;
    std::size_t initial_end_nodes = 0;
    std::size_t end_nodes = 0;
    std::size_t peak_nodes = 0;
    double initial_cost = 0.0; ///< F(T0)
    double cost = 0.0;         ///< F(T*)
};

/// Build, fill and prune. A zero depth or budget in `params` is replaced by
/// the defaults for the corpus size.
TrainedModel train(const TrainingCorpus& corpus, TreeParams params, TrainingReport* report = nullptr);

} // namespace contour
