#pragma once

#include "contour/context_tree.hpp"
#include "contour/geometry.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace contour {

/// No approximation satisfies the pinned endpoints inside the region.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

enum class RdMode { Ssdd, Madd };

struct RdParams {
    RdMode mode = RdMode::Ssdd;
    double lambda = 0.0; ///< weight of the rate in bits (SSDD only)
    double d_max = 4.0;  ///< region radius; in MADD mode also the distortion bound
};

/// Exact fixed-point costs. One bit of rate is 2^16 rate units; one squared
/// grid unit of distortion is 2^32 cost units.
__extension__ typedef __int128 CostUnits;

inline constexpr int kRateShift = 16;
inline constexpr int kDistortionShift = 32;
/// Rate of an impossible symbol (zero probability).
inline constexpr std::int64_t kNoRate = -1;

std::int64_t rate_units(double probability);
std::int64_t lambda_units(double lambda);

/// Cost of one approximated edge with squared distance `d2` coded at `rate`
/// rate units. SSDD: d2 * 2^32 + lambda_q * rate. MADD: rate.
CostUnits local_cost(const RdParams& params, std::int64_t d2, std::int64_t rate);

double to_objective(const RdParams& params, CostUnits units);

/// T* and its total suffix tree with per-node successor and rate tables.
class RdModel {
public:
    RdModel(ContextTree tree, double beta);

    const ContextTree& tree() const { return tree_; }
    const ContextTree& tst() const { return tst_; }
    double beta() const { return beta_; }

    /// Rate units of each next symbol after a history (most recent first),
    /// evaluated on T* directly.
    std::array<std::int64_t, 3> rates(std::span<const Symbol> recent_first) const;

    std::int32_t tst_next(std::int32_t node, Symbol s) const {
        return next_[static_cast<std::size_t>(node)][static_cast<std::size_t>(s)];
    }
    std::int64_t tst_rate(std::int32_t node, Symbol s) const {
        return rate_[static_cast<std::size_t>(node)][static_cast<std::size_t>(s)];
    }

private:
    ContextTree tree_;
    ContextTree tst_;
    double beta_;
    std::vector<std::array<std::int32_t, 3>> next_;
    std::vector<std::array<std::int64_t, 3>> rate_;
};

enum class HistoryMode {
    Truncated, ///< state history is a total-suffix-tree node
    Full,      ///< state history is the last depth(T*) symbols
};

struct DpOptions {
    HistoryMode history = HistoryMode::Truncated;
    /// Drop labels beaten by an equal state reached earlier, and labels
    /// already costing at least the best complete path.
    bool prune = true;
};

struct ApproxResult {
    DccContour contour;
    double rate_bits = 0.0;
    double ssdd = 0.0;
    double madd = 0.0;
    double objective = 0.0; ///< ssdd + lambda * bits, or bits in MADD mode
    CostUnits objective_units = 0;
    std::size_t states_expanded = 0;
};

/// Minimum-cost approximation of `x`: same start, same initial edge, at
/// most N symbols, every endpoint within d_max of an endpoint of `x`,
/// ending on the first arrival at the last endpoint of `x`.
ApproxResult approximate(const DccContour& x, const RdModel& model, const RdParams& params,
                         const DpOptions& options = {});
ApproxResult approx_ssdd(const DccContour& x, const RdModel& model, const RdParams& params,
                         const DpOptions& options = {});
ApproxResult approx_madd(const DccContour& x, const RdModel& model, const RdParams& params,
                         const DpOptions& options = {});

struct Distortion {
    double ssdd = 0.0;
    double madd = 0.0;
    std::int64_t ssdd_squared = 0; ///< integer sum of squared distances
    std::int64_t max_squared = 0;
};

/// Distances from every endpoint of `approx` to the endpoint set of `x`.
Distortion measure(const DccContour& x, const DccContour& approx);

/// Sum of -log2 P over the symbols of `c`, history reset at its start.
double rate_bits(const DccContour& c, const RdModel& model);

/// Objective of a candidate approximation evaluated term by term on T*.
CostUnits candidate_cost(const DccContour& x, const DccContour& approx, const RdModel& model,
                         const RdParams& params);

} // namespace contour
