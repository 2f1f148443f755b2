#include "contour/lossy_codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace contour {

namespace {

constexpr CostUnits kInfinite = static_cast<CostUnits>(std::numeric_limits<std::int64_t>::max()) << 40;

std::uint64_t pack_point(GridPoint p) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x)) << 32) | static_cast<std::uint32_t>(p.y);
}

/// Lattice points within d_max of the original endpoints, with squared
/// distances and a neighbour table indexed by direction.
struct Region {
    std::vector<GridPoint> points;
    std::vector<std::int64_t> d2;
    std::vector<std::array<std::int32_t, 4>> neighbour;

    Region(std::span<const GridPoint> originals, double d_max) {
        const auto r = static_cast<std::int32_t>(std::floor(d_max));
        const double limit = d_max * d_max;
        std::unordered_map<std::uint64_t, std::int32_t> index;
        index.reserve(originals.size() * static_cast<std::size_t>((2 * r + 1) * (2 * r + 1)));
        for (GridPoint o : originals) {
            for (std::int32_t dy = -r; dy <= r; ++dy) {
                for (std::int32_t dx = -r; dx <= r; ++dx) {
                    const std::int64_t dist = std::int64_t{dx} * dx + std::int64_t{dy} * dy;
                    if (static_cast<double>(dist) > limit) continue;
                    const GridPoint p{o.x + dx, o.y + dy};
                    auto [it, fresh] = index.try_emplace(pack_point(p), static_cast<std::int32_t>(points.size()));
                    if (fresh) {
                        points.push_back(p);
                        d2.push_back(dist);
                    } else {
                        auto& cur = d2[static_cast<std::size_t>(it->second)];
                        cur = std::min(cur, dist);
                    }
                }
            }
        }
        neighbour.resize(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            for (Direction d : kDirections) {
                const auto it = index.find(pack_point(step(points[i], d)));
                neighbour[i][static_cast<std::size_t>(d)] = it == index.end() ? -1 : it->second;
            }
        }
        lookup_ = std::move(index);
    }

    std::int32_t find(GridPoint p) const {
        const auto it = lookup_.find(pack_point(p));
        return it == lookup_.end() ? -1 : it->second;
    }

private:
    std::unordered_map<std::uint64_t, std::int32_t> lookup_;
};

/// Dense or hashed map from state keys to values, with O(1) reset.
template <typename T>
class KeyTable {
public:
    explicit KeyTable(std::uint64_t dense_size) {
        if (dense_size > 0 && dense_size <= (std::uint64_t{1} << 24)) {
            values_.resize(dense_size);
            stamp_.assign(dense_size, 0);
            dense_ = true;
        }
    }

    T* find(std::uint64_t key) {
        if (dense_) return stamp_[key] == epoch_ ? &values_[key] : nullptr;
        const auto it = map_.find(key);
        return it == map_.end() ? nullptr : &it->second;
    }
    void set(std::uint64_t key, T value) {
        if (dense_) {
            stamp_[key] = epoch_;
            values_[key] = value;
        } else {
            map_[key] = value;
        }
    }
    void clear() {
        if (dense_) ++epoch_;
        else map_.clear();
    }

private:
    bool dense_ = false;
    std::uint32_t epoch_ = 1;
    std::vector<T> values_;
    std::vector<std::uint32_t> stamp_;
    std::unordered_map<std::uint64_t, T> map_;
};

/// History state space. Truncated mode uses TST nodes directly; full mode
/// interns packed windows of the last D symbols.
class Histories {
public:
    Histories(const RdModel& model, HistoryMode mode) : model_(model), mode_(mode) {
        if (mode_ == HistoryMode::Full) {
            depth_ = model.tree().max_depth();
            if (depth_ > 29) throw Error("full-history search supports context depth up to 29");
            intern(0);
        }
    }

    std::int32_t initial() const { return mode_ == HistoryMode::Truncated ? ContextTree::kRoot : 0; }
    /// Upper bound on ids for dense keys; 0 when ids are discovered lazily.
    std::uint64_t bound() const { return mode_ == HistoryMode::Truncated ? model_.tst().size() : 0; }

    std::int32_t next(std::int32_t h, Symbol s) {
        if (mode_ == HistoryMode::Truncated) return model_.tst_next(h, s);
        const auto hi = static_cast<std::size_t>(h);
        const auto si = static_cast<std::size_t>(s);
        if (full_next_[hi][si] < 0) {
            const std::uint64_t packed = packed_[hi];
            const std::uint64_t len = packed >> 58;
            const std::uint64_t mask = depth_ == 0 ? 0 : (std::uint64_t{1} << (2 * depth_)) - 1;
            const std::uint64_t syms = ((packed << 2) | static_cast<std::uint64_t>(s)) & mask;
            const std::uint64_t nlen = std::min<std::uint64_t>(len + 1, static_cast<std::uint64_t>(depth_));
            const auto id = intern((nlen << 58) | syms);
            full_next_[hi][si] = id;
        }
        return full_next_[hi][si];
    }

    std::int64_t rate(std::int32_t h, Symbol s) const {
        if (mode_ == HistoryMode::Truncated) return model_.tst_rate(h, s);
        return full_rate_[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)];
    }

private:
    std::int32_t intern(std::uint64_t packed) {
        auto [it, fresh] = ids_.try_emplace(packed, static_cast<std::int32_t>(packed_.size()));
        if (!fresh) return it->second;
        packed_.push_back(packed);
        full_next_.push_back({-1, -1, -1});
        std::vector<Symbol> hist(packed >> 58);
        for (std::size_t i = 0; i < hist.size(); ++i) hist[i] = static_cast<Symbol>((packed >> (2 * i)) & 3U);
        full_rate_.push_back(model_.rates(hist));
        return it->second;
    }

    const RdModel& model_;
    HistoryMode mode_;
    int depth_ = 0;
    std::unordered_map<std::uint64_t, std::int32_t> ids_;
    std::vector<std::uint64_t> packed_;
    std::vector<std::array<std::int32_t, 3>> full_next_;
    std::vector<std::array<std::int64_t, 3>> full_rate_;
};

struct Label {
    std::int32_t history;
    std::int32_t cell;
    Direction dir;
    CostUnits cost;
    std::int32_t trail; ///< index into the back-pointer arena, -1 at the start
};

struct Step {
    std::int32_t parent;
    Symbol symbol;
};

constexpr std::array<Symbol, 3> kPreference{Symbol::S, Symbol::L, Symbol::R};

} // namespace

std::int64_t rate_units(double probability) {
    if (!(probability > 0.0)) return kNoRate;
    return std::llround(-std::log2(probability) * static_cast<double>(1 << kRateShift));
}

std::int64_t lambda_units(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error("lambda must be a finite nonnegative number");
    return std::llround(lambda * static_cast<double>(1 << kRateShift));
}

CostUnits local_cost(const RdParams& params, std::int64_t d2, std::int64_t rate) {
    if (params.mode == RdMode::Madd) return rate;
    return (static_cast<CostUnits>(d2) << kDistortionShift) +
           static_cast<CostUnits>(lambda_units(params.lambda)) * rate;
}

double to_objective(const RdParams& params, CostUnits units) {
    const int shift = params.mode == RdMode::Madd ? kRateShift : kDistortionShift;
    return static_cast<double>(units) / std::ldexp(1.0, shift);
}

RdModel::RdModel(ContextTree tree, double beta) : tree_(std::move(tree)), beta_(beta) {
    if (!tree_.is_full()) throw Error("context tree must be full");
    tst_ = build_tst(tree_);
    next_.resize(tst_.size());
    rate_.resize(tst_.size());
    for (std::int32_t id = 0; id < static_cast<std::int32_t>(tst_.size()); ++id) {
        const auto ctx = tst_.context(id);
        rate_[static_cast<std::size_t>(id)] = rates(ctx);
        std::vector<Symbol> longer(ctx.size() + 1);
        std::copy(ctx.begin(), ctx.end(), longer.begin() + 1);
        for (Symbol s : kSymbols) {
            longer[0] = s;
            const auto k = truncate_history(longer, tst_);
            next_[static_cast<std::size_t>(id)][static_cast<std::size_t>(s)] =
                tst_.find(std::span<const Symbol>(longer).first(k));
        }
    }
}

std::array<std::int64_t, 3> RdModel::rates(std::span<const Symbol> recent_first) const {
    const auto p = lookup(recent_first, tree_, beta_);
    return {rate_units(p[0]), rate_units(p[1]), rate_units(p[2])};
}

ApproxResult approximate(const DccContour& x, const RdModel& model, const RdParams& params,
                         const DpOptions& options) {
    if (x.symbols.empty()) throw Error("approximation needs a contour with at least two edges");
    if (!(params.d_max >= 0.0) || !std::isfinite(params.d_max)) throw Error("d_max must be finite and nonnegative");
    lambda_units(params.lambda);

    const auto original = endpoints(x);
    const Region region(original, params.d_max);
    const std::int32_t first_cell = region.find(original.front());
    const std::int32_t target = region.find(original.back());
    const std::size_t n = x.symbols.size();

    Histories hist(model, options.history);
    const std::uint64_t cells = region.points.size();
    const std::uint64_t dense = hist.bound() * cells * 4;
    auto key_of = [cells](std::int32_t h, std::int32_t cell, Direction d) {
        return ((static_cast<std::uint64_t>(h) * cells) + static_cast<std::uint64_t>(cell)) * 4 +
               static_cast<std::uint64_t>(d);
    };

    KeyTable<std::int32_t> slot(dense);  // key -> index in the next layer
    KeyTable<CostUnits> best_seen(options.prune ? dense : 1);
    std::vector<Step> arena;
    std::vector<Label> layer{{hist.initial(), first_cell, x.initial, 0, -1}};
    std::vector<Label> next_layer;

    CostUnits best = kInfinite;
    std::int32_t best_trail = -1;
    std::size_t expanded = 0;

    for (std::size_t j = 1; j <= n && !layer.empty(); ++j) {
        slot.clear();
        next_layer.clear();
        for (const Label& lab : layer) {
            if (options.prune && lab.cost >= best) continue;
            ++expanded;
            for (Symbol s : kPreference) {
                const auto r = hist.rate(lab.history, s);
                if (r == kNoRate) continue;
                const Direction nd = rotate(lab.dir, s);
                const auto cell = region.neighbour[static_cast<std::size_t>(lab.cell)][static_cast<std::size_t>(nd)];
                if (cell < 0) continue;
                const CostUnits cost = lab.cost + local_cost(params, region.d2[static_cast<std::size_t>(cell)], r);
                if (cell == target) {
                    if (cost < best) {
                        best = cost;
                        arena.push_back({lab.trail, s});
                        best_trail = static_cast<std::int32_t>(arena.size() - 1);
                    }
                    continue;
                }
                if (j == n) continue;
                if (options.prune && cost >= best) continue;
                const auto h = hist.next(lab.history, s);
                const auto key = key_of(h, cell, nd);
                if (options.prune) {
                    if (const auto* seen = best_seen.find(key); seen && *seen <= cost) continue;
                    best_seen.set(key, cost);
                }
                if (auto* idx = slot.find(key)) {
                    auto& existing = next_layer[static_cast<std::size_t>(*idx)];
                    if (cost < existing.cost) {
                        arena.push_back({lab.trail, s});
                        existing.cost = cost;
                        existing.trail = static_cast<std::int32_t>(arena.size() - 1);
                    }
                    continue;
                }
                arena.push_back({lab.trail, s});
                slot.set(key, static_cast<std::int32_t>(next_layer.size()));
                next_layer.push_back({h, cell, nd, cost, static_cast<std::int32_t>(arena.size() - 1)});
            }
        }
        std::swap(layer, next_layer);
    }
    if (best_trail < 0) throw InfeasibleError("no approximation reaches the end point within the region");

    ApproxResult result;
    result.contour.start = x.start;
    result.contour.initial = x.initial;
    for (auto t = best_trail; t >= 0; t = arena[static_cast<std::size_t>(t)].parent)
        result.contour.symbols.push_back(arena[static_cast<std::size_t>(t)].symbol);
    std::reverse(result.contour.symbols.begin(), result.contour.symbols.end());

    const auto dist = measure(x, result.contour);
    result.ssdd = dist.ssdd;
    result.madd = dist.madd;
    result.rate_bits = rate_bits(result.contour, model);
    result.objective_units = best;
    result.objective = to_objective(params, best);
    result.states_expanded = expanded;
    return result;
}

ApproxResult approx_ssdd(const DccContour& x, const RdModel& model, const RdParams& params,
                         const DpOptions& options) {
    if (params.mode != RdMode::Ssdd) throw Error("approx_ssdd called with MADD parameters");
    return approximate(x, model, params, options);
}

ApproxResult approx_madd(const DccContour& x, const RdModel& model, const RdParams& params,
                         const DpOptions& options) {
    if (params.mode != RdMode::Madd) throw Error("approx_madd called with SSDD parameters");
    return approximate(x, model, params, options);
}

Distortion measure(const DccContour& x, const DccContour& approx) {
    const auto original = endpoints(x);
    Distortion d;
    for (GridPoint p : endpoints(approx)) {
        const auto sq = min_squared_distance(p, original);
        d.ssdd_squared += sq;
        d.max_squared = std::max(d.max_squared, sq);
    }
    d.ssdd = static_cast<double>(d.ssdd_squared);
    d.madd = std::sqrt(static_cast<double>(d.max_squared));
    return d;
}

double rate_bits(const DccContour& c, const RdModel& model) {
    double bits = 0.0;
    const std::span<const Symbol> syms(c.symbols);
    for (std::size_t j = 0; j < syms.size(); ++j) {
        const auto p = node_probabilities(model.tree(), model.tree().match_past(syms.first(j)), model.beta());
        bits -= std::log2(p[static_cast<std::size_t>(syms[j])]);
    }
    return bits;
}

CostUnits candidate_cost(const DccContour& x, const DccContour& approx, const RdModel& model,
                         const RdParams& params) {
    const auto original = endpoints(x);
    const auto points = endpoints(approx);
    CostUnits total = 0;
    std::vector<Symbol> recent;
    for (std::size_t j = 0; j < approx.symbols.size(); ++j) {
        const Symbol s = approx.symbols[j];
        const auto r = model.rates(recent)[static_cast<std::size_t>(s)];
        if (r == kNoRate) return kInfinite;
        total += local_cost(params, min_squared_distance(points[j + 1], original), r);
        recent.insert(recent.begin(), s);
        if (recent.size() > static_cast<std::size_t>(model.tree().max_depth())) recent.pop_back();
    }
    return total;
}

} // namespace contour
