#pragma once

#include "contour/geometry.hpp"
#include "contour/mask.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <vector>

namespace contour {

using Rng = std::mt19937_64;

/// Uniform draw in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(Rng& rng);
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Order-2 Markov source over {l, s, r}. Row (a, b) holds the distribution
/// of the next symbol after a then b.
class MarkovSource {
public:
    using Matrix = std::array<std::array<double, 3>, 9>;

    explicit MarkovSource(const Matrix& transitions);
    /// Straight-biased chain resembling object outlines.
    static MarkovSource outline_like();

    const Matrix& transitions() const { return p_; }
    /// Stationary distribution over ordered pairs (a, b), index 3a + b.
    std::array<double, 9> stationary() const;
    /// Entropy rate in bits per symbol.
    double entropy_rate() const;

    /// The first two symbols are drawn from the stationary pair distribution.
    std::vector<Symbol> generate(std::size_t length, Rng& rng) const;

private:
    Matrix p_;
};

/// Sixteen deterministic test masks covering rectangles, disks, holes,
/// diagonal staircases, polygons and blobs. Shape parameters vary with the seed.
std::vector<BinaryMask> synthetic_mask_suite(std::uint64_t seed);

/// Contours from tracing every mask in the suite.
std::vector<DccContour> synthetic_contours(std::uint64_t seed);

/// Uniformly random symbols from a start in the middle of a
/// (2 * length + 2)-sized square; never leaves that square.
DccContour random_contour(std::size_t length, Rng& rng);

} // namespace contour
