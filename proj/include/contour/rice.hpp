#pragma once

#include "contour/bit_io.hpp"

#include <cstdint>
#include <span>

namespace contour {

/// ceil(log2 v), with 0 for v <= 1.
unsigned ceil_log2(std::uint64_t v);

/// Bits needed to write any value in [0, max_value] in plain binary.
unsigned fixed_width(std::uint64_t max_value);

/// Golomb code with divisor 2^k: quotient in unary (ones closed by a zero),
/// then the k low bits.
void rice_encode(BitWriter& out, std::uint64_t v, unsigned k);
std::uint64_t rice_decode(BitReader& in, unsigned k, std::uint64_t max_quotient = UINT32_MAX);
std::uint64_t rice_cost(std::uint64_t v, unsigned k);

struct RiceChoice {
    unsigned k = 0;
    std::uint64_t bits = 0;
};

/// Exhaustive search over k in [0, ceil(log2 W)]; the smallest k wins ties.
RiceChoice best_rice_k(std::span<const std::uint64_t> values, std::uint64_t max_value);

} // namespace contour
