#include "contour/rice.hpp"

namespace contour {

unsigned ceil_log2(std::uint64_t v) {
    unsigned k = 0;
    while (k < 64 && (std::uint64_t{1} << k) < v) ++k;
    return k;
}

unsigned fixed_width(std::uint64_t max_value) { return ceil_log2(max_value + 1); }

void rice_encode(BitWriter& out, std::uint64_t v, unsigned k) {
    out.put_unary(v >> k);
    out.put_bits(v, k);
}

std::uint64_t rice_decode(BitReader& in, unsigned k, std::uint64_t max_quotient) {
    const auto q = in.get_unary(max_quotient);
    return (q << k) | in.get_bits(k);
}

std::uint64_t rice_cost(std::uint64_t v, unsigned k) { return (v >> k) + 1 + k; }

RiceChoice best_rice_k(std::span<const std::uint64_t> values, std::uint64_t max_value) {
    RiceChoice best;
    if (values.empty()) return best;
    const unsigned k_max = ceil_log2(max_value);
    for (unsigned k = 0; k <= k_max; ++k) {
        std::uint64_t bits = 0;
        for (auto v : values) bits += rice_cost(v, k);
        if (k == 0 || bits < best.bits) best = {k, bits};
    }
    return best;
}

} // namespace contour
