#pragma once

#include "contour/bit_io.hpp"
#include "contour/context_tree.hpp"
#include "contour/geometry.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace contour {

inline constexpr unsigned kFrequencyBits = 16;
inline constexpr std::uint32_t kFrequencyTotal = 1U << kFrequencyBits;

/// Quantized frequencies for l, s, r. Each is at least 1 and they sum to
/// kFrequencyTotal.
struct FrequencyTriple {
    std::array<std::uint32_t, 3> freq{1, 1, 1};

    std::uint32_t total() const { return freq[0] + freq[1] + freq[2]; }
    double probability(Symbol s) const {
        return static_cast<double>(freq[static_cast<std::size_t>(s)]) / static_cast<double>(total());
    }
};

/// Rounds to the 2^-16 grid, floors each frequency at 1 and absorbs the
/// rounding residue in the largest entry. Error per symbol is at most 2^-15.
FrequencyTriple quantize(const Probabilities& p);

/// Integer arithmetic coder with 32-bit low/high registers and deferred
/// (follow) bits for the straddle case.
class ArithmeticEncoder {
public:
    explicit ArithmeticEncoder(BitWriter& out) : out_(out) {}

    void encode(Symbol s, const FrequencyTriple& f);
    /// Emits the two terminating bits plus any pending follow bits.
    void finish();

    /// Bits this stream has produced or committed to (pending follow bits
    /// included). Equals the payload length once finished.
    std::size_t committed_bits() const { return committed_; }

private:
    void emit(bool bit);

    BitWriter& out_;
    std::uint32_t low_ = 0;
    std::uint32_t high_ = 0xFFFFFFFFU;
    std::uint64_t pending_ = 0;
    std::size_t committed_ = 0;
    bool finished_ = false;
};

class ArithmeticDecoder {
public:
    /// Reads 32 bits of lookahead immediately.
    explicit ArithmeticDecoder(BitReader& in);

    Symbol decode(const FrequencyTriple& f);

    /// Bits read past the end of the payload. A complete payload never needs
    /// more than 30; more means the stream was cut short.
    static constexpr std::size_t kMaxOverrun = 30;

private:
    bool next_bit();

    BitReader& in_;
    std::uint32_t low_ = 0;
    std::uint32_t high_ = 0xFFFFFFFFU;
    std::uint32_t value_ = 0;
};

/// Distribution for the next symbol given the symbols coded so far.
using FrequencyProvider = std::function<FrequencyTriple(std::span<const Symbol> past)>;

std::vector<std::uint8_t> ac_encode(std::span<const Symbol> symbols, const FrequencyProvider& model,
                                    std::size_t* bit_count = nullptr);
std::vector<Symbol> ac_decode(std::span<const std::uint8_t> bytes, std::size_t count,
                              const FrequencyProvider& model, std::size_t bit_count = SIZE_MAX);

} // namespace contour
