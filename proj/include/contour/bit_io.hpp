#pragma once

#include "contour/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace contour {

/// Raised for any malformed, truncated or mismatched encoded stream.
class DecodeError : public Error {
public:
    using Error::Error;
};

/// MSB-first bit packer.
class BitWriter {
public:
    void put_bit(bool bit);
    /// Writes the low `count` bits of `value`, most significant first.
    void put_bits(std::uint64_t value, unsigned count);
    void put_unary(std::uint64_t ones);

    std::size_t bit_count() const { return bits_; }
    /// Zero-pads the last byte.
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }
    std::vector<std::uint8_t> release() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t bits_ = 0;
};

/// MSB-first bit reader over a byte span. Reading past the end throws
/// DecodeError, unless via `get_bit_or_zero`, which tolerates a bounded
/// overrun for arithmetic decoder lookahead.
class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> bytes, std::size_t bit_limit = SIZE_MAX);

    bool get_bit();
    std::uint64_t get_bits(unsigned count);
    std::uint64_t get_unary(std::uint64_t max_ones);
    bool get_bit_or_zero();

    std::size_t position() const { return pos_; }
    std::size_t limit() const { return limit_; }
    std::size_t remaining() const { return pos_ < limit_ ? limit_ - pos_ : 0; }
    std::size_t overrun() const { return pos_ > limit_ ? pos_ - limit_ : 0; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t limit_;
    std::size_t pos_ = 0;
};

} // namespace contour
