#include "contour/bit_io.hpp"

#include <algorithm>

namespace contour {

void BitWriter::put_bit(bool bit) {
    if (bits_ % 8 == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80U >> (bits_ % 8));
    ++bits_;
}

void BitWriter::put_bits(std::uint64_t value, unsigned count) {
    for (unsigned i = count; i-- > 0;) put_bit((value >> i) & 1U);
}

void BitWriter::put_unary(std::uint64_t ones) {
    for (std::uint64_t i = 0; i < ones; ++i) put_bit(true);
    put_bit(false);
}

BitReader::BitReader(std::span<const std::uint8_t> bytes, std::size_t bit_limit)
    : bytes_(bytes), limit_(std::min(bit_limit, bytes.size() * 8)) {}

bool BitReader::get_bit() {
    if (pos_ >= limit_) throw DecodeError("bitstream truncated");
    const bool bit = (bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1U;
    ++pos_;
    return bit;
}

std::uint64_t BitReader::get_bits(unsigned count) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < count; ++i) v = (v << 1) | (get_bit() ? 1U : 0U);
    return v;
}

std::uint64_t BitReader::get_unary(std::uint64_t max_ones) {
    std::uint64_t ones = 0;
    while (get_bit()) {
        if (++ones > max_ones) throw DecodeError("unary code exceeds its bound");
    }
    return ones;
}

bool BitReader::get_bit_or_zero() {
    if (pos_ >= limit_) {
        ++pos_;
        return false;
    }
    return get_bit();
}

} // namespace contour
