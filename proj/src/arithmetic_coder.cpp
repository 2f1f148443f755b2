#include "contour/arithmetic_coder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace contour {

namespace {

constexpr std::uint32_t kHalf = 0x80000000U;
constexpr std::uint32_t kQuarter = 0x40000000U;
constexpr std::uint32_t kThreeQuarters = 0xC0000000U;

struct Interval {
    std::uint32_t lo;
    std::uint32_t hi;
};

Interval cumulative(const FrequencyTriple& f, Symbol s) {
    const auto i = static_cast<std::size_t>(s);
    std::uint32_t lo = 0;
    for (std::size_t k = 0; k < i; ++k) lo += f.freq[k];
    return {lo, lo + f.freq[i]};
}

} // namespace

FrequencyTriple quantize(const Probabilities& p) {
    FrequencyTriple f;
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto v = std::llround(p[i] * static_cast<double>(kFrequencyTotal));
        f.freq[i] = static_cast<std::uint32_t>(std::max<long long>(1, v));
        sum += f.freq[i];
    }
    const auto largest = static_cast<std::size_t>(std::max_element(f.freq.begin(), f.freq.end()) - f.freq.begin());
    const std::int64_t adjusted = static_cast<std::int64_t>(f.freq[largest]) + (kFrequencyTotal - sum);
    if (adjusted < 1) throw std::invalid_argument("quantize: not a probability distribution");
    f.freq[largest] = static_cast<std::uint32_t>(adjusted);
    return f;
}

void ArithmeticEncoder::emit(bool bit) {
    out_.put_bit(bit);
    for (; pending_ > 0; --pending_) out_.put_bit(!bit);
}

void ArithmeticEncoder::encode(Symbol s, const FrequencyTriple& f) {
    const auto [clo, chi] = cumulative(f, s);
    const std::uint64_t total = f.total();
    const std::uint64_t range = std::uint64_t{high_} - low_ + 1;
    high_ = static_cast<std::uint32_t>(low_ + range * chi / total - 1);
    low_ = static_cast<std::uint32_t>(low_ + range * clo / total);
    for (;;) {
        if (high_ < kHalf) {
            emit(false);
        } else if (low_ >= kHalf) {
            emit(true);
            low_ -= kHalf;
            high_ -= kHalf;
        } else if (low_ >= kQuarter && high_ < kThreeQuarters) {
            ++pending_;
            low_ -= kQuarter;
            high_ -= kQuarter;
        } else {
            break;
        }
        low_ <<= 1;
        high_ = (high_ << 1) | 1U;
        ++committed_;
    }
}

void ArithmeticEncoder::finish() {
    if (finished_) return;
    finished_ = true;
    ++pending_;
    emit(low_ >= kQuarter);
    committed_ += 2;
}

ArithmeticDecoder::ArithmeticDecoder(BitReader& in) : in_(in) {
    for (int i = 0; i < 32; ++i) value_ = (value_ << 1) | (next_bit() ? 1U : 0U);
}

bool ArithmeticDecoder::next_bit() {
    const bool bit = in_.get_bit_or_zero();
    if (in_.overrun() > kMaxOverrun) throw DecodeError("arithmetic payload truncated");
    return bit;
}

Symbol ArithmeticDecoder::decode(const FrequencyTriple& f) {
    const std::uint64_t total = f.total();
    const std::uint64_t range = std::uint64_t{high_} - low_ + 1;
    const std::uint64_t target = ((std::uint64_t{value_} - low_ + 1) * total - 1) / range;
    Symbol s = Symbol::R;
    if (target < f.freq[0]) {
        s = Symbol::L;
    } else if (target < std::uint64_t{f.freq[0]} + f.freq[1]) {
        s = Symbol::S;
    } else if (target >= total) {
        throw DecodeError("arithmetic decoder out of range");
    }
    const auto [clo, chi] = cumulative(f, s);
    high_ = static_cast<std::uint32_t>(low_ + range * chi / total - 1);
    low_ = static_cast<std::uint32_t>(low_ + range * clo / total);
    for (;;) {
        if (high_ < kHalf) {
            // nothing to subtract
        } else if (low_ >= kHalf) {
            low_ -= kHalf;
            high_ -= kHalf;
            value_ -= kHalf;
        } else if (low_ >= kQuarter && high_ < kThreeQuarters) {
            low_ -= kQuarter;
            high_ -= kQuarter;
            value_ -= kQuarter;
        } else {
            break;
        }
        low_ <<= 1;
        high_ = (high_ << 1) | 1U;
        value_ = (value_ << 1) | (next_bit() ? 1U : 0U);
    }
    return s;
}

std::vector<std::uint8_t> ac_encode(std::span<const Symbol> symbols, const FrequencyProvider& model,
                                    std::size_t* bit_count) {
    BitWriter out;
    ArithmeticEncoder enc(out);
    for (std::size_t i = 0; i < symbols.size(); ++i) enc.encode(symbols[i], model(symbols.first(i)));
    enc.finish();
    if (bit_count) *bit_count = out.bit_count();
    return out.release();
}

std::vector<Symbol> ac_decode(std::span<const std::uint8_t> bytes, std::size_t count,
                              const FrequencyProvider& model, std::size_t bit_count) {
    BitReader in(bytes, bit_count);
    ArithmeticDecoder dec(in);
    std::vector<Symbol> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(dec.decode(model(out)));
    return out;
}

} // namespace contour
