#pragma once

#include "contour/arithmetic_coder.hpp"
#include "contour/bit_io.hpp"
#include "contour/context_tree.hpp"
#include "contour/geometry.hpp"
#include "contour/training.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace contour {

struct EncodedImage {
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    std::vector<DccContour> contours;
};

/// A trained tree prepared for coding: quantized frequencies per node and
/// the hash that binds bitstreams to this exact model.
class CodingModel {
public:
    explicit CodingModel(TrainedModel model);

    const TrainedModel& model() const { return model_; }
    const ContextTree& tree() const { return model_.tree; }
    double beta() const { return model_.params.beta; }
    std::uint64_t hash() const { return hash_; }

    /// Node matched by a chronological past (history of the current contour).
    std::int32_t node_for(std::span<const Symbol> past) const { return model_.tree.match_past(past); }
    const FrequencyTriple& frequencies(std::int32_t node) const {
        return freq_[static_cast<std::size_t>(node)];
    }
    const FrequencyTriple& frequencies(std::span<const Symbol> past) const {
        return frequencies(node_for(past));
    }
    Probabilities probabilities(std::span<const Symbol> past) const {
        return node_probabilities(model_.tree, node_for(past), beta());
    }

private:
    TrainedModel model_;
    std::vector<FrequencyTriple> freq_;
    std::uint64_t hash_ = 0;
};

/// Starting points, one axis difference-coded.
///
/// Layout: 1-bit axis flag (0 = x sorted), Rice parameter k in
/// fixed_width(ceil_log2(dim)) bits, first sorted value in fixed_width(dim)
/// bits, Rice-coded ascending differences, then the other coordinate of each
/// point in fixed_width(other_dim) bits. The cheaper axis is used.
struct StartingPointPlan {
    bool y_axis = false;
    unsigned k = 0;
    std::uint64_t bits = 0;
    /// Input indices in coding order.
    std::vector<std::size_t> order;
};

StartingPointPlan plan_starting_points(std::span<const GridPoint> points, std::uint16_t width, std::uint16_t height);
void encode_starting_points(BitWriter& out, std::span<const GridPoint> points, const StartingPointPlan& plan,
                            std::uint16_t width, std::uint16_t height);
std::vector<GridPoint> decode_starting_points(BitReader& in, std::size_t count, std::uint16_t width,
                                              std::uint16_t height);
/// Cost of writing both coordinates fixed-length, for comparison.
std::uint64_t fixed_starting_point_bits(std::size_t count, std::uint16_t width, std::uint16_t height);

enum class LongContourPolicy { Fail, Split };

struct EncodeOptions {
    LongContourPolicy long_contours = LongContourPolicy::Fail;
};

struct EncodeReport {
    std::size_t header_bits = 0;          ///< magic, dimensions, count, hash
    std::size_t starting_point_bits = 0;
    std::size_t contour_header_bits = 0;  ///< direction + length fields
    std::size_t payload_bits = 0;         ///< arithmetic stream
    std::size_t trailer_bits = 0;         ///< byte padding + checksum
    std::size_t total_symbols = 0;
    /// Payload bits attributed to each coded contour, in coding order. The
    /// two terminating bits belong to the last contour. Sums to payload_bits.
    std::vector<std::size_t> contour_payload_bits;
    /// Contours as coded (split and reordered), i.e. what decoding returns.
    std::vector<DccContour> coded_contours;

    double bits_per_symbol() const {
        return total_symbols ? static_cast<double>(payload_bits) / static_cast<double>(total_symbols) : 0.0;
    }
    std::size_t total_bits() const {
        return header_bits + starting_point_bits + contour_header_bits + payload_bits + trailer_bits;
    }
};

/// Container, MSB-first: "CTC1", u16 width, u16 height, u16 contour count,
/// u64 model hash, starting-point block, per contour 2-bit initial direction
/// and u16 symbol count, one arithmetic payload over all contours (history
/// reset at each contour), zero padding, u32 CRC-32 of all preceding bytes.
/// Contours are emitted in starting-point coding order.
std::vector<std::uint8_t> encode_image(const EncodedImage& image, const CodingModel& model,
                                       EncodeReport* report = nullptr, const EncodeOptions& options = {});

struct DecodeOptions {
    bool verify_checksum = true;
    std::size_t max_total_symbols = std::size_t{1} << 26;
};

EncodedImage decode_image(std::span<const std::uint8_t> bytes, const CodingModel& model,
                          const DecodeOptions& options = {});

/// Same contours irrespective of order.
bool same_contours(std::span<const DccContour> a, std::span<const DccContour> b);

} // namespace contour
