#include "contour/lossless_codec.hpp"

#include "contour/model_io.hpp"
#include "contour/rice.hpp"

#include <zlib.h>

#include <algorithm>
#include <numeric>
#include <tuple>

namespace contour {

namespace {

constexpr std::uint32_t kMagic = 0x43544331U; // "CTC1"
constexpr unsigned kLengthBits = 16;
constexpr std::size_t kMaxLength = (std::size_t{1} << kLengthBits) - 1;
constexpr std::size_t kHeaderBits = 32 + 16 + 16 + 16 + 64;
constexpr std::size_t kChecksumBytes = 4;

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
    return static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

bool in_bounds(GridPoint p, std::uint16_t width, std::uint16_t height) {
    return p.x >= 0 && p.y >= 0 && p.x <= width && p.y <= height;
}

struct AxisVariant {
    std::vector<std::size_t> order;
    RiceChoice rice;
    std::uint64_t bits = 0;
};

AxisVariant plan_axis(std::span<const GridPoint> points, bool y_axis, std::uint16_t width, std::uint16_t height) {
    const std::uint64_t dim = y_axis ? height : width;
    const std::uint64_t other_dim = y_axis ? width : height;
    auto major = [y_axis](GridPoint p) { return y_axis ? p.y : p.x; };
    auto minor = [y_axis](GridPoint p) { return y_axis ? p.x : p.y; };

    AxisVariant v;
    v.order.resize(points.size());
    std::iota(v.order.begin(), v.order.end(), std::size_t{0});
    std::stable_sort(v.order.begin(), v.order.end(), [&](std::size_t a, std::size_t b) {
        return std::pair(major(points[a]), minor(points[a])) < std::pair(major(points[b]), minor(points[b]));
    });
    std::vector<std::uint64_t> diffs;
    diffs.reserve(points.size());
    for (std::size_t i = 1; i < v.order.size(); ++i)
        diffs.push_back(static_cast<std::uint64_t>(major(points[v.order[i]]) - major(points[v.order[i - 1]])));
    v.rice = best_rice_k(diffs, dim);
    v.bits = 1 + fixed_width(ceil_log2(dim)) + fixed_width(dim) + v.rice.bits +
             points.size() * fixed_width(other_dim);
    return v;
}

} // namespace

CodingModel::CodingModel(TrainedModel model) : model_(std::move(model)) {
    if (!model_.tree.is_full()) throw Error("coding model tree must be full");
    freq_.reserve(model_.tree.size());
    for (std::int32_t id = 0; id < static_cast<std::int32_t>(model_.tree.size()); ++id)
        freq_.push_back(quantize(node_probabilities(model_.tree, id, beta())));
    hash_ = model_hash(model_);
}

StartingPointPlan plan_starting_points(std::span<const GridPoint> points, std::uint16_t width, std::uint16_t height) {
    StartingPointPlan plan;
    if (points.empty()) return plan;
    for (GridPoint p : points)
        if (!in_bounds(p, width, height)) throw Error("starting point outside the image lattice");
    auto x = plan_axis(points, false, width, height);
    auto y = plan_axis(points, true, width, height);
    const bool use_y = y.bits < x.bits;
    auto& best = use_y ? y : x;
    plan.y_axis = use_y;
    plan.k = best.rice.k;
    plan.bits = best.bits;
    plan.order = std::move(best.order);
    return plan;
}

void encode_starting_points(BitWriter& out, std::span<const GridPoint> points, const StartingPointPlan& plan,
                            std::uint16_t width, std::uint16_t height) {
    if (points.empty()) return;
    const std::uint64_t dim = plan.y_axis ? height : width;
    const std::uint64_t other_dim = plan.y_axis ? width : height;
    auto major = [&](GridPoint p) { return static_cast<std::uint64_t>(plan.y_axis ? p.y : p.x); };
    auto minor = [&](GridPoint p) { return static_cast<std::uint64_t>(plan.y_axis ? p.x : p.y); };

    out.put_bit(plan.y_axis);
    out.put_bits(plan.k, fixed_width(ceil_log2(dim)));
    out.put_bits(major(points[plan.order.front()]), fixed_width(dim));
    for (std::size_t i = 1; i < plan.order.size(); ++i)
        rice_encode(out, major(points[plan.order[i]]) - major(points[plan.order[i - 1]]), plan.k);
    for (auto idx : plan.order) out.put_bits(minor(points[idx]), fixed_width(other_dim));
}

std::vector<GridPoint> decode_starting_points(BitReader& in, std::size_t count, std::uint16_t width,
                                              std::uint16_t height) {
    std::vector<GridPoint> pts;
    if (count == 0) return pts;
    const bool y_axis = in.get_bit();
    const std::uint64_t dim = y_axis ? height : width;
    const std::uint64_t other_dim = y_axis ? width : height;
    const auto k = static_cast<unsigned>(in.get_bits(fixed_width(ceil_log2(dim))));
    if (k > ceil_log2(dim)) throw DecodeError("starting points: Rice parameter out of range");

    std::vector<std::uint64_t> major(count);
    major[0] = in.get_bits(fixed_width(dim));
    if (major[0] > dim) throw DecodeError("starting point outside the image");
    for (std::size_t i = 1; i < count; ++i) {
        major[i] = major[i - 1] + rice_decode(in, k, (dim >> k) + 1);
        if (major[i] > dim) throw DecodeError("starting point outside the image");
    }
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto m = in.get_bits(fixed_width(other_dim));
        if (m > other_dim) throw DecodeError("starting point outside the image");
        const auto a = static_cast<std::int32_t>(major[i]);
        const auto b = static_cast<std::int32_t>(m);
        pts.push_back(y_axis ? GridPoint{b, a} : GridPoint{a, b});
    }
    return pts;
}

std::uint64_t fixed_starting_point_bits(std::size_t count, std::uint16_t width, std::uint16_t height) {
    return count * (fixed_width(width) + fixed_width(height));
}

namespace {

std::vector<DccContour> split_long(std::span<const DccContour> contours, LongContourPolicy policy) {
    std::vector<DccContour> out;
    for (const auto& c : contours) {
        if (c.symbols.size() <= kMaxLength) {
            out.push_back(c);
            continue;
        }
        if (policy == LongContourPolicy::Fail)
            throw Error("contour has " + std::to_string(c.symbols.size()) + " symbols; the limit is " +
                        std::to_string(kMaxLength));
        // Piece boundaries absorb one turn symbol into the next initial direction.
        const auto edges = dcc_to_edges(c);
        std::size_t first = 0;
        while (first < edges.size()) {
            const std::size_t last = std::min(edges.size() - 1, first + kMaxLength);
            out.push_back(edges_to_dcc(std::span(edges).subspan(first, last - first + 1)));
            first = last + 1;
        }
    }
    return out;
}

} // namespace

std::vector<std::uint8_t> encode_image(const EncodedImage& image, const CodingModel& model, EncodeReport* report,
                                       const EncodeOptions& options) {
    auto contours = split_long(image.contours, options.long_contours);
    if (contours.size() > 0xFFFF) throw Error("too many contours for one image");
    for (const auto& c : contours) {
        if (!in_bounds(c.start, image.width, image.height)) throw Error("contour starts outside the image lattice");
        for (GridPoint p : endpoints(c))
            if (!in_bounds(p, image.width, image.height)) throw Error("contour leaves the image lattice");
    }

    std::vector<GridPoint> starts;
    starts.reserve(contours.size());
    for (const auto& c : contours) starts.push_back(c.start);
    const auto plan = plan_starting_points(starts, image.width, image.height);

    BitWriter out;
    out.put_bits(kMagic, 32);
    out.put_bits(image.width, 16);
    out.put_bits(image.height, 16);
    out.put_bits(contours.size(), 16);
    out.put_bits(model.hash(), 64);
    const std::size_t after_header = out.bit_count();

    encode_starting_points(out, starts, plan, image.width, image.height);
    const std::size_t after_starts = out.bit_count();

    std::vector<DccContour> ordered;
    ordered.reserve(contours.size());
    for (auto idx : plan.order) ordered.push_back(std::move(contours[idx]));
    for (const auto& c : ordered) {
        out.put_bits(static_cast<std::uint64_t>(c.initial), 2);
        out.put_bits(c.symbols.size(), kLengthBits);
    }
    const std::size_t after_contour_headers = out.bit_count();

    ArithmeticEncoder enc(out);
    std::vector<std::size_t> per_contour;
    per_contour.reserve(ordered.size());
    std::size_t symbols = 0;
    for (const auto& c : ordered) {
        const std::size_t before = enc.committed_bits();
        const std::span<const Symbol> s(c.symbols);
        for (std::size_t i = 0; i < s.size(); ++i) enc.encode(s[i], model.frequencies(s.first(i)));
        per_contour.push_back(enc.committed_bits() - before);
        symbols += s.size();
    }
    enc.finish();
    if (!per_contour.empty()) per_contour.back() += 2;
    const std::size_t payload_end = out.bit_count();

    auto bytes = out.release();
    const auto crc = crc32_of(bytes);
    for (int i = 3; i >= 0; --i) bytes.push_back(static_cast<std::uint8_t>(crc >> (8 * i)));

    if (report) {
        report->header_bits = after_header;
        report->starting_point_bits = after_starts - after_header;
        report->contour_header_bits = after_contour_headers - after_starts;
        report->payload_bits = payload_end - after_contour_headers;
        report->trailer_bits = bytes.size() * 8 - payload_end;
        report->total_symbols = symbols;
        report->contour_payload_bits = std::move(per_contour);
        report->coded_contours = std::move(ordered);
    }
    return bytes;
}

EncodedImage decode_image(std::span<const std::uint8_t> bytes, const CodingModel& model,
                          const DecodeOptions& options) {
    if (bytes.size() < kHeaderBits / 8 + kChecksumBytes) throw DecodeError("bitstream too short");
    const auto body = bytes.first(bytes.size() - kChecksumBytes);
    if (options.verify_checksum) {
        std::uint32_t stored = 0;
        for (std::size_t i = body.size(); i < bytes.size(); ++i) stored = (stored << 8) | bytes[i];
        if (stored != crc32_of(body)) throw DecodeError("checksum mismatch");
    }

    BitReader in(body);
    if (in.get_bits(32) != kMagic) throw DecodeError("bad magic, expected CTC1");
    EncodedImage img;
    img.width = static_cast<std::uint16_t>(in.get_bits(16));
    img.height = static_cast<std::uint16_t>(in.get_bits(16));
    const auto count = static_cast<std::size_t>(in.get_bits(16));
    if (in.get_bits(64) != model.hash()) throw DecodeError("model hash mismatch");

    const auto starts = decode_starting_points(in, count, img.width, img.height);
    if (in.remaining() < count * (2 + kLengthBits)) throw DecodeError("contour headers truncated");
    std::vector<std::pair<Direction, std::size_t>> headers;
    headers.reserve(count);
    std::size_t total = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const auto dir = static_cast<Direction>(in.get_bits(2));
        const auto n = static_cast<std::size_t>(in.get_bits(kLengthBits));
        total += n;
        headers.emplace_back(dir, n);
    }
    if (total > options.max_total_symbols) throw DecodeError("symbol count exceeds the decoder limit");

    ArithmeticDecoder dec(in);
    img.contours.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        DccContour c;
        c.start = starts[i];
        c.initial = headers[i].first;
        c.symbols.reserve(headers[i].second);
        Direction d = c.initial;
        GridPoint p = step(c.start, d);
        if (!in_bounds(p, img.width, img.height)) throw DecodeError("decoded contour leaves the image");
        for (std::size_t j = 0; j < headers[i].second; ++j) {
            const Symbol s = dec.decode(model.frequencies(std::span<const Symbol>(c.symbols)));
            c.symbols.push_back(s);
            d = rotate(d, s);
            p = step(p, d);
            if (!in_bounds(p, img.width, img.height)) throw DecodeError("decoded contour leaves the image");
        }
        img.contours.push_back(std::move(c));
    }
    // A complete payload leaves the 32-bit lookahead 23..30 bits past the end.
    if (in.overrun() + 7 < ArithmeticDecoder::kMaxOverrun) throw DecodeError("unexpected data after payload");
    return img;
}

bool same_contours(std::span<const DccContour> a, std::span<const DccContour> b) {
    if (a.size() != b.size()) return false;
    auto key = [](const DccContour& c) {
        return std::tuple(c.start.y, c.start.x, static_cast<int>(c.initial), to_string(c.symbols));
    };
    std::vector<std::tuple<int, int, int, std::string>> ka, kb;
    for (const auto& c : a) ka.push_back(key(c));
    for (const auto& c : b) kb.push_back(key(c));
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    return ka == kb;
}

} // namespace contour
