#include "contour/mask.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <tuple>

namespace contour {

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw FormatError("mask dimensions must be nonnegative");
    bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

void BinaryMask::set(int x, int y, bool v) {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
    bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
}

bool BinaryMask::empty() const {
    return std::none_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
}

namespace {

class PbmCursor {
public:
    explicit PbmCursor(std::string_view bytes) : s_(bytes) {}

    void skip_space_and_comments() {
        while (pos_ < s_.size()) {
            const char c = s_[pos_];
            if (c == '#') {
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    int read_uint(const char* what) {
        skip_space_and_comments();
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
            throw FormatError(std::string("PBM: expected ") + what);
        long v = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            v = v * 10 + (s_[pos_] - '0');
            if (v > 1'000'000) throw FormatError(std::string("PBM: ") + what + " too large");
            ++pos_;
        }
        return static_cast<int>(v);
    }

    std::size_t pos() const { return pos_; }
    void advance(std::size_t n) { pos_ += n; }
    std::string_view rest() const { return s_.substr(std::min(pos_, s_.size())); }
    bool done() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace

BinaryMask read_pbm(std::string_view bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '1' && bytes[1] != '4'))
        throw FormatError("PBM: missing P1/P4 magic");
    const bool ascii = bytes[1] == '1';
    PbmCursor cur(bytes);
    cur.advance(2);
    const int w = cur.read_uint("width");
    const int h = cur.read_uint("height");
    BinaryMask mask(w, h);

    if (ascii) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                cur.skip_space_and_comments();
                if (cur.done()) throw FormatError("PBM: truncated raster");
                const char c = cur.peek();
                if (c != '0' && c != '1') throw FormatError("PBM: invalid raster character");
                mask.set(x, y, c == '1');
                cur.advance(1);
            }
        }
        return mask;
    }

    // Exactly one whitespace byte separates the header from packed rows.
    if (cur.done() || !std::isspace(static_cast<unsigned char>(cur.peek())))
        throw FormatError("PBM: malformed header");
    cur.advance(1);
    const std::size_t row_bytes = (static_cast<std::size_t>(w) + 7) / 8;
    const auto raster = cur.rest();
    if (raster.size() < row_bytes * static_cast<std::size_t>(h)) throw FormatError("PBM: truncated raster");
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto byte = static_cast<unsigned char>(raster[y * row_bytes + x / 8]);
            mask.set(x, y, (byte >> (7 - x % 8)) & 1U);
        }
    }
    return mask;
}

BinaryMask read_pbm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return read_pbm(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

std::string write_pbm_ascii(const BinaryMask& mask) {
    std::string out = "P1\n" + std::to_string(mask.width()) + ' ' + std::to_string(mask.height()) + '\n';
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (x) out.push_back(' ');
            out.push_back(mask.at(x, y) ? '1' : '0');
        }
        out.push_back('\n');
    }
    return out;
}

namespace {

struct SidePixels {
    GridPoint right;
    GridPoint left;
};

// Pixels on either side of the unit edge leaving vertex v in direction d.
SidePixels sides(GridPoint v, Direction d) {
    switch (d) {
    case Direction::E: return {{v.x, v.y}, {v.x, v.y - 1}};
    case Direction::S: return {{v.x - 1, v.y}, {v.x, v.y}};
    case Direction::W: return {{v.x - 1, v.y - 1}, {v.x - 1, v.y}};
    case Direction::N: return {{v.x, v.y - 1}, {v.x - 1, v.y - 1}};
    }
    return {};
}

bool is_boundary(const BinaryMask& m, GridPoint v, Direction d) {
    const auto [r, l] = sides(v, d);
    return m.at(r.x, r.y) && !m.at(l.x, l.y);
}

} // namespace

std::vector<DccContour> trace_mask(const BinaryMask& mask) {
    const int vw = mask.width() + 1;
    const int vh = mask.height() + 1;
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(vw) * vh * 4, 0);
    auto edge_id = [vw](GridPoint v, Direction d) {
        return (static_cast<std::size_t>(v.y) * vw + v.x) * 4 + static_cast<std::size_t>(d);
    };

    std::vector<DccContour> out;
    for (int y = 0; y < vh; ++y) {
        for (int x = 0; x < vw; ++x) {
            for (Direction d0 : kDirections) {
                const GridPoint v0{x, y};
                if (visited[edge_id(v0, d0)] || !is_boundary(mask, v0, d0)) continue;

                // Walk the loop; tails[i] is where edge i starts.
                std::vector<GridPoint> tails;
                std::vector<Direction> dirs;
                GridPoint v = v0;
                Direction d = d0;
                do {
                    visited[edge_id(v, d)] = 1;
                    tails.push_back(v);
                    dirs.push_back(d);
                    v = step(v, d);
                    // Right turn first keeps diagonal pixels in separate regions.
                    bool found = false;
                    for (Symbol s : {Symbol::R, Symbol::S, Symbol::L}) {
                        const Direction nd = rotate(d, s);
                        if (is_boundary(mask, v, nd)) {
                            d = nd;
                            found = true;
                            break;
                        }
                    }
                    if (!found) throw Error("trace_mask: open boundary (internal error)");
                } while (!(v == v0 && d == d0));

                std::size_t first = 0;
                for (std::size_t i = 1; i < tails.size(); ++i) {
                    const auto key = std::tuple(tails[i].y, tails[i].x, static_cast<int>(dirs[i]));
                    const auto best =
                        std::tuple(tails[first].y, tails[first].x, static_cast<int>(dirs[first]));
                    if (key < best) first = i;
                }
                std::vector<Edge> edges;
                edges.reserve(tails.size());
                for (std::size_t k = 0; k < tails.size(); ++k) {
                    const std::size_t i = (first + k) % tails.size();
                    edges.push_back({step(tails[i], dirs[i]), dirs[i]});
                }
                out.push_back(edges_to_dcc(edges));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const DccContour& a, const DccContour& b) {
        return std::tuple(a.start.y, a.start.x, static_cast<int>(a.initial)) <
               std::tuple(b.start.y, b.start.x, static_cast<int>(b.initial));
    });
    return out;
}

} // namespace contour
