#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace contour {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed textual or raster input.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Absolute edge direction on the pixel lattice. Image frame: x grows to the
/// east, y grows to the south. Enumerated clockwise so that a right turn is +1.
enum class Direction : std::uint8_t { N = 0, E = 1, S = 2, W = 3 };

/// Relative turn between consecutive edges. Ordered l < s < r.
enum class Symbol : std::uint8_t { L = 0, S = 1, R = 2 };

inline constexpr std::array<Symbol, 3> kSymbols{Symbol::L, Symbol::S, Symbol::R};
inline constexpr std::array<Direction, 4> kDirections{Direction::N, Direction::E, Direction::S,
                                                      Direction::W};

struct GridPoint {
    std::int32_t x = 0;
    std::int32_t y = 0;

    friend constexpr bool operator==(GridPoint, GridPoint) = default;
    friend constexpr auto operator<=>(GridPoint, GridPoint) = default;
};

/// An edge is identified by its endpoint and the direction it was walked in.
struct Edge {
    GridPoint end;
    Direction dir = Direction::E;

    friend constexpr bool operator==(const Edge&, const Edge&) = default;
};

/// Starting point, absolute direction of the first edge, and the N relative
/// symbols that produce the remaining N edges.
struct DccContour {
    GridPoint start;
    Direction initial = Direction::E;
    std::vector<Symbol> symbols;

    std::size_t edge_count() const { return symbols.size() + 1; }

    friend bool operator==(const DccContour&, const DccContour&) = default;
};

constexpr Direction rotate(Direction d, Symbol s) {
    const auto v = static_cast<int>(d);
    switch (s) {
    case Symbol::L: return static_cast<Direction>((v + 3) % 4);
    case Symbol::R: return static_cast<Direction>((v + 1) % 4);
    case Symbol::S: break;
    }
    return d;
}

constexpr GridPoint step(GridPoint p, Direction d) {
    switch (d) {
    case Direction::N: return {p.x, p.y - 1};
    case Direction::E: return {p.x + 1, p.y};
    case Direction::S: return {p.x, p.y + 1};
    case Direction::W: return {p.x - 1, p.y};
    }
    return p;
}

constexpr Direction opposite(Direction d) {
    return static_cast<Direction>((static_cast<int>(d) + 2) % 4);
}

char to_char(Symbol s);
char to_char(Direction d);
Symbol symbol_from_char(char c);
Direction direction_from_char(char c);

std::string to_string(std::span<const Symbol> symbols);
std::vector<Symbol> parse_symbols(std::string_view text);

/// Edge list of a contour: entry 0 is the initial edge leaving `start`, entry
/// i is entry i-1 continued by symbols[i-1]. Always N+1 entries.
std::vector<Edge> dcc_to_edges(const DccContour& contour);

/// Endpoints of all N+1 edges, in walk order.
std::vector<GridPoint> endpoints(const DccContour& contour);

/// Inverse of dcc_to_edges. Throws FormatError on a reversal or a gap.
DccContour edges_to_dcc(std::span<const Edge> edges);

/// True when the last endpoint coincides with the start point.
bool is_closed(const DccContour& contour);

/// Squared Euclidean distance from p to the nearest edge endpoint.
std::int64_t min_squared_distance(GridPoint p, std::span<const GridPoint> points);
double min_distance(GridPoint p, const DccContour& contour);

std::int64_t squared_distance(GridPoint a, GridPoint b);

/// Contour text line: `x,y DIR symbols`.
std::string format_contour(const DccContour& contour);
DccContour parse_contour(std::string_view line);
std::vector<DccContour> read_contour_text(std::string_view text);
std::string write_contour_text(std::span<const DccContour> contours);

} // namespace contour
