#include "contour/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace contour {

char to_char(Symbol s) {
    switch (s) {
    case Symbol::L: return 'l';
    case Symbol::S: return 's';
    case Symbol::R: return 'r';
    }
    return '?';
}

char to_char(Direction d) {
    switch (d) {
    case Direction::N: return 'N';
    case Direction::E: return 'E';
    case Direction::S: return 'S';
    case Direction::W: return 'W';
    }
    return '?';
}

Symbol symbol_from_char(char c) {
    switch (c) {
    case 'l': return Symbol::L;
    case 's': return Symbol::S;
    case 'r': return Symbol::R;
    default: throw FormatError(std::string("invalid DCC symbol '") + c + "'");
    }
}

Direction direction_from_char(char c) {
    switch (c) {
    case 'N': return Direction::N;
    case 'E': return Direction::E;
    case 'S': return Direction::S;
    case 'W': return Direction::W;
    default: throw FormatError(std::string("invalid direction '") + c + "'");
    }
}

std::string to_string(std::span<const Symbol> symbols) {
    std::string out;
    out.reserve(symbols.size());
    for (Symbol s : symbols) out.push_back(to_char(s));
    return out;
}

std::vector<Symbol> parse_symbols(std::string_view text) {
    std::vector<Symbol> out;
    out.reserve(text.size());
    for (char c : text) out.push_back(symbol_from_char(c));
    return out;
}

std::vector<Edge> dcc_to_edges(const DccContour& contour) {
    std::vector<Edge> edges;
    edges.reserve(contour.edge_count());
    Direction dir = contour.initial;
    GridPoint p = step(contour.start, dir);
    edges.push_back({p, dir});
    for (Symbol s : contour.symbols) {
        dir = rotate(dir, s);
        p = step(p, dir);
        edges.push_back({p, dir});
    }
    return edges;
}

std::vector<GridPoint> endpoints(const DccContour& contour) {
    std::vector<GridPoint> pts;
    pts.reserve(contour.edge_count());
    Direction dir = contour.initial;
    GridPoint p = step(contour.start, dir);
    pts.push_back(p);
    for (Symbol s : contour.symbols) {
        dir = rotate(dir, s);
        p = step(p, dir);
        pts.push_back(p);
    }
    return pts;
}

namespace {

Symbol turn_between(Direction from, Direction to) {
    const int delta = (static_cast<int>(to) - static_cast<int>(from) + 4) % 4;
    switch (delta) {
    case 0: return Symbol::S;
    case 1: return Symbol::R;
    case 3: return Symbol::L;
    default: throw FormatError("edge reverses its predecessor (180 degree turn)");
    }
}

} // namespace

DccContour edges_to_dcc(std::span<const Edge> edges) {
    if (edges.empty()) throw FormatError("edge list is empty");
    DccContour out;
    out.initial = edges.front().dir;
    out.start = step(edges.front().end, opposite(edges.front().dir));
    out.symbols.reserve(edges.size() - 1);
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (step(edges[i - 1].end, edges[i].dir) != edges[i].end)
            throw FormatError("edge " + std::to_string(i) + " is not adjacent to its predecessor");
        out.symbols.push_back(turn_between(edges[i - 1].dir, edges[i].dir));
    }
    return out;
}

bool is_closed(const DccContour& contour) {
    const auto pts = endpoints(contour);
    return pts.back() == contour.start;
}

std::int64_t squared_distance(GridPoint a, GridPoint b) {
    const std::int64_t dx = std::int64_t{a.x} - b.x;
    const std::int64_t dy = std::int64_t{a.y} - b.y;
    return dx * dx + dy * dy;
}

std::int64_t min_squared_distance(GridPoint p, std::span<const GridPoint> points) {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (GridPoint q : points) best = std::min(best, squared_distance(p, q));
    return best;
}

double min_distance(GridPoint p, const DccContour& contour) {
    const auto pts = endpoints(contour);
    return std::sqrt(static_cast<double>(min_squared_distance(p, pts)));
}

std::string format_contour(const DccContour& contour) {
    std::string line = std::to_string(contour.start.x) + ',' + std::to_string(contour.start.y) + ' ';
    line.push_back(to_char(contour.initial));
    line.push_back(' ');
    line += to_string(contour.symbols);
    return line;
}

namespace {

std::int32_t parse_int(std::string_view s, std::string_view what) {
    std::int32_t v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty())
        throw FormatError("invalid " + std::string(what) + " '" + std::string(s) + "'");
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace

DccContour parse_contour(std::string_view line) {
    line = trim(line);
    const auto sp1 = line.find(' ');
    if (sp1 == std::string_view::npos) throw FormatError("contour line lacks a direction field");
    const auto coord = line.substr(0, sp1);
    const auto comma = coord.find(',');
    if (comma == std::string_view::npos) throw FormatError("contour start must be 'x,y'");

    DccContour c;
    c.start = {parse_int(coord.substr(0, comma), "x coordinate"),
               parse_int(coord.substr(comma + 1), "y coordinate")};

    auto rest = trim(line.substr(sp1 + 1));
    const auto sp2 = rest.find(' ');
    const auto dir = rest.substr(0, sp2);
    if (dir.size() != 1) throw FormatError("direction must be one of N,E,S,W");
    c.initial = direction_from_char(dir.front());
    if (sp2 != std::string_view::npos) c.symbols = parse_symbols(trim(rest.substr(sp2 + 1)));
    return c;
}

std::vector<DccContour> read_contour_text(std::string_view text) {
    std::vector<DccContour> out;
    std::size_t pos = 0;
    std::size_t lineno = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        ++lineno;
        const auto line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        if (line.empty() || line.front() == '#') continue;
        try {
            out.push_back(parse_contour(line));
        } catch (const FormatError& e) {
            throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::string write_contour_text(std::span<const DccContour> contours) {
    std::string out;
    for (const auto& c : contours) {
        out += format_contour(c);
        out.push_back('\n');
    }
    return out;
}

} // namespace contour
