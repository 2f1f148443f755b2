#include "contour/geometry.hpp"
#include "contour/mask.hpp"
#include "contour/synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace contour;

namespace {

DccContour make(GridPoint start, Direction d, std::string_view syms) { return {start, d, parse_symbols(syms)}; }

BinaryMask mask_of(int w, int h, std::initializer_list<std::pair<int, int>> pixels) {
    BinaryMask m(w, h);
    for (auto [x, y] : pixels) m.set(x, y);
    return m;
}

} // namespace

TEST(Rotate, HandEnumeratedTable) {
    // Reference table from the independent oracle script.
    const std::map<std::string, char> table{
        {"Nl", 'W'}, {"Ns", 'N'}, {"Nr", 'E'}, {"El", 'N'}, {"Es", 'E'}, {"Er", 'S'},
        {"Sl", 'E'}, {"Ss", 'S'}, {"Sr", 'W'}, {"Wl", 'S'}, {"Ws", 'W'}, {"Wr", 'N'},
    };
    for (const auto& [key, want] : table) {
        const auto got = rotate(direction_from_char(key[0]), symbol_from_char(key[1]));
        EXPECT_EQ(to_char(got), want) << key;
    }
}

TEST(Rotate, GroupProperties) {
    for (Direction d : kDirections) {
        EXPECT_EQ(rotate(d, Symbol::S), d);
        EXPECT_EQ(rotate(rotate(d, Symbol::L), Symbol::R), d);
        EXPECT_EQ(rotate(rotate(d, Symbol::R), Symbol::L), d);
        Direction l = d;
        Direction r = d;
        for (int i = 0; i < 4; ++i) {
            l = rotate(l, Symbol::L);
            r = rotate(r, Symbol::R);
        }
        EXPECT_EQ(l, d);
        EXPECT_EQ(r, d);
    }
    EXPECT_EQ(rotate(Direction::N, Symbol::L), Direction::W);
    EXPECT_EQ(rotate(Direction::E, Symbol::S), Direction::E);
    EXPECT_EQ(rotate(Direction::S, Symbol::R), Direction::W);
}

TEST(DccEdges, ReferenceString) {
    const auto c = make({0, 0}, Direction::E, "srsllsrlrslrssrlss");
    const auto edges = dcc_to_edges(c);
    ASSERT_EQ(edges.size(), 19U);
    const std::vector<GridPoint> want{{1, 0},   {2, 0},   {2, 1},   {2, 2},   {3, 2},   {3, 1},   {3, 0},
                                      {4, 0},   {4, -1},  {5, -1},  {6, -1},  {6, -2},  {7, -2},  {8, -2},
                                      {9, -2},  {9, -1},  {10, -1}, {11, -1}, {12, -1}};
    EXPECT_EQ(endpoints(c), want);
    EXPECT_EQ(edges_to_dcc(edges), c);
    EXPECT_EQ(to_string(edges_to_dcc(edges).symbols), "srsllsrlrslrssrlss");
}

TEST(DccEdges, StraightRun) {
    const auto edges = dcc_to_edges(make({0, 0}, Direction::E, "ss"));
    ASSERT_EQ(edges.size(), 3U);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(edges[static_cast<std::size_t>(i)].end, (GridPoint{i + 1, 0}));
        EXPECT_EQ(edges[static_cast<std::size_t>(i)].dir, Direction::E);
    }
}

TEST(DccEdges, RandomRoundtrip) {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const auto c = random_contour(uniform_below(rng, 200), rng);
        const auto edges = dcc_to_edges(c);
        ASSERT_EQ(edges.size(), c.symbols.size() + 1);
        for (std::size_t k = 1; k < edges.size(); ++k)
            ASSERT_EQ(squared_distance(edges[k - 1].end, edges[k].end), 1);
        ASSERT_EQ(edges_to_dcc(edges), c);
    }
}

TEST(DccEdges, SingleEdgeAndErrors) {
    const std::vector<Edge> one{{{1, 0}, Direction::E}};
    const auto c = edges_to_dcc(one);
    EXPECT_TRUE(c.symbols.empty());
    EXPECT_EQ(c.start, (GridPoint{0, 0}));

    const std::vector<Edge> reversal{{{1, 0}, Direction::E}, {{0, 0}, Direction::W}};
    EXPECT_THROW(edges_to_dcc(reversal), FormatError);
    const std::vector<Edge> gap{{{1, 0}, Direction::E}, {{3, 0}, Direction::E}};
    EXPECT_THROW(edges_to_dcc(gap), FormatError);
    EXPECT_THROW(edges_to_dcc(std::vector<Edge>{}), FormatError);
}

TEST(Trace, SinglePixelSquare) {
    const auto cs = trace_mask(mask_of(1, 1, {{0, 0}}));
    ASSERT_EQ(cs.size(), 1U);
    EXPECT_EQ(cs[0].edge_count(), 4U);
    EXPECT_EQ(format_contour(cs[0]), "0,0 E rrr");
    EXPECT_TRUE(is_closed(cs[0]));
}

TEST(Trace, HorizontalBarHasSixEdges) {
    // Hand enumeration: E, E, S, W, W, N around the two pixels.
    const auto cs = trace_mask(mask_of(2, 1, {{0, 0}, {1, 0}}));
    ASSERT_EQ(cs.size(), 1U);
    EXPECT_EQ(cs[0].edge_count(), 6U);
    EXPECT_EQ(format_contour(cs[0]), "0,0 E srrsr");
}

TEST(Trace, TrominoMatchesOracle) {
    const auto cs = trace_mask(mask_of(2, 2, {{0, 0}, {0, 1}, {1, 1}}));
    ASSERT_EQ(cs.size(), 1U);
    EXPECT_EQ(format_contour(cs[0]), "0,0 E rlrrsrs");
}

TEST(Trace, DisjointAndDiagonalPixels) {
    EXPECT_EQ(trace_mask(mask_of(4, 1, {{0, 0}, {3, 0}})).size(), 2U);
    // Corner contact does not join 4-connected regions.
    const auto diag = trace_mask(mask_of(2, 2, {{0, 0}, {1, 1}}));
    ASSERT_EQ(diag.size(), 2U);
    for (const auto& c : diag) EXPECT_EQ(c.edge_count(), 4U);
}

TEST(Trace, HoleGivesSecondContour) {
    BinaryMask m(3, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x)
            if (x != 1 || y != 1) m.set(x, y);
    const auto cs = trace_mask(m);
    ASSERT_EQ(cs.size(), 2U);
    EXPECT_EQ(cs[0].edge_count(), 12U);
    EXPECT_EQ(cs[1].edge_count(), 4U);
    EXPECT_EQ(cs[1].start, (GridPoint{1, 1}));
}

TEST(Trace, EmptyMask) { EXPECT_TRUE(trace_mask(BinaryMask(5, 5)).empty()); }

TEST(Trace, SuiteContoursAreClosedAndCoverEveryBoundaryEdge) {
    for (const auto& m : synthetic_mask_suite(3)) {
        const auto cs = trace_mask(m);
        std::size_t boundary = 0;
        for (int y = 0; y < m.height(); ++y)
            for (int x = 0; x < m.width(); ++x)
                if (m.at(x, y))
                    boundary += !m.at(x - 1, y) + !m.at(x + 1, y) + !m.at(x, y - 1) + !m.at(x, y + 1);
        std::size_t edges = 0;
        for (const auto& c : cs) {
            EXPECT_TRUE(is_closed(c));
            edges += c.edge_count();
        }
        EXPECT_EQ(edges, boundary);
    }
}

TEST(Distance, Basics) {
    const auto c = make({0, 0}, Direction::E, "sss");
    EXPECT_EQ(min_distance({2, 0}, c), 0.0);
    // The start point is not an endpoint; the nearest one is (1, 0).
    EXPECT_EQ(min_distance({-1, 0}, c), 2.0);
    EXPECT_DOUBLE_EQ(min_distance({2, 2}, c), 2.0);
}

TEST(Distance, MatchesExhaustiveScan) {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto c = random_contour(1 + uniform_below(rng, 60), rng);
        const auto pts = endpoints(c);
        const GridPoint p{static_cast<std::int32_t>(uniform_below(rng, 130)),
                          static_cast<std::int32_t>(uniform_below(rng, 130))};
        double best = 1e300;
        for (auto q : pts) best = std::min(best, std::hypot(double(p.x - q.x), double(p.y - q.y)));
        EXPECT_DOUBLE_EQ(min_distance(p, c), best);
        EXPECT_EQ(min_distance(p, c) == 0.0, std::find(pts.begin(), pts.end(), p) != pts.end());
    }
}

TEST(ContourText, RoundtripAndErrors) {
    const auto c = make({3, 4}, Direction::E, "srsllsrlrslrssrlss");
    EXPECT_EQ(format_contour(c), "3,4 E srsllsrlrslrssrlss");
    EXPECT_EQ(parse_contour("3,4 E srsllsrlrslrssrlss"), c);
    EXPECT_EQ(parse_contour("0,0 N").symbols.size(), 0U);
    const std::string text = "# comment\n1,2 W lls\n\n5,6 S r\n";
    const auto all = read_contour_text(text);
    ASSERT_EQ(all.size(), 2U);
    EXPECT_EQ(read_contour_text(write_contour_text(all)), all);
    EXPECT_THROW(parse_contour("3 E ss"), FormatError);
    EXPECT_THROW(parse_contour("3,4 Q ss"), FormatError);
    EXPECT_THROW(parse_contour("3,4 E sx"), FormatError);
}
