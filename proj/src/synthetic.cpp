#include "contour/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <span>

namespace contour {

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    if (bound <= 1) return 0;
    // Rejection keeps the draw unbiased and platform independent.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % bound;
}

MarkovSource::MarkovSource(const Matrix& transitions) : p_(transitions) {
    for (const auto& row : p_) {
        const double sum = row[0] + row[1] + row[2];
        if (std::abs(sum - 1.0) > 1e-9 || row[0] < 0 || row[1] < 0 || row[2] < 0)
            throw Error("Markov transition rows must be probability distributions");
    }
}

MarkovSource MarkovSource::outline_like() {
    return MarkovSource(Matrix{{
        {0.05, 0.55, 0.40}, // l l
        {0.10, 0.70, 0.20}, // l s
        {0.30, 0.50, 0.20}, // l r
        {0.10, 0.60, 0.30}, // s l
        {0.08, 0.84, 0.08}, // s s
        {0.30, 0.60, 0.10}, // s r
        {0.20, 0.50, 0.30}, // r l
        {0.20, 0.70, 0.10}, // r s
        {0.40, 0.55, 0.05}, // r r
    }});
}

std::array<double, 9> MarkovSource::stationary() const {
    std::array<double, 9> pi{};
    pi.fill(1.0 / 9.0);
    for (int iter = 0; iter < 100000; ++iter) {
        std::array<double, 9> next{};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c) next[3 * b + c] += pi[3 * a + b] * p_[3 * a + b][c];
        double delta = 0.0;
        for (int i = 0; i < 9; ++i) delta = std::max(delta, std::abs(next[i] - pi[i]));
        pi = next;
        if (delta < 1e-16) break;
    }
    return pi;
}

double MarkovSource::entropy_rate() const {
    const auto pi = stationary();
    double h = 0.0;
    for (int i = 0; i < 9; ++i)
        for (double p : p_[i])
            if (p > 0.0) h -= pi[i] * p * std::log2(p);
    return h;
}

namespace {

std::size_t draw(std::span<const double> probs, Rng& rng) {
    const double u = uniform01(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

} // namespace

std::vector<Symbol> MarkovSource::generate(std::size_t length, Rng& rng) const {
    std::vector<Symbol> out;
    out.reserve(length);
    const auto pi = stationary();
    const auto pair = draw(pi, rng);
    std::size_t a = pair / 3;
    std::size_t b = pair % 3;
    if (length > 0) out.push_back(static_cast<Symbol>(a));
    if (length > 1) out.push_back(static_cast<Symbol>(b));
    while (out.size() < length) {
        const auto c = draw(p_[3 * a + b], rng);
        out.push_back(static_cast<Symbol>(c));
        a = b;
        b = c;
    }
    return out;
}

namespace {

struct Canvas {
    BinaryMask mask;

    template <typename Pred>
    void paint(Pred inside, bool value = true) {
        for (int y = 0; y < mask.height(); ++y)
            for (int x = 0; x < mask.width(); ++x)
                if (inside(x + 0.5, y + 0.5)) mask.set(x, y, value);
    }
    void rect(int x0, int y0, int x1, int y1, bool value = true) {
        paint([=](double x, double y) { return x >= x0 && x < x1 && y >= y0 && y < y1; }, value);
    }
    void ellipse(double cx, double cy, double rx, double ry, double angle = 0.0, bool value = true) {
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        paint(
            [=](double x, double y) {
                const double u = (x - cx) * c + (y - cy) * s;
                const double v = -(x - cx) * s + (y - cy) * c;
                return (u * u) / (rx * rx) + (v * v) / (ry * ry) <= 1.0;
            },
            value);
    }
    void polygon(const std::vector<std::array<double, 2>>& pts, bool value = true) {
        paint(
            [&](double x, double y) {
                bool in = false;
                for (std::size_t i = 0, j = pts.size() - 1; i < pts.size(); j = i++) {
                    const auto& a = pts[i];
                    const auto& b = pts[j];
                    if ((a[1] > y) != (b[1] > y) && x < (b[0] - a[0]) * (y - a[1]) / (b[1] - a[1]) + a[0])
                        in = !in;
                }
                return in;
            },
            value);
    }
};

double between(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

std::vector<std::array<double, 2>> radial_polygon(Rng& rng, double cx, double cy, int vertices, double r_lo,
                                                  double r_hi) {
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < vertices; ++i) {
        const double t = 2.0 * std::numbers::pi * (i + between(rng, 0.0, 0.6)) / vertices;
        const double r = between(rng, r_lo, r_hi);
        pts.push_back({cx + r * std::cos(t), cy + r * std::sin(t)});
    }
    return pts;
}

} // namespace

std::vector<BinaryMask> synthetic_mask_suite(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<BinaryMask> suite;
    auto canvas = [](int w, int h) { return Canvas{BinaryMask(w, h)}; };

    { // single pixel
        auto c = canvas(4, 4);
        c.mask.set(static_cast<int>(uniform_below(rng, 4)), static_cast<int>(uniform_below(rng, 4)));
        suite.push_back(c.mask);
    }
    { // axis-aligned rectangle
        auto c = canvas(64, 48);
        const int x0 = 4 + static_cast<int>(uniform_below(rng, 10));
        const int y0 = 4 + static_cast<int>(uniform_below(rng, 10));
        c.rect(x0, y0, x0 + 20 + static_cast<int>(uniform_below(rng, 20)), y0 + 10 + static_cast<int>(uniform_below(rng, 20)));
        suite.push_back(c.mask);
    }
    { // disk
        auto c = canvas(64, 64);
        const double r = between(rng, 14, 26);
        c.ellipse(32 + between(rng, -4, 4), 32 + between(rng, -4, 4), r, r);
        suite.push_back(c.mask);
    }
    { // rotated ellipse
        auto c = canvas(80, 64);
        c.ellipse(40, 32, between(rng, 20, 34), between(rng, 8, 20), between(rng, 0, std::numbers::pi));
        suite.push_back(c.mask);
    }
    { // annulus with a hole
        auto c = canvas(64, 64);
        const double r = between(rng, 20, 28);
        c.ellipse(32, 32, r, r);
        c.ellipse(32, 32, r * 0.5, r * 0.5, 0.0, false);
        suite.push_back(c.mask);
    }
    { // two disjoint blobs
        auto c = canvas(96, 48);
        c.ellipse(24, 24, between(rng, 10, 18), between(rng, 8, 16));
        c.ellipse(72, 24, between(rng, 8, 18), between(rng, 10, 18), between(rng, 0, 3));
        suite.push_back(c.mask);
    }
    { // L shape
        auto c = canvas(64, 64);
        const int t = 8 + static_cast<int>(uniform_below(rng, 8));
        c.rect(8, 8, 8 + t, 56);
        c.rect(8, 56 - t, 56, 56);
        suite.push_back(c.mask);
    }
    { // convex polygon
        auto c = canvas(72, 72);
        c.polygon(radial_polygon(rng, 36, 36, 7, 24, 30));
        suite.push_back(c.mask);
    }
    { // star
        auto c = canvas(80, 80);
        std::vector<std::array<double, 2>> pts;
        const int arms = 5 + static_cast<int>(uniform_below(rng, 3));
        const double phase = between(rng, 0, 1);
        for (int i = 0; i < 2 * arms; ++i) {
            const double t = std::numbers::pi * (i + phase) / arms;
            const double r = i % 2 == 0 ? 34.0 : 14.0;
            pts.push_back({40 + r * std::cos(t), 40 + r * std::sin(t)});
        }
        c.polygon(pts);
        suite.push_back(c.mask);
    }
    { // scattered small squares
        auto c = canvas(64, 64);
        for (int i = 0; i < 12; ++i) {
            const int x = static_cast<int>(uniform_below(rng, 58));
            const int y = static_cast<int>(uniform_below(rng, 58));
            const int s = 2 + static_cast<int>(uniform_below(rng, 4));
            c.rect(x, y, x + s, y + s);
        }
        suite.push_back(c.mask);
    }
    { // diagonal band, a long staircase
        auto c = canvas(80, 80);
        const double w = between(rng, 5, 10);
        const double slope = between(rng, 0.4, 1.6);
        c.paint([=](double x, double y) { return std::abs(y - 40 - slope * (x - 40)) < w && x > 6 && x < 74; });
        suite.push_back(c.mask);
    }
    { // rotated rectangle
        auto c = canvas(80, 80);
        const double a = between(rng, 0.1, 1.4);
        const double ca = std::cos(a);
        const double sa = std::sin(a);
        std::vector<std::array<double, 2>> pts;
        for (auto [u, v] : {std::pair{-28.0, -12.0}, {28.0, -12.0}, {28.0, 12.0}, {-28.0, 12.0}})
            pts.push_back({40 + u * ca - v * sa, 40 + u * sa + v * ca});
        c.polygon(pts);
        suite.push_back(c.mask);
    }
    { // cross
        auto c = canvas(64, 64);
        const int t = 6 + static_cast<int>(uniform_below(rng, 8));
        c.rect(32 - t, 6, 32 + t, 58);
        c.rect(6, 32 - t, 58, 32 + t);
        suite.push_back(c.mask);
    }
    { // rectangular frame
        auto c = canvas(64, 64);
        c.rect(6, 6, 58, 58);
        const int t = 4 + static_cast<int>(uniform_below(rng, 8));
        c.rect(6 + t, 6 + t, 58 - t, 58 - t, false);
        suite.push_back(c.mask);
    }
    { // irregular blob from a jittered polygon
        auto c = canvas(80, 80);
        c.polygon(radial_polygon(rng, 40, 40, 16, 16, 34));
        suite.push_back(c.mask);
    }
    { // union of overlapping disks
        auto c = canvas(96, 64);
        for (int i = 0; i < 5; ++i) {
            const double r = between(rng, 6, 14);
            c.ellipse(between(rng, 20, 76), between(rng, 18, 46), r, r);
        }
        suite.push_back(c.mask);
    }
    return suite;
}

std::vector<DccContour> synthetic_contours(std::uint64_t seed) {
    std::vector<DccContour> out;
    for (const auto& m : synthetic_mask_suite(seed)) {
        auto cs = trace_mask(m);
        out.insert(out.end(), cs.begin(), cs.end());
    }
    return out;
}

DccContour random_contour(std::size_t length, Rng& rng) {
    DccContour c;
    const auto mid = static_cast<std::int32_t>(length + 1);
    c.start = {mid, mid};
    c.initial = static_cast<Direction>(uniform_below(rng, 4));
    c.symbols.reserve(length);
    for (std::size_t i = 0; i < length; ++i) c.symbols.push_back(static_cast<Symbol>(uniform_below(rng, 3)));
    return c;
}

} // namespace contour
