#pragma once

#include "contour/geometry.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace contour {

/// W x H binary raster, row-major, 1 = foreground.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }

    /// Out-of-range reads are background.
    bool at(int x, int y) const {
        if (x < 0 || y < 0 || x >= width_ || y >= height_) return false;
        return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
    }
    void set(int x, int y, bool v = true);

    bool empty() const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Reads P1 (ASCII) or P4 (packed binary) portable bitmaps. Throws FormatError.
BinaryMask read_pbm(std::string_view bytes);
BinaryMask read_pbm_file(const std::string& path);
std::string write_pbm_ascii(const BinaryMask& mask);

/// Boundary tracing of 4-connected foreground regions.
///
/// Every boundary between foreground and background pixels is walked with
/// the foreground on the right-hand side, so outer boundaries run clockwise
/// on screen and hole boundaries counter-clockwise. Each contour starts at
/// the smallest (y, x) lattice corner of its boundary. Contours are returned
/// sorted by (start.y, start.x, initial direction). The closing edge is
/// included, so the last endpoint equals the start point.
std::vector<DccContour> trace_mask(const BinaryMask& mask);

} // namespace contour
