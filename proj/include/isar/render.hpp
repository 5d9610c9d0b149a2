#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "isar/imaging.hpp"

namespace isar {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row * width + col)]; }
};

/// Log-magnitude raster: 255 at the peak, 0 at or below `dynamic_range_db`
/// under it. Rows follow image rows (range), columns cross-range.
GrayImage render_magnitude(const ComplexImage& image, double dynamic_range_db);

void write_png(const GrayImage& image, const std::filesystem::path& path);

}  // namespace isar
