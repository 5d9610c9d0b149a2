#include "isar/render.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>

#include "isar/error.hpp"

namespace isar {

GrayImage render_magnitude(const ComplexImage& image, double dynamic_range_db) {
    if (!(dynamic_range_db > 0.0) || !std::isfinite(dynamic_range_db)) {
        throw Error("render", "dynamic range must be positive");
    }
    double peak = 0.0;
    for (const auto& z : image.pixels.data()) peak = std::max(peak, std::abs(z));
    if (!(peak > 0.0)) throw Error("render", "image is all zero; there is no peak to normalize by");

    GrayImage out;
    out.height = image.pixels.rows();
    out.width = image.pixels.cols();
    out.pixels.reserve(image.pixels.data().size());
    for (const auto& z : image.pixels.data()) {
        const double mag = std::abs(z);
        if (mag == 0.0) {
            out.pixels.push_back(0);
            continue;
        }
        const double level = 255.0 * (20.0 * std::log10(mag / peak) + dynamic_range_db) / dynamic_range_db;
        out.pixels.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(level, 0.0, 255.0))));
    }
    return out;
}

void write_png(const GrayImage& image, const std::filesystem::path& path) {
    std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.string().c_str(), "wb"), &std::fclose);
    if (!file) throw Error("render", "cannot create '" + path.string() + "'");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw Error("render", "cannot initialize PNG writer");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("render", "PNG encoding failed for '" + path.string() + "'");
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int r = 0; r < image.height; ++r) {
        png_write_row(png, image.pixels.data() + static_cast<std::size_t>(r * image.width));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace isar
