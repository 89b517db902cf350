#ifndef STATFUSE_IMAGE_HPP
#define STATFUSE_IMAGE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace statfuse {

/// 8-bit RGB raster, row-major, interleaved R,G,B per pixel.
/// Both dimensions must be at least 2 so that every channel has a
/// horizontal pixel pair for co-occurrence counting.
struct ImageRgb {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // width * height * 3

    ImageRgb() = default;
    ImageRgb(int w, int h);
    ImageRgb(int w, int h, std::vector<std::uint8_t> pixels);

    std::uint8_t at(int row, int col, int channel) const {
        return data[static_cast<std::size_t>(row * width + col) * 3 + channel];
    }
    std::uint8_t& at(int row, int col, int channel) {
        return data[static_cast<std::size_t>(row * width + col) * 3 + channel];
    }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

/// Decode PNG or JPEG bytes into RGB. Grayscale is expanded by channel
/// replication, alpha channels are dropped.
ImageRgb decode_image(std::span<const std::uint8_t> bytes);

ImageRgb load_image(const std::string& path);

/// Lossless PNG encoding; decode_image(encode_png(img)) == img.
std::vector<std::uint8_t> encode_png(const ImageRgb& img);

void save_png(const ImageRgb& img, const std::string& path);

/// Square bilinear resize with half-pixel-center mapping. Interpolated
/// values are rounded to the nearest integer, ties away from zero, so the
/// result stays in the 8-bit pixel model. side == width == height is an
/// exact copy.
ImageRgb resize_bilinear(const ImageRgb& img, int side);

} // namespace statfuse

#endif
