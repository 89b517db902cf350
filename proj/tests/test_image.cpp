#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "statfuse/error.hpp"
#include "statfuse/image.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <jpeglib.h>

using namespace statfuse;

namespace {

std::vector<std::uint8_t> encode_jpeg_fixture(const std::vector<std::uint8_t>& pixels, int w,
                                              int h, int components) {
    jpeg_compress_struct cinfo;
    jpeg_error_mgr jerr;
    cinfo.err = jpeg_std_error(&jerr);
    jpeg_create_compress(&cinfo);

    unsigned char* buffer = nullptr;
    unsigned long size = 0;
    jpeg_mem_dest(&cinfo, &buffer, &size);

    cinfo.image_width = w;
    cinfo.image_height = h;
    cinfo.input_components = components;
    cinfo.in_color_space = components == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, 100, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = const_cast<JSAMPROW>(pixels.data() +
                                            static_cast<std::size_t>(cinfo.next_scanline) * w *
                                                components);
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    std::vector<std::uint8_t> out(buffer, buffer + size);
    free(buffer);
    jpeg_destroy_compress(&cinfo);
    return out;
}

ImageRgb constant_image(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    ImageRgb img(w, h);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        img.data[i * 3 + 0] = r;
        img.data[i * 3 + 1] = g;
        img.data[i * 3 + 2] = b;
    }
    return img;
}

// Scalar reference: evaluate the bilinear formula at one output pixel.
double bilinear_reference(const ImageRgb& img, int side, int row, int col, int ch) {
    const double sx = static_cast<double>(img.width) / side;
    const double sy = static_cast<double>(img.height) / side;
    double x = std::clamp((col + 0.5) * sx - 0.5, 0.0, img.width - 1.0);
    double y = std::clamp((row + 0.5) * sy - 0.5, 0.0, img.height - 1.0);
    int x0 = static_cast<int>(std::floor(x));
    int y0 = static_cast<int>(std::floor(y));
    int x1 = std::min(x0 + 1, img.width - 1);
    int y1 = std::min(y0 + 1, img.height - 1);
    double fx = x - x0;
    double fy = y - y0;
    double v = img.at(y0, x0, ch) * (1 - fx) * (1 - fy) + img.at(y0, x1, ch) * fx * (1 - fy) +
               img.at(y1, x0, ch) * (1 - fx) * fy + img.at(y1, x1, ch) * fx * fy;
    return v;
}

} // namespace

TEST_CASE("png round-trip of a constant image") {
    ImageRgb img = constant_image(2, 2, 10, 20, 30);
    ImageRgb back = decode_image(encode_png(img));
    CHECK(back.width == 2);
    CHECK(back.height == 2);
    CHECK(back.data == img.data);
}

TEST_CASE("decode rejects degenerate sizes") {
    CHECK_THROWS_AS(ImageRgb(1, 1), InputError);
    CHECK_THROWS_AS(ImageRgb(1, 5), InputError);
    CHECK_THROWS_AS(resize_bilinear(constant_image(4, 4, 0, 0, 0), 1), InputError);
}

TEST_CASE("decoding a 1x1 png reports DegenerateSize") {
    const std::vector<std::uint8_t> kOneByOnePng = {
        137, 80, 78,  71, 13, 10, 26,  10,  0,  0,   0,   13,  73, 72, 68, 82, 0,
        0,   0,  1,   0,  0,  0,  1,   8,   2,  0,   0,   0,   144, 119, 83, 222, 0,
        0,   0,  12,  73, 68, 65, 84,  120, 156, 99, 224, 228, 228, 4,  0,  0,  58,
        0,   28, 237, 8,  155, 142, 0,  0,   0,  0,   73,  69,  78, 68, 174, 66, 96, 130};
    CHECK_THROWS_WITH_AS(decode_image(kOneByOnePng), doctest::Contains("DegenerateSize"),
                         InputError);
}

TEST_CASE("grayscale png expands by channel replication") {
    const std::vector<std::uint8_t> kGray77Png = {
        137, 80,  78, 71,  13,  10, 26, 10,  0,   0,  0,   13,  73,  72, 68, 82, 0,
        0,   0,   2,  0,   0,   0,  2,  8,   0,   0,  0,   0,   87,  221, 82, 248, 0,
        0,   0,   14, 73,  68,  65, 84, 120, 156, 99, 240, 245, 101, 240, 245, 5, 0,
        3,   162, 1,  53,  240, 86, 141, 35, 0,   0,  0,   0,   73,  69, 78, 68, 174,
        66,  96,  130};
    ImageRgb img = decode_image(kGray77Png);
    REQUIRE(img.width == 2);
    REQUIRE(img.height == 2);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        CHECK(img.data[i * 3 + 0] == 77);
        CHECK(img.data[i * 3 + 1] == 77);
        CHECK(img.data[i * 3 + 2] == 77);
    }
}

TEST_CASE("decode rejects unsupported and corrupt input") {
    std::vector<std::uint8_t> garbage = {'n', 'o', 't', 'a', 'n', 'i', 'm', 'a', 'g', 'e'};
    CHECK_THROWS_WITH_AS(decode_image(garbage), doctest::Contains("UnsupportedFormat"),
                         InputError);

    std::vector<std::uint8_t> truncated = encode_png(constant_image(4, 4, 1, 2, 3));
    truncated.resize(truncated.size() / 2);
    CHECK_THROWS_AS(decode_image(truncated), InputError);
}

TEST_CASE("jpeg decode handles color and grayscale") {
    std::vector<std::uint8_t> rgb(4 * 4 * 3);
    for (std::size_t i = 0; i < rgb.size(); i += 3) {
        rgb[i] = 120;
        rgb[i + 1] = 130;
        rgb[i + 2] = 140;
    }
    ImageRgb color = decode_image(encode_jpeg_fixture(rgb, 4, 4, 3));
    REQUIRE(color.width == 4);
    // JPEG is lossy; a flat image survives with at most small quantization error.
    for (int ch = 0; ch < 3; ++ch) {
        CHECK(std::abs(color.at(0, 0, ch) - (120 + 10 * ch)) <= 3);
    }

    std::vector<std::uint8_t> gray(4 * 4, 200);
    ImageRgb expanded = decode_image(encode_jpeg_fixture(gray, 4, 4, 1));
    for (std::size_t i = 0; i < expanded.pixel_count(); ++i) {
        CHECK(expanded.data[i * 3] == expanded.data[i * 3 + 1]);
        CHECK(expanded.data[i * 3 + 1] == expanded.data[i * 3 + 2]);
    }
}

TEST_CASE("png round-trip of random pixels is exact") {
    std::mt19937 rng(42);
    ImageRgb img(7, 5);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng() & 0xFF);
    ImageRgb back = decode_image(encode_png(img));
    CHECK(back.data == img.data);
}

TEST_CASE("resize of a constant image stays constant") {
    ImageRgb img = constant_image(9, 5, 42, 7, 199);
    ImageRgb out = resize_bilinear(img, 224);
    REQUIRE(out.width == 224);
    REQUIRE(out.height == 224);
    bool all_equal = true;
    for (std::size_t i = 0; i < out.pixel_count(); ++i) {
        all_equal &= out.data[i * 3] == 42 && out.data[i * 3 + 1] == 7 && out.data[i * 3 + 2] == 199;
    }
    CHECK(all_equal);
}

TEST_CASE("identity resize is bitwise identical") {
    std::mt19937 rng(7);
    ImageRgb img(224, 224);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng() & 0xFF);
    ImageRgb out = resize_bilinear(img, 224);
    CHECK(out.data == img.data);
}

TEST_CASE("4x4 checkerboard downsample matches the scalar reference") {
    ImageRgb img(4, 4);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            std::uint8_t v = (r + c) % 2 == 0 ? 255 : 0;
            for (int ch = 0; ch < 3; ++ch) img.at(r, c, ch) = v;
        }
    }
    ImageRgb out = resize_bilinear(img, 2);
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            for (int ch = 0; ch < 3; ++ch) {
                const double expected = bilinear_reference(img, 2, r, c, ch);
                CHECK(out.at(r, c, ch) == static_cast<std::uint8_t>(std::lround(expected)));
            }
        }
    }
}

TEST_CASE("resize of random images keeps the 8-bit range and matches the reference") {
    std::mt19937 rng(123);
    for (int trial = 0; trial < 20; ++trial) {
        const int w = 2 + static_cast<int>(rng() % 12);
        const int h = 2 + static_cast<int>(rng() % 12);
        ImageRgb img(w, h);
        for (auto& v : img.data) v = static_cast<std::uint8_t>(rng() & 0xFF);
        const int side = 2 + static_cast<int>(rng() % 16);
        ImageRgb out = resize_bilinear(img, side);
        for (int r = 0; r < side; ++r) {
            for (int c = 0; c < side; ++c) {
                for (int ch = 0; ch < 3; ++ch) {
                    // The output must be a nearest-integer rounding of the exact
                    // blend; at half-integer ties either neighbour is a correct
                    // rounding under floating point, hence the epsilon.
                    const double expected = bilinear_reference(img, side, r, c, ch);
                    REQUIRE(std::abs(out.at(r, c, ch) - expected) <= 0.5 + 1e-9);
                }
            }
        }
    }
}
