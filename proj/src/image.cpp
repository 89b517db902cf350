#include "statfuse/image.hpp"
#include "statfuse/error.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <jpeglib.h>

namespace statfuse {

namespace {

void check_dimensions(int w, int h) {
    if (w < 2 || h < 2) {
        throw InputError("DegenerateSize",
                         "image must be at least 2x2, got " + std::to_string(w) + "x" +
                             std::to_string(h));
    }
}

} // namespace

ImageRgb::ImageRgb(int w, int h) : width(w), height(h) {
    check_dimensions(w, h);
    data.assign(static_cast<std::size_t>(w) * h * 3, 0);
}

ImageRgb::ImageRgb(int w, int h, std::vector<std::uint8_t> pixels)
    : width(w), height(h), data(std::move(pixels)) {
    check_dimensions(w, h);
    if (data.size() != static_cast<std::size_t>(w) * h * 3) {
        throw InputError("CorruptImage", "pixel buffer size does not match dimensions");
    }
}

// ---------------------------------------------------------------- PNG decode

namespace {

struct PngReadState {
    const std::uint8_t* cursor;
    std::size_t remaining;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t n) {
    auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (state->remaining < n) {
        png_error(png, "unexpected end of PNG stream");
    }
    std::memcpy(out, state->cursor, n);
    state->cursor += n;
    state->remaining -= n;
}

ImageRgb decode_png(std::span<const std::uint8_t> bytes) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw NumericError("CorruptImage", "failed to allocate PNG reader");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw NumericError("CorruptImage", "failed to allocate PNG info");
    }

    std::vector<std::uint8_t> pixels;
    std::vector<png_bytep> row_pointers;
    int width = 0, height = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw InputError("CorruptImage", "failed to decode PNG stream");
    }

    PngReadState state{bytes.data(), bytes.size()};
    png_set_read_fn(png, &state, png_mem_read);
    png_read_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);

    // Canonicalize everything to 8-bit RGB; alpha is dropped, not composited.
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) {
        png_set_tRNS_to_alpha(png);
        png_set_strip_alpha(png);
    }
    png_read_update_info(png, info);

    if (png_get_rowbytes(png, info) != static_cast<std::size_t>(width) * 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw InputError("CorruptImage", "PNG did not normalize to 8-bit RGB");
    }

    pixels.resize(static_cast<std::size_t>(width) * height * 3);
    row_pointers.resize(height);
    for (int r = 0; r < height; ++r) {
        row_pointers[r] = pixels.data() + static_cast<std::size_t>(r) * width * 3;
    }
    png_read_image(png, row_pointers.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    check_dimensions(width, height);
    return ImageRgb(width, height, std::move(pixels));
}

// --------------------------------------------------------------- JPEG decode

struct JpegErrorMgr {
    jpeg_error_mgr base;
    std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    std::longjmp(mgr->jump, 1);
}

ImageRgb decode_jpeg(std::span<const std::uint8_t> bytes) {
    jpeg_decompress_struct cinfo;
    JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;

    std::vector<std::uint8_t> pixels;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw InputError("CorruptImage", "failed to decode JPEG stream");
    }

    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB; // grayscale inputs expand to replicated channels
    jpeg_start_decompress(&cinfo);

    const int width = static_cast<int>(cinfo.output_width);
    const int height = static_cast<int>(cinfo.output_height);
    if (cinfo.output_components != 3) {
        jpeg_destroy_decompress(&cinfo);
        throw InputError("CorruptImage", "JPEG did not decode to RGB");
    }

    pixels.resize(static_cast<std::size_t>(width) * height * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);

    check_dimensions(width, height);
    return ImageRgb(width, height, std::move(pixels));
}

} // namespace

ImageRgb decode_image(std::span<const std::uint8_t> bytes) {
    static const std::uint8_t png_magic[4] = {0x89, 'P', 'N', 'G'};
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), png_magic, 4) == 0) {
        return decode_png(bytes);
    }
    if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
        return decode_jpeg(bytes);
    }
    throw InputError("UnsupportedFormat", "input is neither PNG nor JPEG");
}

ImageRgb load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("IoError", "cannot open image file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_image(bytes);
}

// ------------------------------------------------------------------ PNG encode

std::vector<std::uint8_t> encode_png(const ImageRgb& img) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw NumericError("IoError", "failed to allocate PNG writer");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw NumericError("IoError", "failed to allocate PNG info");
    }

    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw NumericError("IoError", "failed to encode PNG");
    }

    png_set_write_fn(
        png, &out,
        [](png_structp p, png_bytep data, png_size_t n) {
            auto* buf = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(p));
            buf->insert(buf->end(), data, data + n);
        },
        nullptr);

    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int r = 0; r < img.height; ++r) {
        png_write_row(png, const_cast<png_bytep>(img.data.data() +
                                                 static_cast<std::size_t>(r) * img.width * 3));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

void save_png(const ImageRgb& img, const std::string& path) {
    const std::vector<std::uint8_t> bytes = encode_png(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("IoError", "cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("IoError", "failed to write: " + path);
}

// ---------------------------------------------------------------------- resize

ImageRgb resize_bilinear(const ImageRgb& img, int side) {
    if (side < 2) throw InputError("DegenerateSize", "resize side must be >= 2");

    ImageRgb out(side, side);
    const double sx = static_cast<double>(img.width) / side;
    const double sy = static_cast<double>(img.height) / side;

    for (int r = 0; r < side; ++r) {
        const double src_y = (r + 0.5) * sy - 0.5;
        const double yc = std::clamp(src_y, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(std::floor(yc));
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double fy = yc - y0;
        for (int c = 0; c < side; ++c) {
            const double src_x = (c + 0.5) * sx - 0.5;
            const double xc = std::clamp(src_x, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(std::floor(xc));
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double fx = xc - x0;
            for (int ch = 0; ch < 3; ++ch) {
                const double top = img.at(y0, x0, ch) * (1.0 - fx) + img.at(y0, x1, ch) * fx;
                const double bottom = img.at(y1, x0, ch) * (1.0 - fx) + img.at(y1, x1, ch) * fx;
                const double v = top * (1.0 - fy) + bottom * fy;
                out.at(r, c, ch) = static_cast<std::uint8_t>(std::lround(v));
            }
        }
    }
    return out;
}

} // namespace statfuse
