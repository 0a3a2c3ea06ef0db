#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>

#include <png.h>

#include "stereo/imgio.hpp"

namespace stereo {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors via longjmp; the handler stashes the message and
// jumps back to the setjmp point inside the calling wrapper.
void store_error(png_structp png, png_const_charp msg) {
    auto* out = static_cast<std::string*>(png_get_error_ptr(png));
    if (out && msg) *out = msg;
    png_longjmp(png, 1);
}
void ignore_warning(png_structp, png_const_charp) {}

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::string err;

    PngReader() {
        png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, store_error, ignore_warning);
        if (!png) throw std::runtime_error("png: read struct alloc failed");
        info = png_create_info_struct(png);
        if (!info) {
            png_destroy_read_struct(&png, nullptr, nullptr);
            throw std::runtime_error("png: info struct alloc failed");
        }
    }
    ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
    PngReader(const PngReader&) = delete;
    PngReader& operator=(const PngReader&) = delete;
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::string err;

    PngWriter() {
        png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, store_error, ignore_warning);
        if (!png) throw std::runtime_error("png: write struct alloc failed");
        info = png_create_info_struct(png);
        if (!info) {
            png_destroy_write_struct(&png, nullptr);
            throw std::runtime_error("png: info struct alloc failed");
        }
    }
    ~PngWriter() { png_destroy_write_struct(&png, &info); }
    PngWriter(const PngWriter&) = delete;
    PngWriter& operator=(const PngWriter&) = delete;
};

struct PngHeader {
    int width = 0;
    int height = 0;
    int bit_depth = 0;
    int color_type = 0;
};

// Reads the whole image. When normalize_rgb8 is set the output is 8-bit
// interleaved RGB regardless of the source layout; otherwise rows come
// back in the file's native layout and `header` describes it.
std::vector<uint8_t> read_png(const std::string& path, bool normalize_rgb8, PngHeader& header) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw std::runtime_error("png: cannot open " + path);
    PngReader r;

    std::vector<uint8_t> bytes;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(r.png)))
        throw std::runtime_error("png: " + path + ": " + (r.err.empty() ? "decode error" : r.err));

    png_init_io(r.png, f.get());
    png_read_info(r.png, r.info);
    header.bit_depth = png_get_bit_depth(r.png, r.info);
    header.color_type = png_get_color_type(r.png, r.info);

    if (normalize_rgb8) {
        png_set_expand(r.png);
        png_set_strip_16(r.png);
        png_set_strip_alpha(r.png);
        png_set_gray_to_rgb(r.png);
        png_read_update_info(r.png, r.info);
    }
    header.width = static_cast<int>(png_get_image_width(r.png, r.info));
    header.height = static_cast<int>(png_get_image_height(r.png, r.info));
    const size_t stride = png_get_rowbytes(r.png, r.info);
    if (normalize_rgb8 && png_get_channels(r.png, r.info) != 3)
        throw std::runtime_error("png: cannot normalize " + path + " to RGB");

    bytes.resize(stride * header.height);
    rows.resize(header.height);
    for (int y = 0; y < header.height; ++y) rows[y] = bytes.data() + static_cast<size_t>(y) * stride;
    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);
    return bytes;
}

void write_png(const std::string& path, const uint8_t* data, int width, int height, int bit_depth,
               int color_type, size_t stride) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw std::runtime_error("png: cannot open " + path + " for writing");
    PngWriter w;

    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(data + static_cast<size_t>(y) * stride);

    if (setjmp(png_jmpbuf(w.png)))
        throw std::runtime_error("png: " + path + ": " + (w.err.empty() ? "encode error" : w.err));

    png_init_io(w.png, f.get());
    png_set_IHDR(w.png, w.info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    png_write_image(w.png, rows.data());
    png_write_end(w.png, nullptr);
}

}  // namespace

DisparityMap read_kitti_disparity_png(const std::string& path) {
    PngHeader hdr;
    const std::vector<uint8_t> bytes = read_png(path, false, hdr);
    if (hdr.bit_depth != 16 || hdr.color_type != PNG_COLOR_TYPE_GRAY)
        throw std::runtime_error("png: " + path + " is not a 16-bit single-channel disparity image");

    DisparityMap map(hdr.width, hdr.height);
    for (size_t i = 0; i < map.size(); ++i) {
        // PNG 16-bit samples are big-endian.
        const uint16_t stored = static_cast<uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]);
        if (stored == 0) {
            map.valid[i] = 0;
        } else {
            map.data[i] = stored / 256.0;
        }
    }
    return map;
}

void write_kitti_disparity_png(const DisparityMap& map, const std::string& path) {
    std::vector<uint8_t> bytes(map.size() * 2, 0);
    for (size_t i = 0; i < map.size(); ++i) {
        if (!map.valid[i]) continue;
        const double scaled = std::round(map.data[i] * 256.0);
        if (scaled >= 65536.0)
            throw std::invalid_argument("kitti png: disparity out of range (must be < 256 px)");
        const uint16_t stored = static_cast<uint16_t>(scaled);
        bytes[2 * i] = static_cast<uint8_t>(stored >> 8);
        bytes[2 * i + 1] = static_cast<uint8_t>(stored & 0xff);
    }
    write_png(path, bytes.data(), map.width, map.height, 16, PNG_COLOR_TYPE_GRAY,
              static_cast<size_t>(map.width) * 2);
}

Rgb8Image read_png_rgb8(const std::string& path) {
    PngHeader hdr;
    std::vector<uint8_t> bytes = read_png(path, true, hdr);
    Rgb8Image img(hdr.width, hdr.height);
    img.data = std::move(bytes);
    return img;
}

void write_png_rgb8(const Rgb8Image& img, const std::string& path) {
    write_png(path, img.data.data(), img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
              static_cast<size_t>(img.width) * 3);
}

std::vector<uint8_t> read_png_gray8(const std::string& path, int& width, int& height) {
    PngHeader hdr;
    std::vector<uint8_t> bytes = read_png(path, false, hdr);
    if (hdr.bit_depth != 8 || hdr.color_type != PNG_COLOR_TYPE_GRAY)
        throw std::runtime_error("png: " + path + " is not an 8-bit single-channel image");
    width = hdr.width;
    height = hdr.height;
    return bytes;
}

void write_png_gray8(const uint8_t* data, int width, int height, const std::string& path) {
    write_png(path, data, width, height, 8, PNG_COLOR_TYPE_GRAY, static_cast<size_t>(width));
}

void write_png_gray8(const IntensityImage& img, const std::string& path) {
    std::vector<uint8_t> bytes(img.size());
    for (size_t i = 0; i < bytes.size(); ++i)
        bytes[i] = static_cast<uint8_t>(std::clamp(std::lround(img.data[i] * 255.0), 0L, 255L));
    write_png_gray8(bytes.data(), img.width, img.height, path);
}

IntensityImage to_grayscale(const Rgb8Image& rgb) {
    IntensityImage img(rgb.width, rgb.height);
    for (size_t i = 0; i < img.size(); ++i) {
        const uint8_t* p = &rgb.data[i * 3];
        const double luma = (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
        img.data[i] = std::clamp(luma, 0.0, 1.0);
    }
    return img;
}

}  // namespace stereo
