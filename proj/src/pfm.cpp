#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>

#include "stereo/imgio.hpp"

namespace stereo {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

constexpr bool kHostLittleEndian = std::endian::native == std::endian::little;

void swap_bytes(float& v) {
    uint32_t u;
    std::memcpy(&u, &v, 4);
    u = ((u & 0xff000000u) >> 24) | ((u & 0x00ff0000u) >> 8) | ((u & 0x0000ff00u) << 8) |
        ((u & 0x000000ffu) << 24);
    std::memcpy(&v, &u, 4);
}

// Reads a whitespace-delimited token, skipping PFM '#' comments.
std::string read_token(std::FILE* f) {
    std::string tok;
    int c;
    while ((c = std::fgetc(f)) != EOF) {
        if (c == '#') {
            while ((c = std::fgetc(f)) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    if (tok.empty()) throw std::runtime_error("pfm: truncated header");
    return tok;
}

// Returns top-down row-major float samples.
std::vector<float> read_pfm_raw(const std::string& path, int& width, int& height) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw std::runtime_error("pfm: cannot open " + path);

    const std::string magic = read_token(f.get());
    if (magic == "PF")
        throw std::runtime_error("pfm: color 'PF' not supported, expected single-channel 'Pf': " + path);
    if (magic != "Pf") throw std::runtime_error("pfm: bad magic '" + magic + "' in " + path);

    int w, h;
    double scale;
    try {
        w = std::stoi(read_token(f.get()));
        h = std::stoi(read_token(f.get()));
        scale = std::stod(read_token(f.get()));
    } catch (const std::exception&) {
        throw std::runtime_error("pfm: malformed header in " + path);
    }
    if (w <= 0 || h <= 0) throw std::runtime_error("pfm: bad dimensions in " + path);
    const bool file_little = scale < 0.0;

    std::vector<float> vals(static_cast<size_t>(w) * h);
    // Data rows are bottom-up; flip while reading.
    for (int y = h - 1; y >= 0; --y) {
        if (std::fread(&vals[static_cast<size_t>(y) * w], sizeof(float), w, f.get()) !=
            static_cast<size_t>(w))
            throw std::runtime_error("pfm: truncated data in " + path);
    }
    if (file_little != kHostLittleEndian)
        for (float& v : vals) swap_bytes(v);

    width = w;
    height = h;
    return vals;
}

void write_pfm_raw(const float* vals, int width, int height, const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw std::runtime_error("pfm: cannot open " + path + " for writing");
    const double scale = kHostLittleEndian ? -1.0 : 1.0;
    std::fprintf(f.get(), "Pf\n%d %d\n%g\n", width, height, scale);
    for (int y = height - 1; y >= 0; --y) {
        if (std::fwrite(&vals[static_cast<size_t>(y) * width], sizeof(float), width, f.get()) !=
            static_cast<size_t>(width))
            throw std::runtime_error("pfm: write failed for " + path);
    }
}

}  // namespace

DisparityMap read_pfm_disparity(const std::string& path) {
    int w, h;
    const std::vector<float> vals = read_pfm_raw(path, w, h);
    DisparityMap map(w, h);
    for (size_t i = 0; i < vals.size(); ++i) {
        const float v = vals[i];
        if (std::isfinite(v) && v >= 0.0f) {
            map.data[i] = v;
            map.valid[i] = 1;
        } else {
            map.data[i] = 0.0;
            map.valid[i] = 0;
        }
    }
    return map;
}

IntensityImage read_pfm_image(const std::string& path) {
    int w, h;
    const std::vector<float> vals = read_pfm_raw(path, w, h);
    IntensityImage img(w, h);
    for (size_t i = 0; i < vals.size(); ++i) {
        const float v = vals[i];
        img.data[i] = std::isfinite(v) ? std::clamp(static_cast<double>(v), 0.0, 1.0) : 0.0;
    }
    return img;
}

void write_pfm(const DisparityMap& map, const std::string& path) {
    std::vector<float> vals(map.size());
    for (size_t i = 0; i < vals.size(); ++i)
        vals[i] = map.valid[i] ? static_cast<float>(map.data[i])
                               : std::numeric_limits<float>::quiet_NaN();
    write_pfm_raw(vals.data(), map.width, map.height, path);
}

void write_pfm(const IntensityImage& img, const std::string& path) {
    std::vector<float> vals(img.size());
    for (size_t i = 0; i < vals.size(); ++i) vals[i] = static_cast<float>(img.data[i]);
    write_pfm_raw(vals.data(), img.width, img.height, path);
}

void write_pfm(const ScalarField& field, const std::string& path) {
    std::vector<float> vals(field.size());
    for (size_t i = 0; i < vals.size(); ++i) vals[i] = static_cast<float>(field.data[i]);
    write_pfm_raw(vals.data(), field.width, field.height, path);
}

}  // namespace stereo
