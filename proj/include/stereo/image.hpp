#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace stereo {

// Dense single-channel grayscale image, row-major, intensities in [0,1].
struct IntensityImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    IntensityImage() = default;
    IntensityImage(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return data.size(); }
    bool same_shape(const IntensityImage& o) const { return width == o.width && height == o.height; }
};

// Interleaved 8-bit RGB image, row-major.
struct Rgb8Image {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;  // 3 * width * height

    Rgb8Image() = default;
    Rgb8Image(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0) {}

    uint8_t* px(int x, int y) { return &data[(static_cast<size_t>(y) * width + x) * 3]; }
    const uint8_t* px(int x, int y) const { return &data[(static_cast<size_t>(y) * width + x) * 3]; }
};

// Dense per-pixel horizontal displacement field for the left view.
// Valid pixels hold finite disparity >= 0; invalid pixels are excluded
// from all metrics and statistics.
struct DisparityMap {
    int width = 0;
    int height = 0;
    std::vector<double> data;
    std::vector<uint8_t> valid;

    DisparityMap() = default;
    DisparityMap(int w, int h, double fill = 0.0, bool valid_fill = true)
        : width(w),
          height(h),
          data(static_cast<size_t>(w) * h, fill),
          valid(static_cast<size_t>(w) * h, valid_fill ? 1 : 0) {}

    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    bool is_valid(int x, int y) const { return valid[static_cast<size_t>(y) * width + x] != 0; }
    void set_valid(int x, int y, bool v) { valid[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
    size_t size() const { return data.size(); }
    bool same_shape(const DisparityMap& o) const { return width == o.width && height == o.height; }
};

// Per-pixel depth in meters; invalid where the source disparity was
// invalid or zero.
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<double> data;
    std::vector<uint8_t> valid;

    DepthMap() = default;
    DepthMap(int w, int h)
        : width(w),
          height(h),
          data(static_cast<size_t>(w) * h, 0.0),
          valid(static_cast<size_t>(w) * h, 0) {}

    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    bool is_valid(int x, int y) const { return valid[static_cast<size_t>(y) * width + x] != 0; }
};

// Generic per-pixel scalar field (cost maps, gradients, error maps).
struct ScalarField {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    ScalarField() = default;
    ScalarField(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return data.size(); }
};

// Rectified pinhole pair: focal length in pixels, baseline in meters.
struct CameraCalib {
    double focal = 0.0;
    double baseline = 0.0;

    void validate() const {
        if (!(focal > 0.0) || !(baseline > 0.0))
            throw std::invalid_argument("CameraCalib: focal and baseline must be positive");
    }
};

}  // namespace stereo
