#pragma once

#include <string>

#include "stereo/image.hpp"

namespace stereo {

// PFM ("Pf", single channel, float32). Rows are stored bottom-up in the
// file and normalized to top-down in memory; the scale sign selects the
// byte order. NaN/Inf and negative values map to invalid disparities.
DisparityMap read_pfm_disparity(const std::string& path);
IntensityImage read_pfm_image(const std::string& path);  // values clamped to [0,1]
void write_pfm(const DisparityMap& map, const std::string& path);   // invalid -> NaN
void write_pfm(const IntensityImage& img, const std::string& path);
void write_pfm(const ScalarField& field, const std::string& path);  // loss-map inspection

// KITTI disparity PNG: 16-bit single-channel, disparity = stored / 256,
// stored value 0 means invalid. Write requires all valid disparities < 256.
DisparityMap read_kitti_disparity_png(const std::string& path);
void write_kitti_disparity_png(const DisparityMap& map, const std::string& path);

// 8-bit PNG helpers. read_rgb8 accepts gray/palette/alpha variants and
// normalizes to interleaved RGB; the gray8 pair is strict single-channel.
Rgb8Image read_png_rgb8(const std::string& path);
void write_png_rgb8(const Rgb8Image& img, const std::string& path);
std::vector<uint8_t> read_png_gray8(const std::string& path, int& width, int& height);
void write_png_gray8(const uint8_t* data, int width, int height, const std::string& path);
void write_png_gray8(const IntensityImage& img, const std::string& path);  // x255, rounded

// Rec.601 luma: (0.299 R + 0.587 G + 0.114 B) / 255, clamped to [0,1].
IntensityImage to_grayscale(const Rgb8Image& rgb);

}  // namespace stereo
