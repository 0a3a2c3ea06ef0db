#pragma once

#include <string>

#include "stereo/image.hpp"

namespace stereo {

enum class Label : uint8_t {
    Occluded = 0,   // visible in the left view, hidden in the right by a nearer surface
    Exclusive = 1,  // left of the right camera's field of view (d > u)
    Visible = 2,
};

// Per-pixel tri-state occlusion labeling derived from a left disparity map.
// The binary view is the loss mask M: Visible -> 1, everything else -> 0.
// Invalid disparity pixels are labeled Occluded and take no part in
// occluding others.
struct OcclusionMask {
    int width = 0;
    int height = 0;
    std::vector<Label> label;

    OcclusionMask() = default;
    OcclusionMask(int w, int h, Label fill = Label::Visible)
        : width(w), height(h), label(static_cast<size_t>(w) * h, fill) {}

    Label at(int x, int y) const { return label[static_cast<size_t>(y) * width + x]; }
    Label& at(int x, int y) { return label[static_cast<size_t>(y) * width + x]; }
    bool binary(int x, int y) const { return at(x, y) == Label::Visible; }
    size_t size() const { return label.size(); }

    size_t count(Label l) const;
};

// L1 disparity error statistics partitioned into occluded vs non-occluded
// pixels (exclusive pixels count as non-occluded), over valid GT pixels.
struct OcclusionStats {
    double mean_error_occluded = 0.0;
    double mean_error_visible = 0.0;
    double total_error_share_occluded = 0.0;  // occluded share of the summed L1 error
    double area_share_occluded = 0.0;         // occluded share of the evaluated area
    size_t n_occluded = 0;
    size_t n_visible = 0;
};

// Occlusion labeling from a single left disparity map. A pixel (u, v) with
// disparity d is Exclusive when d - u > 0; otherwise it is Occluded when
// another valid pixel at u2 > u in the same row has its right-image target
// u2 - d2 in the same quantization bin of width `bin_tolerance` as u - d
// (the discrete surrogate of the exact collision condition du = dd > 0).
//
// occlusion_mask_bruteforce enumerates all pixel pairs per row, O(W^2);
// occlusion_mask sweeps each row right-to-left over quantized target bins,
// O(W). Both produce identical labels on every input. Only the left
// exclusive case is defined; targets never leave the right image on the
// right for non-negative disparities.
OcclusionMask occlusion_mask_bruteforce(const DisparityMap& disp, double bin_tolerance = 1.0);
OcclusionMask occlusion_mask(const DisparityMap& disp, double bin_tolerance = 1.0);

// depth = focal * baseline / d, capped at `cap` meters; d == 0 or invalid
// yields an invalid depth pixel.
DepthMap disparity_to_depth(const DisparityMap& disp, const CameraCalib& calib, double cap = 80.0);

OcclusionStats occlusion_stats(const DisparityMap& pred, const DisparityMap& gt,
                               const OcclusionMask& mask);

// 8-bit PNG encoding: 255 = Visible, 128 = Exclusive, 0 = Occluded.
void write_mask_png(const OcclusionMask& mask, const std::string& path);
OcclusionMask read_mask_png(const std::string& path);

}  // namespace stereo
