#pragma once

#include "stereo/image.hpp"

namespace stereo {

// Left image recovered from the right view plus its pointwise derivative
// with respect to disparity. Out-of-range samples are clamped to the edge
// and flagged; the derivative is piecewise constant between integer sample
// columns, taking the left-limit at exact integer coordinates.
struct ReconstructionResult {
    IntensityImage image;          // recovered left view
    std::vector<uint8_t> in_bounds;
    ScalarField ddisp;             // d(recovered)/d(disparity) per pixel

    bool sample_in_bounds(int x, int y) const {
        return in_bounds[static_cast<size_t>(y) * image.width + x] != 0;
    }
};

// Standard bilinear interpolation of the four neighbors; coordinates are
// clamped to the image rectangle, exact at integer coordinates.
double bilinear_sample(const IntensityImage& img, double x, double y);

// recovered(u,v) = bilinear_sample(right, u - d(u,v), v).
ReconstructionResult reconstruct_left(const IntensityImage& right, const DisparityMap& disp);

// Elementwise |left - recovered|.
ScalarField reconstruction_error_map(const IntensityImage& left, const IntensityImage& recon);

}  // namespace stereo
