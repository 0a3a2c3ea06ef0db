#pragma once

#include "stereo/geometry.hpp"
#include "stereo/image.hpp"

namespace stereo {

struct LossParams {
    double alpha = 0.8;  // SSIM share of the photometric cost, in [0,1]
    double w1 = 0.85;    // aggregated photometric weight
    double w2 = 0.15;    // smoothness weight
    int k = 16;          // aggregation half-window
    double ssim_c1 = 0.01 * 0.01;
    double ssim_c2 = 0.03 * 0.03;

    void validate() const;
};

// Per-pixel cost maps, the masked-mean scalar, and its analytic gradient
// with respect to the disparity field.
struct LossField {
    ScalarField cr;    // photometric cost
    ScalarField car;   // aggregated photometric cost
    ScalarField cs;    // smoothness cost
    double total = 0.0;
    ScalarField grad;  // d(total)/d(disparity), every pixel
};

// Windowed SSIM with 3x3 uniform local statistics and reflected borders.
ScalarField ssim_map(const IntensityImage& a, const IntensityImage& b, double c1 = 0.01 * 0.01,
                     double c2 = 0.03 * 0.03);

// alpha * (1 - SSIM)/2 + (1 - alpha) * |left - recon|.
ScalarField photometric_cost(const IntensityImage& left, const IntensityImage& recon,
                             const LossParams& params);

// Intensity-similarity-weighted window mean of `cost`: the window spans
// rows [r-k, r+k-1] and columns [c-k, c+k-1] truncated to the image, with
// weights exp(-|guide(n) - guide(p)| / 2).
ScalarField asw_aggregate(const ScalarField& cost, const IntensityImage& guide, int k);

// |dx d| * exp(-|dx I|) + |dy d| * exp(-|dy I|), forward differences,
// zero gradient on the last row/column.
ScalarField smoothness_cost(const DisparityMap& disp, const IntensityImage& left);

// Mean of w1*car + w2*cs over pixels with M = 1, where M is the mask's
// binary view restricted to valid disparities. Throws when every pixel is
// masked out.
double masked_mean_cost(const ScalarField& car, const ScalarField& cs, const OcclusionMask& mask,
                        const DisparityMap& disp, const LossParams& params);

// Full objective: cost maps, masked mean, and the exact gradient. Masked
// pixels still receive gradient through the aggregation windows and
// smoothness stencils of unmasked neighbors.
LossField total_loss(const DisparityMap& disp, const IntensityImage& left,
                     const IntensityImage& right, const OcclusionMask& mask,
                     const LossParams& params);

}  // namespace stereo
