#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stereo/warp.hpp"

namespace stereo {

double bilinear_sample(const IntensityImage& img, double x, double y) {
    if (img.width <= 0 || img.height <= 0)
        throw std::invalid_argument("bilinear_sample: empty image");
    x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
    const int x0 = std::min(static_cast<int>(x), img.width - 1);
    const int y0 = std::min(static_cast<int>(y), img.height - 1);
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = (1.0 - fx) * img.at(x0, y0) + fx * img.at(x1, y0);
    const double bot = (1.0 - fx) * img.at(x0, y1) + fx * img.at(x1, y1);
    return (1.0 - fy) * top + fy * bot;
}

ReconstructionResult reconstruct_left(const IntensityImage& right, const DisparityMap& disp) {
    if (right.width != disp.width || right.height != disp.height)
        throw std::invalid_argument("reconstruct_left: shape mismatch");

    ReconstructionResult res;
    res.image = IntensityImage(right.width, right.height);
    res.in_bounds.assign(right.size(), 0);
    res.ddisp = ScalarField(right.width, right.height);

    const double xmax = static_cast<double>(right.width - 1);
    for (int v = 0; v < right.height; ++v) {
        for (int u = 0; u < right.width; ++u) {
            const double sx = u - disp.at(u, v);
            const bool in = sx >= 0.0 && sx <= xmax;
            res.in_bounds[static_cast<size_t>(v) * right.width + u] = in ? 1 : 0;

            const double cx = std::clamp(sx, 0.0, xmax);
            const int x0 = std::min(static_cast<int>(cx), right.width - 1);
            const int x1 = std::min(x0 + 1, right.width - 1);
            const double fx = cx - x0;
            res.image.at(u, v) = (1.0 - fx) * right.at(x0, v) + fx * right.at(x1, v);

            // d(recovered)/dd = -d/dx of the interpolant at sx. The slope is
            // taken from the segment left of the sample point: at an exact
            // integer column k >= 1 that is [k-1, k]; beyond the clamped
            // edges the interpolant is constant, so the slope is zero.
            double slope;
            if (sx <= 0.0 || sx > xmax) {
                slope = 0.0;
            } else if (fx == 0.0) {
                slope = right.at(x0, v) - right.at(std::max(x0 - 1, 0), v);
            } else {
                slope = right.at(x1, v) - right.at(x0, v);
            }
            res.ddisp.at(u, v) = -slope;
        }
    }
    return res;
}

ScalarField reconstruction_error_map(const IntensityImage& left, const IntensityImage& recon) {
    if (!left.same_shape(recon))
        throw std::invalid_argument("reconstruction_error_map: shape mismatch");
    ScalarField err(left.width, left.height);
    for (size_t i = 0; i < err.size(); ++i) err.data[i] = std::abs(left.data[i] - recon.data[i]);
    return err;
}

}  // namespace stereo
