#include <stdexcept>
#include <vector>

#include "stereo/goapp.hpp"

namespace stereo {

DisparityMap goapp(const DisparityMap& disp, const OcclusionMask& mask, int n) {
    if (n < 1) throw std::invalid_argument("goapp: neighbor count must be >= 1");
    if (mask.width != disp.width || mask.height != disp.height)
        throw std::invalid_argument("goapp: shape mismatch");

    DisparityMap out = disp;
    const int W = disp.width;

    // Fills draw only on visible or previously-filled columns, so the
    // result is a deterministic function of the visible values and the
    // pass is idempotent for a fixed mask.
    std::vector<uint8_t> usable(W);
    for (int y = 0; y < disp.height; ++y) {
        int first_visible = -1;
        for (int x = 0; x < W; ++x) {
            usable[x] = mask.at(x, y) == Label::Visible ? 1 : 0;
            if (usable[x] && first_visible < 0) first_visible = x;
        }
        if (first_visible < 0) continue;

        // Leading non-visible run, filled from the right.
        for (int x = first_visible - 1; x >= 0; --x) {
            double sum = 0.0;
            int cnt = 0;
            for (int j = x + 1; j < W && cnt < n; ++j) {
                if (!usable[j]) continue;
                sum += out.at(j, y);
                ++cnt;
            }
            out.at(x, y) = sum / cnt;
            out.set_valid(x, y, true);
            usable[x] = 1;
        }

        // Remaining occluded pixels take the mean of the n nearest usable
        // columns to their left; pixels filled here feed later ones.
        for (int x = first_visible + 1; x < W; ++x) {
            if (mask.at(x, y) != Label::Occluded) continue;
            double sum = 0.0;
            int cnt = 0;
            for (int j = x - 1; j >= 0 && cnt < n; --j) {
                if (!usable[j]) continue;
                sum += out.at(j, y);
                ++cnt;
            }
            if (cnt == 0) continue;
            out.at(x, y) = sum / cnt;
            out.set_valid(x, y, true);
            usable[x] = 1;
        }
    }
    return out;
}

}  // namespace stereo
