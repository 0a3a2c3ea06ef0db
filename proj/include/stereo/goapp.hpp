#pragma once

#include "stereo/geometry.hpp"
#include "stereo/image.hpp"

namespace stereo {

// Occlusion-aware post-processing: per row, the leading run of
// non-visible columns is filled right-to-left from the mean of the n
// columns to its right, then remaining Occluded pixels are overwritten
// left-to-right with the mean of their n nearest visible-or-filled left
// neighbors. Visible pixels are never modified; rows without a single
// visible pixel pass through unchanged. When fewer than n usable
// neighbors exist the mean runs over those available.
DisparityMap goapp(const DisparityMap& disp, const OcclusionMask& mask, int n = 10);

}  // namespace stereo
