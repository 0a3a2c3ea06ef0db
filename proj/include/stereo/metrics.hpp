#pragma once

#include <string>

#include "stereo/geometry.hpp"
#include "stereo/image.hpp"

namespace stereo {

struct EvalReport {
    double abs_rel = 0.0;
    double sq_rel = 0.0;
    double rmse = 0.0;      // meters
    double rmse_log = 0.0;
    double d1_all = 0.0;    // fraction of pixels failing the 3 px / 5 % rule
    double epe = 0.0;       // mean absolute disparity error, px
    double delta1 = 0.0;    // max(y/y*, y*/y) < 1.25
    double delta2 = 0.0;    // ... < 1.25^2
    double delta3 = 0.0;    // ... < 1.25^3
    size_t n_valid = 0;
};

enum class RegionFilter { All, Visible, Occluded, Exclusive };

// Disparity and depth evaluation over pixels where both maps are valid,
// the GT disparity is positive, and the GT depth lies within the cap.
// Depth metrics run on depths derived from disparity with the cap applied
// to predictions only; D1-all and EPE are pure disparity metrics. A
// region filter restricts evaluation to one mask class (mask required
// unless All). Throws when no pixel qualifies.
EvalReport evaluate(const DisparityMap& pred, const DisparityMap& gt, const CameraCalib& calib,
                    double cap = 80.0, RegionFilter region = RegionFilter::All,
                    const OcclusionMask* mask = nullptr);

// Aligned human-readable table plus machine-readable key=value lines.
std::string format_report_table(const EvalReport& report);
std::string format_report_kv(const EvalReport& report);

}  // namespace stereo
