#pragma once

#include <string>

#include "stereo/geometry.hpp"
#include "stereo/image.hpp"
#include "stereo/loss.hpp"

namespace stereo {

struct GoatInit {
    enum class Kind { Constant, BlockMatch };
    Kind kind = Kind::BlockMatch;
    double constant = 0.0;  // Constant
    int patch = 5;          // BlockMatch window side
};

struct GoatConfig {
    int epochs = 16;
    int steps_per_epoch = 15;
    double learning_rate = 3500.0;  // acts on the masked-mean gradient
    double lr_decay = 0.95;         // multiplicative, per epoch
    LossParams loss;
    double bin_tolerance = 1.0;
    double max_disp = 16.0;         // disparity clamp and matching range
    bool update_masks = true;       // false: keep every pixel in the loss (the ablation baseline)
    int mask_update_every = 1;      // epochs between mask refreshes
    GoatInit init;
    std::string snapshot_dir;       // per-epoch PFM/PNG dumps when non-empty

    void validate() const;
};

struct GoatEpochStats {
    int epoch = 0;
    double loss_start = 0.0;      // after the epoch's mask update, before stepping
    double loss_end = 0.0;        // after the epoch's steps, same mask
    double masked_fraction = 0.0; // share of pixels excluded from the loss
    double epe = 0.0;             // vs GT when supplied, else NaN
    std::string snapshot_disp;
    std::string snapshot_mask;
};

struct GoatTrace {
    std::vector<GoatEpochStats> epochs;
    bool diverged = false;
};

struct GoatResult {
    DisparityMap disp;
    OcclusionMask mask;  // recomputed from the returned disparity
    GoatTrace trace;
};

// Constant fill, or winner-take-all SAD block matching over integer
// disparities [0, max_disp] (ties keep the lowest disparity).
DisparityMap init_disparity(const IntensityImage& left, const IntensityImage& right,
                            const GoatConfig& config);

// Iterative occlusion-aware optimization of a per-image disparity field:
// epoch 1 trains on all pixels; every later epoch recomputes the occlusion
// mask from the current prediction, then runs plain gradient descent on
// the masked objective with an exponentially decaying learning rate. A
// non-finite loss aborts early with the trace flagged as diverged.
GoatResult goat_optimize(const IntensityImage& left, const IntensityImage& right,
                         const GoatConfig& config, const DisparityMap* gt = nullptr);

// Tab-separated columns: epoch, loss, masked_fraction, epe.
void write_trace(const GoatTrace& trace, const std::string& path);

}  // namespace stereo
