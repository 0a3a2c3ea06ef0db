#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "stereo/goat.hpp"
#include "stereo/imgio.hpp"

namespace stereo {

void GoatConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("goat: epochs must be >= 1");
    if (steps_per_epoch < 0) throw std::invalid_argument("goat: steps_per_epoch must be >= 0");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("goat: learning_rate must be > 0");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0))
        throw std::invalid_argument("goat: lr_decay must be in (0,1]");
    if (!(max_disp > 0.0)) throw std::invalid_argument("goat: max_disp must be > 0");
    if (!(bin_tolerance > 0.0)) throw std::invalid_argument("goat: bin_tolerance must be > 0");
    if (mask_update_every < 1) throw std::invalid_argument("goat: mask_update_every must be >= 1");
    if (init.kind == GoatInit::Kind::BlockMatch && init.patch < 1)
        throw std::invalid_argument("goat: block-match patch must be >= 1");
    loss.validate();
}

namespace {

DisparityMap block_match(const IntensityImage& left, const IntensityImage& right, int max_disp,
                         int patch) {
    const int W = left.width, H = left.height;
    if (max_disp >= W) throw std::invalid_argument("block_match: max_disp must be < image width");
    const int half = patch / 2;

    DisparityMap disp(W, H);
    for (int v = 0; v < H; ++v) {
        for (int u = 0; u < W; ++u) {
            double best_cost = std::numeric_limits<double>::infinity();
            int best_d = 0;
            for (int d = 0; d <= max_disp; ++d) {
                double cost = 0.0;
                for (int dy = -half; dy <= half; ++dy) {
                    const int y = std::clamp(v + dy, 0, H - 1);
                    for (int dx = -half; dx <= half; ++dx) {
                        const int xl = std::clamp(u + dx, 0, W - 1);
                        const int xr = std::clamp(u - d + dx, 0, W - 1);
                        cost += std::abs(left.at(xl, y) - right.at(xr, y));
                    }
                }
                if (cost < best_cost) {  // ties keep the lowest disparity
                    best_cost = cost;
                    best_d = d;
                }
            }
            disp.at(u, v) = best_d;
        }
    }
    return disp;
}

double mean_abs_error(const DisparityMap& pred, const DisparityMap& gt) {
    double sum = 0.0;
    size_t n = 0;
    for (size_t i = 0; i < gt.size(); ++i) {
        if (!gt.valid[i] || !pred.valid[i]) continue;
        sum += std::abs(pred.data[i] - gt.data[i]);
        ++n;
    }
    return n ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

DisparityMap init_disparity(const IntensityImage& left, const IntensityImage& right,
                            const GoatConfig& config) {
    config.validate();
    if (!left.same_shape(right)) throw std::invalid_argument("init_disparity: shape mismatch");
    if (config.init.kind == GoatInit::Kind::Constant)
        return DisparityMap(left.width, left.height,
                            std::clamp(config.init.constant, 0.0, config.max_disp));
    return block_match(left, right, static_cast<int>(config.max_disp), config.init.patch);
}

GoatResult goat_optimize(const IntensityImage& left, const IntensityImage& right,
                         const GoatConfig& config, const DisparityMap* gt) {
    config.validate();
    if (!left.same_shape(right)) throw std::invalid_argument("goat_optimize: shape mismatch");
    if (gt && (gt->width != left.width || gt->height != left.height))
        throw std::invalid_argument("goat_optimize: gt shape mismatch");

    GoatResult res;
    res.disp = init_disparity(left, right, config);
    const size_t npx = res.disp.size();

    OcclusionMask mask(left.width, left.height, Label::Visible);
    double lr = config.learning_rate;

    for (int epoch = 1; epoch <= config.epochs && !res.trace.diverged; ++epoch) {
        if (epoch > 1 && config.update_masks && (epoch - 2) % config.mask_update_every == 0)
            mask = occlusion_mask(res.disp, config.bin_tolerance);

        LossField field = total_loss(res.disp, left, right, mask, config.loss);
        GoatEpochStats st;
        st.epoch = epoch;
        st.loss_start = field.total;
        st.masked_fraction = 1.0 - static_cast<double>(mask.count(Label::Visible)) / npx;

        for (int step = 0; step < config.steps_per_epoch; ++step) {
            if (!std::isfinite(field.total)) {
                res.trace.diverged = true;
                break;
            }
            for (size_t i = 0; i < npx; ++i)
                res.disp.data[i] =
                    std::clamp(res.disp.data[i] - lr * field.grad.data[i], 0.0, config.max_disp);
            field = total_loss(res.disp, left, right, mask, config.loss);
        }
        st.loss_end = field.total;
        if (!std::isfinite(field.total)) res.trace.diverged = true;
        if (gt) st.epe = mean_abs_error(res.disp, *gt);
        else st.epe = std::numeric_limits<double>::quiet_NaN();

        if (!config.snapshot_dir.empty()) {
            char name[64];
            std::snprintf(name, sizeof(name), "/disp_epoch_%03d.pfm", epoch);
            st.snapshot_disp = config.snapshot_dir + name;
            write_pfm(res.disp, st.snapshot_disp);
            std::snprintf(name, sizeof(name), "/mask_epoch_%03d.png", epoch);
            st.snapshot_mask = config.snapshot_dir + name;
            write_mask_png(mask, st.snapshot_mask);
        }
        res.trace.epochs.push_back(st);
        lr *= config.lr_decay;
    }

    res.mask = occlusion_mask(res.disp, config.bin_tolerance);
    return res;
}

void write_trace(const GoatTrace& trace, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("trace: cannot open " + path + " for writing");
    f << "epoch\tloss\tmasked_fraction\tepe\n";
    f.precision(9);
    for (const GoatEpochStats& st : trace.epochs)
        f << st.epoch << '\t' << st.loss_end << '\t' << st.masked_fraction << '\t' << st.epe
          << '\n';
    if (!f) throw std::runtime_error("trace: write failed for " + path);
}

}  // namespace stereo
