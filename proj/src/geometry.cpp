#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "stereo/geometry.hpp"
#include "stereo/imgio.hpp"

namespace stereo {

namespace {

// Both detection paths must quantize identically, so the bin index lives
// in one place: targets t = u - d fall into bins of width `tol`.
inline long long target_bin(double target, double tol) {
    return static_cast<long long>(std::floor(target / tol));
}

void check_tolerance(double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("occlusion_mask: bin_tolerance must be > 0");
}

}  // namespace

size_t OcclusionMask::count(Label l) const {
    size_t n = 0;
    for (Label v : label)
        if (v == l) ++n;
    return n;
}

OcclusionMask occlusion_mask_bruteforce(const DisparityMap& disp, double bin_tolerance) {
    check_tolerance(bin_tolerance);
    OcclusionMask mask(disp.width, disp.height);
    for (int y = 0; y < disp.height; ++y) {
        for (int u1 = 0; u1 < disp.width; ++u1) {
            if (!disp.is_valid(u1, y)) {
                mask.at(u1, y) = Label::Occluded;
                continue;
            }
            const double d1 = disp.at(u1, y);
            if (d1 - u1 > 0.0) {
                mask.at(u1, y) = Label::Exclusive;
                continue;
            }
            const long long bin1 = target_bin(u1 - d1, bin_tolerance);
            Label l = Label::Visible;
            for (int u2 = u1 + 1; u2 < disp.width; ++u2) {
                if (!disp.is_valid(u2, y)) continue;
                if (target_bin(u2 - disp.at(u2, y), bin_tolerance) == bin1) {
                    l = Label::Occluded;
                    break;
                }
            }
            mask.at(u1, y) = l;
        }
    }
    return mask;
}

OcclusionMask occlusion_mask(const DisparityMap& disp, double bin_tolerance) {
    check_tolerance(bin_tolerance);
    OcclusionMask mask(disp.width, disp.height);
    std::unordered_set<long long> bins;
    for (int y = 0; y < disp.height; ++y) {
        bins.clear();
        // Right-to-left: `bins` holds the targets of all pixels right of u1,
        // so a hit means some u2 > u1 collides.
        for (int u1 = disp.width - 1; u1 >= 0; --u1) {
            if (!disp.is_valid(u1, y)) {
                mask.at(u1, y) = Label::Occluded;
                continue;
            }
            const double d1 = disp.at(u1, y);
            const long long bin1 = target_bin(u1 - d1, bin_tolerance);
            if (d1 - u1 > 0.0)
                mask.at(u1, y) = Label::Exclusive;
            else
                mask.at(u1, y) = bins.count(bin1) ? Label::Occluded : Label::Visible;
            bins.insert(bin1);
        }
    }
    return mask;
}

DepthMap disparity_to_depth(const DisparityMap& disp, const CameraCalib& calib, double cap) {
    calib.validate();
    DepthMap depth(disp.width, disp.height);
    const double fb = calib.focal * calib.baseline;
    for (size_t i = 0; i < disp.size(); ++i) {
        if (!disp.valid[i] || disp.data[i] <= 0.0) continue;
        depth.data[i] = std::min(fb / disp.data[i], cap);
        depth.valid[i] = 1;
    }
    return depth;
}

OcclusionStats occlusion_stats(const DisparityMap& pred, const DisparityMap& gt,
                               const OcclusionMask& mask) {
    if (!pred.same_shape(gt) || mask.width != gt.width || mask.height != gt.height)
        throw std::invalid_argument("occlusion_stats: shape mismatch");

    double err_occ = 0.0, err_vis = 0.0;
    size_t n_occ = 0, n_vis = 0;
    for (size_t i = 0; i < gt.size(); ++i) {
        if (!gt.valid[i] || !pred.valid[i]) continue;
        const double e = std::abs(pred.data[i] - gt.data[i]);
        if (mask.label[i] == Label::Occluded) {
            err_occ += e;
            ++n_occ;
        } else {
            err_vis += e;
            ++n_vis;
        }
    }

    OcclusionStats s;
    s.n_occluded = n_occ;
    s.n_visible = n_vis;
    s.mean_error_occluded = n_occ ? err_occ / n_occ : 0.0;
    s.mean_error_visible = n_vis ? err_vis / n_vis : 0.0;
    const double total_err = err_occ + err_vis;
    const size_t total_n = n_occ + n_vis;
    s.total_error_share_occluded = total_err > 0.0 ? err_occ / total_err : 0.0;
    s.area_share_occluded = total_n ? static_cast<double>(n_occ) / total_n : 0.0;
    return s;
}

void write_mask_png(const OcclusionMask& mask, const std::string& path) {
    std::vector<uint8_t> bytes(mask.size());
    for (size_t i = 0; i < bytes.size(); ++i) {
        switch (mask.label[i]) {
            case Label::Visible: bytes[i] = 255; break;
            case Label::Exclusive: bytes[i] = 128; break;
            case Label::Occluded: bytes[i] = 0; break;
        }
    }
    write_png_gray8(bytes.data(), mask.width, mask.height, path);
}

OcclusionMask read_mask_png(const std::string& path) {
    int w, h;
    const std::vector<uint8_t> bytes = read_png_gray8(path, w, h);
    OcclusionMask mask(w, h);
    for (size_t i = 0; i < bytes.size(); ++i) {
        switch (bytes[i]) {
            case 255: mask.label[i] = Label::Visible; break;
            case 128: mask.label[i] = Label::Exclusive; break;
            case 0: mask.label[i] = Label::Occluded; break;
            default:
                throw std::runtime_error("mask png: unexpected pixel value in " + path +
                                         " (expected 0, 128 or 255)");
        }
    }
    return mask;
}

}  // namespace stereo
