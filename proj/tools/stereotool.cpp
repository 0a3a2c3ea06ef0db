#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "stereo/geometry.hpp"
#include "stereo/goapp.hpp"
#include "stereo/goat.hpp"
#include "stereo/imgio.hpp"
#include "stereo/loss.hpp"
#include "stereo/metrics.hpp"
#include "stereo/synth.hpp"
#include "stereo/warp.hpp"

namespace {

using namespace stereo;

std::string extension(const std::string& path) {
    return std::filesystem::path(path).extension().string();
}

DisparityMap read_disparity(const std::string& path, const std::string& format) {
    std::string fmt = format;
    if (fmt == "auto") {
        const std::string ext = extension(path);
        if (ext == ".pfm") fmt = "pfm";
        else if (ext == ".png") fmt = "png";
        else throw std::runtime_error("cannot infer disparity format of " + path +
                                      " (use --format)");
    }
    return fmt == "pfm" ? read_pfm_disparity(path) : read_kitti_disparity_png(path);
}

void write_disparity(const DisparityMap& disp, const std::string& path) {
    if (extension(path) == ".png") write_kitti_disparity_png(disp, path);
    else write_pfm(disp, path);
}

IntensityImage read_intensity(const std::string& path) {
    if (extension(path) == ".pfm") return read_pfm_image(path);
    return to_grayscale(read_png_rgb8(path));
}

void write_intensity(const IntensityImage& img, const std::string& path) {
    if (extension(path) == ".png") write_png_gray8(img, path);
    else write_pfm(img, path);
}

void write_field(const ScalarField& field, const std::string& path) {
    if (extension(path) == ".png") {
        IntensityImage img(field.width, field.height);
        for (size_t i = 0; i < img.size(); ++i) img.data[i] = std::clamp(field.data[i], 0.0, 1.0);
        write_png_gray8(img, path);
    } else {
        write_pfm(field, path);
    }
}

GoatConfig load_goat_config(const std::string& path) {
    GoatConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config " + path);
    const nlohmann::json j = nlohmann::json::parse(f);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.steps_per_epoch = j.value("steps_per_epoch", cfg.steps_per_epoch);
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.lr_decay = j.value("lr_decay", cfg.lr_decay);
    cfg.bin_tolerance = j.value("bin_tolerance", cfg.bin_tolerance);
    cfg.max_disp = j.value("max_disp", cfg.max_disp);
    cfg.update_masks = j.value("update_masks", cfg.update_masks);
    cfg.mask_update_every = j.value("mask_update_every", cfg.mask_update_every);
    if (j.contains("loss")) {
        const auto& l = j.at("loss");
        cfg.loss.alpha = l.value("alpha", cfg.loss.alpha);
        cfg.loss.w1 = l.value("w1", cfg.loss.w1);
        cfg.loss.w2 = l.value("w2", cfg.loss.w2);
        cfg.loss.k = l.value("k", cfg.loss.k);
        cfg.loss.ssim_c1 = l.value("ssim_c1", cfg.loss.ssim_c1);
        cfg.loss.ssim_c2 = l.value("ssim_c2", cfg.loss.ssim_c2);
    }
    if (j.contains("init")) {
        const auto& i = j.at("init");
        const std::string kind = i.value("kind", std::string("block_match"));
        if (kind == "constant") cfg.init.kind = GoatInit::Kind::Constant;
        else if (kind == "block_match") cfg.init.kind = GoatInit::Kind::BlockMatch;
        else throw std::runtime_error("config: unknown init kind '" + kind + "'");
        cfg.init.constant = i.value("constant", cfg.init.constant);
        cfg.init.patch = i.value("patch", cfg.init.patch);
    }
    return cfg;
}

RegionFilter parse_region(const std::string& s) {
    if (s == "all") return RegionFilter::All;
    if (s == "visible") return RegionFilter::Visible;
    if (s == "occluded") return RegionFilter::Occluded;
    if (s == "exclusive") return RegionFilter::Exclusive;
    throw std::runtime_error("unknown region '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Occlusion-aware stereo toolkit: detection, post-processing, "
                 "per-image optimization, evaluation, and synthetic scenes"};
    app.require_subcommand(1);

    // occlusion
    std::string occ_in, occ_out, occ_format = "auto";
    double occ_tol = 1.0;
    auto* occ = app.add_subcommand("occlusion", "Label occluded/exclusive pixels from a left disparity map");
    occ->add_option("disparity", occ_in, "input disparity (.pfm or KITTI .png)")->required();
    occ->add_option("mask", occ_out, "output mask .png (255 visible, 128 exclusive, 0 occluded)")->required();
    occ->add_option("--tol", occ_tol, "target bin width in px");
    occ->add_option("--format", occ_format, "force input format: pfm|png")
        ->check(CLI::IsMember({"auto", "pfm", "png"}));

    // goapp
    std::string pp_in, pp_mask, pp_out, pp_format = "auto";
    int pp_n = 10;
    double pp_tol = 1.0;
    auto* pp = app.add_subcommand("goapp", "Refill occluded/exclusive disparities from non-occluded neighbors");
    pp->add_option("disparity", pp_in, "input disparity")->required();
    pp->add_option("output", pp_out, "output disparity (.pfm or .png)")->required();
    pp->add_option("--mask", pp_mask, "mask .png; derived from the input when omitted");
    pp->add_option("--n", pp_n, "number of neighbors to average");
    pp->add_option("--tol", pp_tol, "target bin width for the derived mask");
    pp->add_option("--format", pp_format, "force input format: pfm|png")
        ->check(CLI::IsMember({"auto", "pfm", "png"}));

    // evaluate
    std::string ev_pred, ev_gt, ev_region = "all", ev_format = "auto";
    double ev_focal = 0.0, ev_baseline = 0.0, ev_cap = 80.0, ev_tol = 1.0;
    auto* ev = app.add_subcommand("evaluate", "Depth and disparity metrics against ground truth");
    ev->add_option("pred", ev_pred, "predicted disparity")->required();
    ev->add_option("gt", ev_gt, "ground-truth disparity")->required();
    ev->add_option("--focal", ev_focal, "focal length in px")->required();
    ev->add_option("--baseline", ev_baseline, "baseline in m")->required();
    ev->add_option("--cap", ev_cap, "depth cap in m applied to predictions");
    ev->add_option("--region", ev_region, "restrict to a mask class: all|visible|occluded|exclusive")
        ->check(CLI::IsMember({"all", "visible", "occluded", "exclusive"}));
    ev->add_option("--tol", ev_tol, "target bin width for the region mask (derived from gt)");
    ev->add_option("--format", ev_format, "force input format: pfm|png")
        ->check(CLI::IsMember({"auto", "pfm", "png"}));

    // reconstruct
    std::string rc_left, rc_right, rc_disp, rc_out, rc_err, rc_format = "auto";
    auto* rc = app.add_subcommand("reconstruct", "Recover the left image from the right and a disparity map");
    rc->add_option("left", rc_left, "left image (.png or .pfm)")->required();
    rc->add_option("right", rc_right, "right image")->required();
    rc->add_option("disparity", rc_disp, "left disparity")->required();
    rc->add_option("output", rc_out, "recovered left image")->required();
    rc->add_option("error", rc_err, "per-pixel |left - recovered| map")->required();
    rc->add_option("--format", rc_format, "force disparity format: pfm|png")
        ->check(CLI::IsMember({"auto", "pfm", "png"}));

    // goat
    std::string gt_left, gt_right, gt_config, gt_out_disp, gt_out_mask, gt_out_trace, gt_gt,
        gt_snapshots;
    auto* go = app.add_subcommand("goat", "Iterative occlusion-aware disparity optimization");
    go->add_option("left", gt_left, "left image")->required();
    go->add_option("right", gt_right, "right image")->required();
    go->add_option("disparity", gt_out_disp, "output disparity")->required();
    go->add_option("mask", gt_out_mask, "output mask .png")->required();
    go->add_option("trace", gt_out_trace, "output trace .tsv")->required();
    go->add_option("--config", gt_config, "JSON config file");
    go->add_option("--gt", gt_gt, "ground-truth disparity for the trace EPE column");
    go->add_option("--snapshot-dir", gt_snapshots, "write per-epoch disparity/mask snapshots here");

    // synth
    std::string sy_spec, sy_out;
    uint32_t sy_seed = 0;
    auto* sy = app.add_subcommand("synth", "Render a layered scene with analytic ground truth");
    sy->add_option("spec", sy_spec, "scene description file")->required();
    sy->add_option("outdir", sy_out, "output directory")->required();
    sy->add_option("--seed", sy_seed, "texture seed");

    // stats
    std::string st_pred, st_gt, st_from = "gt", st_format = "auto";
    double st_tol = 1.0;
    auto* st = app.add_subcommand("stats", "Disparity error statistics split by occlusion class");
    st->add_option("pred", st_pred, "predicted disparity")->required();
    st->add_option("gt", st_gt, "ground-truth disparity")->required();
    st->add_option("--tol", st_tol, "target bin width for the mask");
    st->add_option("--mask-from", st_from, "derive the mask from: gt|pred")
        ->check(CLI::IsMember({"gt", "pred"}));
    st->add_option("--format", st_format, "force input format: pfm|png")
        ->check(CLI::IsMember({"auto", "pfm", "png"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    std::cout.precision(10);
    try {
        if (occ->parsed()) {
            const DisparityMap disp = read_disparity(occ_in, occ_format);
            const OcclusionMask mask = occlusion_mask(disp, occ_tol);
            write_mask_png(mask, occ_out);
            std::cout << "visible=" << mask.count(Label::Visible)
                      << "\noccluded=" << mask.count(Label::Occluded)
                      << "\nexclusive=" << mask.count(Label::Exclusive) << "\n";
        } else if (pp->parsed()) {
            const DisparityMap disp = read_disparity(pp_in, pp_format);
            const OcclusionMask mask =
                pp_mask.empty() ? occlusion_mask(disp, pp_tol) : read_mask_png(pp_mask);
            const DisparityMap filled = goapp(disp, mask, pp_n);
            write_disparity(filled, pp_out);
            size_t changed = 0;
            for (size_t i = 0; i < filled.size(); ++i)
                if (filled.data[i] != disp.data[i] || filled.valid[i] != disp.valid[i]) ++changed;
            std::cout << "filled=" << changed << "\n";
        } else if (ev->parsed()) {
            const DisparityMap pred = read_disparity(ev_pred, ev_format);
            const DisparityMap gt = read_disparity(ev_gt, ev_format);
            const CameraCalib calib{ev_focal, ev_baseline};
            const RegionFilter region = parse_region(ev_region);
            OcclusionMask mask;
            const OcclusionMask* mask_ptr = nullptr;
            if (region != RegionFilter::All) {
                mask = occlusion_mask(gt, ev_tol);
                mask_ptr = &mask;
            }
            const EvalReport report = evaluate(pred, gt, calib, ev_cap, region, mask_ptr);
            std::cout << format_report_table(report) << format_report_kv(report);
        } else if (rc->parsed()) {
            const IntensityImage left = read_intensity(rc_left);
            const IntensityImage right = read_intensity(rc_right);
            const DisparityMap disp = read_disparity(rc_disp, rc_format);
            const ReconstructionResult recon = reconstruct_left(right, disp);
            const ScalarField err = reconstruction_error_map(left, recon.image);
            write_intensity(recon.image, rc_out);
            write_field(err, rc_err);
            double mean = 0.0;
            for (double e : err.data) mean += e;
            std::cout << "mean_error=" << mean / err.size() << "\n";
        } else if (go->parsed()) {
            const IntensityImage left = read_intensity(gt_left);
            const IntensityImage right = read_intensity(gt_right);
            GoatConfig cfg = load_goat_config(gt_config);
            cfg.snapshot_dir = gt_snapshots;
            if (!cfg.snapshot_dir.empty()) std::filesystem::create_directories(cfg.snapshot_dir);
            DisparityMap gtd;
            const DisparityMap* gtd_ptr = nullptr;
            if (!gt_gt.empty()) {
                gtd = read_disparity(gt_gt, "auto");
                gtd_ptr = &gtd;
            }
            const GoatResult res = goat_optimize(left, right, cfg, gtd_ptr);
            write_disparity(res.disp, gt_out_disp);
            write_mask_png(res.mask, gt_out_mask);
            write_trace(res.trace, gt_out_trace);
            if (res.trace.diverged) throw std::runtime_error("goat: loss diverged, aborted");
            const GoatEpochStats& last = res.trace.epochs.back();
            std::cout << "final_loss=" << last.loss_end
                      << "\nmasked_fraction=" << last.masked_fraction << "\nepe=" << last.epe
                      << "\n";
        } else if (sy->parsed()) {
            const SceneSpec spec = load_scene_spec(sy_spec);
            const SynthScene scene = render(spec, sy_seed);
            std::filesystem::create_directories(sy_out);
            write_pfm(scene.left, sy_out + "/left.pfm");
            write_pfm(scene.right, sy_out + "/right.pfm");
            write_pfm(scene.gt_disp, sy_out + "/gt_disp.pfm");
            write_mask_png(scene.gt_mask, sy_out + "/gt_mask.png");
            std::cout << "outdir=" << sy_out << "\n";
        } else if (st->parsed()) {
            const DisparityMap pred = read_disparity(st_pred, st_format);
            const DisparityMap gt = read_disparity(st_gt, st_format);
            const OcclusionMask mask = occlusion_mask(st_from == "gt" ? gt : pred, st_tol);
            const OcclusionStats s = occlusion_stats(pred, gt, mask);
            std::cout << "mean_error_occluded=" << s.mean_error_occluded
                      << "\nmean_error_visible=" << s.mean_error_visible
                      << "\ntotal_error_share_occluded=" << s.total_error_share_occluded
                      << "\narea_share_occluded=" << s.area_share_occluded
                      << "\nn_occluded=" << s.n_occluded << "\nn_visible=" << s.n_visible << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
