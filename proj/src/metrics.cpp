#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "stereo/metrics.hpp"

namespace stereo {

EvalReport evaluate(const DisparityMap& pred, const DisparityMap& gt, const CameraCalib& calib,
                    double cap, RegionFilter region, const OcclusionMask* mask) {
    if (!pred.same_shape(gt)) throw std::invalid_argument("evaluate: shape mismatch");
    calib.validate();
    if (region != RegionFilter::All) {
        if (!mask) throw std::invalid_argument("evaluate: region filter requires a mask");
        if (mask->width != gt.width || mask->height != gt.height)
            throw std::invalid_argument("evaluate: mask shape mismatch");
    }

    const double fb = calib.focal * calib.baseline;
    double abs_rel = 0, sq_rel = 0, sse = 0, sse_log = 0, epe = 0;
    size_t d1_outliers = 0, n_d1 = 0, n_d2 = 0, n_d3 = 0, n = 0;

    for (size_t i = 0; i < gt.size(); ++i) {
        if (!gt.valid[i] || !pred.valid[i] || gt.data[i] <= 0.0) continue;
        // Predictions are capped; GT pixels beyond the cap leave the
        // evaluated set so a perfect prediction scores exactly zero.
        if (fb / gt.data[i] > cap) continue;
        if (region != RegionFilter::All) {
            const Label want = region == RegionFilter::Visible    ? Label::Visible
                               : region == RegionFilter::Occluded ? Label::Occluded
                                                                  : Label::Exclusive;
            if (mask->label[i] != want) continue;
        }
        ++n;

        const double err = std::abs(pred.data[i] - gt.data[i]);
        epe += err;
        if (err > 3.0 && err > 0.05 * gt.data[i]) ++d1_outliers;

        // Only predictions are capped; the GT depth is taken as-is.
        const double y = std::min(pred.data[i] > 0.0 ? fb / pred.data[i] : cap, cap);
        const double ystar = fb / gt.data[i];
        abs_rel += std::abs(y - ystar) / ystar;
        sq_rel += (y - ystar) * (y - ystar) / ystar;
        sse += (y - ystar) * (y - ystar);
        sse_log += (std::log(y) - std::log(ystar)) * (std::log(y) - std::log(ystar));
        const double ratio = std::max(y / ystar, ystar / y);
        if (ratio < 1.25) ++n_d1;
        if (ratio < 1.25 * 1.25) ++n_d2;
        if (ratio < 1.25 * 1.25 * 1.25) ++n_d3;
    }
    if (n == 0) throw std::invalid_argument("evaluate: no valid pixel in the selected region");

    EvalReport r;
    r.n_valid = n;
    const double dn = static_cast<double>(n);
    r.abs_rel = abs_rel / dn;
    r.sq_rel = sq_rel / dn;
    r.rmse = std::sqrt(sse / dn);
    r.rmse_log = std::sqrt(sse_log / dn);
    r.d1_all = d1_outliers / dn;
    r.epe = epe / dn;
    r.delta1 = n_d1 / dn;
    r.delta2 = n_d2 / dn;
    r.delta3 = n_d3 / dn;
    return r;
}

std::string format_report_table(const EvalReport& r) {
    std::ostringstream os;
    os << "  metric      value\n";
    const auto row = [&os](const char* name, double v) {
        os << "  ";
        os.width(10);
        os.setf(std::ios::left, std::ios::adjustfield);
        os << name;
        os.unsetf(std::ios::adjustfield);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%10.6f", v);
        os << buf << "\n";
    };
    row("abs_rel", r.abs_rel);
    row("sq_rel", r.sq_rel);
    row("rmse", r.rmse);
    row("rmse_log", r.rmse_log);
    row("d1_all", r.d1_all);
    row("epe", r.epe);
    row("delta1", r.delta1);
    row("delta2", r.delta2);
    row("delta3", r.delta3);
    os << "  n_valid   " << r.n_valid << "\n";
    return os.str();
}

std::string format_report_kv(const EvalReport& r) {
    std::ostringstream os;
    os.precision(9);
    os << "abs_rel=" << r.abs_rel << "\nsq_rel=" << r.sq_rel << "\nrmse=" << r.rmse
       << "\nrmse_log=" << r.rmse_log << "\nd1_all=" << r.d1_all << "\nepe=" << r.epe
       << "\ndelta1=" << r.delta1 << "\ndelta2=" << r.delta2 << "\ndelta3=" << r.delta3
       << "\nn_valid=" << r.n_valid << "\n";
    return os.str();
}

}  // namespace stereo
