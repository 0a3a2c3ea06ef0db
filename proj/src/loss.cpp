#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stereo/loss.hpp"
#include "stereo/warp.hpp"

namespace stereo {

namespace {

inline int reflect(int i, int n) {
    if (i < 0) return -i - 1;
    if (i >= n) return 2 * n - 1 - i;
    return i;
}

inline double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// 3x3 uniform window statistics of (a, b) around (x, y), reflected borders.
struct WindowStats {
    double mu_a, mu_b, var_a, var_b, cov_ab;
};

WindowStats window_stats(const IntensityImage& a, const IntensityImage& b, int x, int y) {
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (int dy = -1; dy <= 1; ++dy) {
        const int yy = reflect(y + dy, a.height);
        for (int dx = -1; dx <= 1; ++dx) {
            const int xx = reflect(x + dx, a.width);
            const double av = a.at(xx, yy);
            const double bv = b.at(xx, yy);
            sa += av;
            sb += bv;
            saa += av * av;
            sbb += bv * bv;
            sab += av * bv;
        }
    }
    WindowStats s;
    s.mu_a = sa / 9.0;
    s.mu_b = sb / 9.0;
    s.var_a = saa / 9.0 - s.mu_a * s.mu_a;
    s.var_b = sbb / 9.0 - s.mu_b * s.mu_b;
    s.cov_ab = sab / 9.0 - s.mu_a * s.mu_b;
    return s;
}

inline double ssim_from_stats(const WindowStats& s, double c1, double c2) {
    const double n1 = 2.0 * s.mu_a * s.mu_b + c1;
    const double n2 = 2.0 * s.cov_ab + c2;
    const double d1 = s.mu_a * s.mu_a + s.mu_b * s.mu_b + c1;
    const double d2 = s.var_a + s.var_b + c2;
    return (n1 * n2) / (d1 * d2);
}

struct Shape {
    int w, h;
};

Shape require_same_shape(const IntensityImage& a, const IntensityImage& b, const char* who) {
    if (!a.same_shape(b)) throw std::invalid_argument(std::string(who) + ": shape mismatch");
    return {a.width, a.height};
}

}  // namespace

void LossParams::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("LossParams: alpha must be in [0,1]");
    if (!(w1 >= 0.0) || !(w2 >= 0.0))
        throw std::invalid_argument("LossParams: weights must be non-negative");
    if (k < 1) throw std::invalid_argument("LossParams: k must be >= 1");
    if (!(ssim_c1 > 0.0) || !(ssim_c2 > 0.0))
        throw std::invalid_argument("LossParams: SSIM stabilizers must be positive");
}

ScalarField ssim_map(const IntensityImage& a, const IntensityImage& b, double c1, double c2) {
    const Shape sh = require_same_shape(a, b, "ssim_map");
    ScalarField out(sh.w, sh.h);
    for (int y = 0; y < sh.h; ++y)
        for (int x = 0; x < sh.w; ++x)
            out.at(x, y) = ssim_from_stats(window_stats(a, b, x, y), c1, c2);
    return out;
}

ScalarField photometric_cost(const IntensityImage& left, const IntensityImage& recon,
                             const LossParams& params) {
    params.validate();
    const Shape sh = require_same_shape(left, recon, "photometric_cost");
    const ScalarField s = ssim_map(left, recon, params.ssim_c1, params.ssim_c2);
    ScalarField out(sh.w, sh.h);
    for (size_t i = 0; i < out.size(); ++i)
        out.data[i] = params.alpha * (1.0 - s.data[i]) / 2.0 +
                      (1.0 - params.alpha) * std::abs(left.data[i] - recon.data[i]);
    return out;
}

ScalarField asw_aggregate(const ScalarField& cost, const IntensityImage& guide, int k) {
    if (k < 1) throw std::invalid_argument("asw_aggregate: k must be >= 1");
    if (cost.width != guide.width || cost.height != guide.height)
        throw std::invalid_argument("asw_aggregate: shape mismatch");

    ScalarField out(cost.width, cost.height);
    for (int r = 0; r < cost.height; ++r) {
        const int r0 = std::max(r - k, 0);
        const int r1 = std::min(r + k - 1, cost.height - 1);
        for (int c = 0; c < cost.width; ++c) {
            const int c0 = std::max(c - k, 0);
            const int c1 = std::min(c + k - 1, cost.width - 1);
            const double center = guide.at(c, r);
            double num = 0.0, den = 0.0;
            for (int y = r0; y <= r1; ++y) {
                for (int x = c0; x <= c1; ++x) {
                    const double w = std::exp(-std::abs(guide.at(x, y) - center) / 2.0);
                    num += w * cost.at(x, y);
                    den += w;
                }
            }
            out.at(c, r) = num / den;
        }
    }
    return out;
}

ScalarField smoothness_cost(const DisparityMap& disp, const IntensityImage& left) {
    if (disp.width != left.width || disp.height != left.height)
        throw std::invalid_argument("smoothness_cost: shape mismatch");
    ScalarField out(disp.width, disp.height);
    for (int y = 0; y < disp.height; ++y) {
        for (int x = 0; x < disp.width; ++x) {
            double c = 0.0;
            if (x + 1 < disp.width)
                c += std::abs(disp.at(x + 1, y) - disp.at(x, y)) *
                     std::exp(-std::abs(left.at(x + 1, y) - left.at(x, y)));
            if (y + 1 < disp.height)
                c += std::abs(disp.at(x, y + 1) - disp.at(x, y)) *
                     std::exp(-std::abs(left.at(x, y + 1) - left.at(x, y)));
            out.at(x, y) = c;
        }
    }
    return out;
}

double masked_mean_cost(const ScalarField& car, const ScalarField& cs, const OcclusionMask& mask,
                        const DisparityMap& disp, const LossParams& params) {
    double sum = 0.0;
    size_t n = 0;
    for (size_t i = 0; i < car.size(); ++i) {
        if (mask.label[i] != Label::Visible || !disp.valid[i]) continue;
        sum += params.w1 * car.data[i] + params.w2 * cs.data[i];
        ++n;
    }
    if (n == 0) throw std::invalid_argument("total_loss: every pixel is masked out");
    return sum / static_cast<double>(n);
}

LossField total_loss(const DisparityMap& disp, const IntensityImage& left,
                     const IntensityImage& right, const OcclusionMask& mask,
                     const LossParams& params) {
    params.validate();
    require_same_shape(left, right, "total_loss");
    if (disp.width != left.width || disp.height != left.height || mask.width != left.width ||
        mask.height != left.height)
        throw std::invalid_argument("total_loss: shape mismatch");

    const int W = left.width, H = left.height;
    const ReconstructionResult recon = reconstruct_left(right, disp);

    LossField field;
    field.cr = photometric_cost(left, recon.image, params);
    field.car = asw_aggregate(field.cr, left, params.k);
    field.cs = smoothness_cost(disp, left);
    field.grad = ScalarField(W, H);

    std::vector<uint8_t> m(left.size());
    size_t n_kept = 0;
    for (size_t i = 0; i < m.size(); ++i) {
        m[i] = (mask.label[i] == Label::Visible && disp.valid[i]) ? 1 : 0;
        n_kept += m[i];
    }
    if (n_kept == 0) throw std::invalid_argument("total_loss: every pixel is masked out");

    double sum = 0.0;
    for (size_t i = 0; i < m.size(); ++i)
        if (m[i]) sum += params.w1 * field.car.data[i] + params.w2 * field.cs.data[i];
    field.total = sum / static_cast<double>(n_kept);

    // Reverse pass. Upstream weight of each aggregated cost / smoothness
    // pixel under the masked mean:
    const double g_car = params.w1 / static_cast<double>(n_kept);
    const double g_cs = params.w2 / static_cast<double>(n_kept);
    const int k = params.k;

    // d(total)/d(cr), scattering each kept window with the same weights as
    // the forward aggregation.
    ScalarField g_cr(W, H);
    for (int r = 0; r < H; ++r) {
        const int r0 = std::max(r - k, 0);
        const int r1 = std::min(r + k - 1, H - 1);
        for (int c = 0; c < W; ++c) {
            if (!m[static_cast<size_t>(r) * W + c]) continue;
            const int c0 = std::max(c - k, 0);
            const int c1 = std::min(c + k - 1, W - 1);
            const double center = left.at(c, r);
            double den = 0.0;
            for (int y = r0; y <= r1; ++y)
                for (int x = c0; x <= c1; ++x)
                    den += std::exp(-std::abs(left.at(x, y) - center) / 2.0);
            const double scale = g_car / den;
            for (int y = r0; y <= r1; ++y)
                for (int x = c0; x <= c1; ++x)
                    g_cr.at(x, y) += scale * std::exp(-std::abs(left.at(x, y) - center) / 2.0);
        }
    }

    // d(total)/d(recon): the L1 term plus the SSIM term through the 3x3
    // window statistics.
    ScalarField g_recon(W, H);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const double g = g_cr.at(x, y);
            if (g == 0.0) continue;
            g_recon.at(x, y) +=
                g * (1.0 - params.alpha) * -sign_of(left.at(x, y) - recon.image.at(x, y));

            if (params.alpha == 0.0) continue;
            const double g_ssim = g * (-params.alpha / 2.0);
            const WindowStats s = window_stats(left, recon.image, x, y);
            const double n1 = 2.0 * s.mu_a * s.mu_b + params.ssim_c1;
            const double n2 = 2.0 * s.cov_ab + params.ssim_c2;
            const double d1 = s.mu_a * s.mu_a + s.mu_b * s.mu_b + params.ssim_c1;
            const double d2 = s.var_a + s.var_b + params.ssim_c2;
            const double ssim = (n1 * n2) / (d1 * d2);
            for (int dy = -1; dy <= 1; ++dy) {
                const int yy = reflect(y + dy, H);
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = reflect(x + dx, W);
                    const double aq = left.at(xx, yy);
                    const double bq = recon.image.at(xx, yy);
                    const double dn1 = 2.0 * s.mu_a / 9.0;
                    const double dn2 = 2.0 * (aq - s.mu_a) / 9.0;
                    const double dd1 = 2.0 * s.mu_b / 9.0;
                    const double dd2 = 2.0 * (bq - s.mu_b) / 9.0;
                    const double dssim =
                        (dn1 * n2 + n1 * dn2) / (d1 * d2) - ssim * (dd1 / d1 + dd2 / d2);
                    g_recon.at(xx, yy) += g_ssim * dssim;
                }
            }
        }
    }

    // Through the bilinear warp into the disparity field.
    for (size_t i = 0; i < field.grad.size(); ++i)
        field.grad.data[i] = g_recon.data[i] * recon.ddisp.data[i];

    // Smoothness stencils of kept pixels.
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            if (!m[static_cast<size_t>(y) * W + x]) continue;
            if (x + 1 < W) {
                const double t = g_cs * sign_of(disp.at(x + 1, y) - disp.at(x, y)) *
                                 std::exp(-std::abs(left.at(x + 1, y) - left.at(x, y)));
                field.grad.at(x + 1, y) += t;
                field.grad.at(x, y) -= t;
            }
            if (y + 1 < H) {
                const double t = g_cs * sign_of(disp.at(x, y + 1) - disp.at(x, y)) *
                                 std::exp(-std::abs(left.at(x, y + 1) - left.at(x, y)));
                field.grad.at(x, y + 1) += t;
                field.grad.at(x, y) -= t;
            }
        }
    }

    return field;
}

}  // namespace stereo
