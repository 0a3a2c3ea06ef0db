#include <cmath>
#include <random>

#include <doctest.h>

#include "stereo/synth.hpp"
#include "stereo/warp.hpp"
#include "test_util.hpp"

using namespace stereo;

namespace {

// Direct 4-neighbor weighted sum, the interpolation oracle.
double bilinear_oracle(const IntensityImage& img, double x, double y) {
    x = std::clamp(x, 0.0, img.width - 1.0);
    y = std::clamp(y, 0.0, img.height - 1.0);
    const int x0 = std::min(static_cast<int>(std::floor(x)), img.width - 1);
    const int y0 = std::min(static_cast<int>(std::floor(y)), img.height - 1);
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = x - x0, fy = y - y0;
    return img.at(x0, y0) * (1 - fx) * (1 - fy) + img.at(x1, y0) * fx * (1 - fy) +
           img.at(x0, y1) * (1 - fx) * fy + img.at(x1, y1) * fx * fy;
}

}  // namespace

TEST_SUITE_BEGIN("warp");

TEST_CASE("bilinear sampling at integer coordinates") {
    std::mt19937 rng(1);
    const IntensityImage img = testutil::random_image(rng, 8, 6);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            CHECK(bilinear_sample(img, x, y) == img.at(x, y));
}

TEST_CASE("bilinear sampling is linear between samples") {
    IntensityImage img(2, 1);
    img.data = {0.0, 1.0};
    CHECK(bilinear_sample(img, 0.25, 0.0) == doctest::Approx(0.25));
}

TEST_CASE("bilinear sampling matches the 4-neighbor oracle") {
    std::mt19937 rng(2);
    const IntensityImage img = testutil::random_image(rng, 11, 7);
    std::uniform_real_distribution<double> px(-2.0, 13.0), py(-2.0, 9.0);
    for (int it = 0; it < 200; ++it) {
        const double x = px(rng), y = py(rng);
        CHECK(bilinear_sample(img, x, y) == doctest::Approx(bilinear_oracle(img, x, y)).epsilon(1e-12));
    }
}

TEST_CASE("zero disparity reconstruction is the identity") {
    std::mt19937 rng(3);
    const IntensityImage right = testutil::random_image(rng, 12, 9);
    const DisparityMap zero(12, 9, 0.0);
    const ReconstructionResult res = reconstruct_left(right, zero);
    for (size_t i = 0; i < right.size(); ++i) CHECK(res.image.data[i] == right.data[i]);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 12; ++x) CHECK(res.sample_in_bounds(x, y));
}

TEST_CASE("constant right image reconstructs to the constant") {
    std::mt19937 rng(4);
    const IntensityImage right(10, 5, 0.37);
    const DisparityMap disp = testutil::random_disparity(rng, 10, 5, 12.0);
    const ReconstructionResult res = reconstruct_left(right, disp);
    for (double v : res.image.data) CHECK(v == doctest::Approx(0.37));
}

TEST_CASE("unit disparity shifts a ramp by one column") {
    IntensityImage right(8, 2);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 8; ++x) right.at(x, y) = x / 10.0;
    const DisparityMap one(8, 2, 1.0);
    const ReconstructionResult res = reconstruct_left(right, one);
    for (int y = 0; y < 2; ++y) {
        CHECK(!res.sample_in_bounds(0, y));
        for (int x = 1; x < 8; ++x) {
            CHECK(res.sample_in_bounds(x, y));
            CHECK(res.image.at(x, y) == doctest::Approx(right.at(x - 1, y)));
        }
    }
}

TEST_CASE("disparity derivative matches finite differences") {
    std::mt19937 rng(5);
    const IntensityImage right = testutil::random_image(rng, 20, 10);
    DisparityMap disp = testutil::random_disparity(rng, 20, 10, 10.0);
    const ReconstructionResult res = reconstruct_left(right, disp);

    const double h = 1e-3;
    std::uniform_int_distribution<int> ux(0, 19), uy(0, 9);
    int checked = 0;
    for (int it = 0; it < 400 && checked < 60; ++it) {
        const int x = ux(rng), y = uy(rng);
        const double sx = x - disp.at(x, y);
        if (sx < 0.1 || sx > 18.9) continue;
        if (std::abs(sx - std::round(sx)) < 0.01) continue;  // derivative breakpoint

        DisparityMap dp = disp, dm = disp;
        dp.at(x, y) += h;
        dm.at(x, y) -= h;
        const double fd = (reconstruct_left(right, dp).image.at(x, y) -
                           reconstruct_left(right, dm).image.at(x, y)) /
                          (2 * h);
        const double an = res.ddisp.at(x, y);
        CHECK(std::abs(an - fd) / (std::abs(fd) + 1e-8) < 1e-4);
        ++checked;
    }
    CHECK(checked >= 50);
}

TEST_CASE("sampling never exceeds the right image range") {
    std::mt19937 rng(6);
    const IntensityImage right = testutil::random_image(rng, 15, 8, 0.2, 0.9);
    const DisparityMap disp = testutil::random_disparity(rng, 15, 8, 20.0);
    const ReconstructionResult res = reconstruct_left(right, disp);
    const double mx = *std::max_element(right.data.begin(), right.data.end());
    const double mn = *std::min_element(right.data.begin(), right.data.end());
    for (double v : res.image.data) {
        CHECK(v <= mx + 1e-15);
        CHECK(v >= mn - 1e-15);
    }
}

TEST_CASE("reconstruction error map") {
    IntensityImage a(1, 1, 0.2), b(1, 1, 0.7);
    CHECK(reconstruction_error_map(a, b).data[0] == doctest::Approx(0.5));
    CHECK(reconstruction_error_map(a, a).data[0] == 0.0);
    const IntensityImage other(2, 1);
    CHECK_THROWS_AS(reconstruction_error_map(a, other), std::invalid_argument);
}

TEST_CASE("ground-truth warp errors concentrate in occluded regions") {
    std::mt19937 rng(7);
    const SceneSpec spec = testutil::random_scene(rng);
    const SynthScene scene = render(spec, 9);
    const ReconstructionResult res = reconstruct_left(scene.right, scene.gt_disp);
    const ScalarField err = reconstruction_error_map(scene.left, res.image);

    double occ = 0, vis = 0;
    size_t n_occ = 0, n_vis = 0;
    for (size_t i = 0; i < err.size(); ++i) {
        if (scene.gt_mask.label[i] == Label::Occluded) {
            occ += err.data[i];
            ++n_occ;
        } else if (scene.gt_mask.label[i] == Label::Visible) {
            vis += err.data[i];
            ++n_vis;
        }
    }
    REQUIRE(n_occ > 0);
    REQUIRE(n_vis > 0);
    CHECK(vis / n_vis == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(occ / n_occ > 0.05);
}

TEST_SUITE_END();
