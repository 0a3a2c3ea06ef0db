#include <random>

#include <doctest.h>

#include "stereo/goapp.hpp"
#include "stereo/synth.hpp"
#include "test_util.hpp"

using namespace stereo;

namespace {

OcclusionMask row_mask(const std::vector<Label>& l) {
    OcclusionMask m(static_cast<int>(l.size()), 1);
    m.label = l;
    return m;
}

DisparityMap row_map(const std::vector<double>& d) {
    DisparityMap m(static_cast<int>(d.size()), 1);
    m.data = d;
    return m;
}

OcclusionMask random_mask(std::mt19937& rng, int w, int h) {
    OcclusionMask m(w, h);
    std::uniform_int_distribution<int> pick(0, 5);
    for (Label& l : m.label) {
        const int p = pick(rng);
        l = p == 0 ? Label::Occluded : (p == 1 ? Label::Exclusive : Label::Visible);
    }
    return m;
}

}  // namespace

TEST_SUITE_BEGIN("goapp");

TEST_CASE("all-visible mask is the identity") {
    std::mt19937 rng(1);
    const DisparityMap d = testutil::random_disparity(rng, 14, 6, 9.0);
    const OcclusionMask mask(14, 6, Label::Visible);
    const DisparityMap out = goapp(d, mask);
    CHECK(out.data == d.data);
    CHECK(out.valid == d.valid);
}

TEST_CASE("leading run fills right to left") {
    const DisparityMap d = row_map({0, 0, 4, 6, 8, 8});
    const OcclusionMask m = row_mask({Label::Exclusive, Label::Occluded, Label::Visible,
                                      Label::Visible, Label::Visible, Label::Visible});
    const DisparityMap out = goapp(d, m, 2);
    CHECK(out.at(1, 0) == doctest::Approx(5.0));    // (4+6)/2
    CHECK(out.at(0, 0) == doctest::Approx(4.5));    // (5+4)/2
    CHECK(out.at(2, 0) == 4.0);
    CHECK(out.at(3, 0) == 6.0);
    CHECK(out.at(4, 0) == 8.0);
    CHECK(out.at(5, 0) == 8.0);
}

TEST_CASE("occluded pixels average their left neighbors, truncated") {
    const DisparityMap d = row_map({2, 2, 9, 9});
    const OcclusionMask m =
        row_mask({Label::Visible, Label::Occluded, Label::Visible, Label::Visible});
    const DisparityMap out = goapp(d, m, 2);
    CHECK(out.at(0, 0) == 2.0);
    CHECK(out.at(1, 0) == doctest::Approx(2.0));  // only one usable neighbor
    CHECK(out.at(2, 0) == 9.0);
    CHECK(out.at(3, 0) == 9.0);
}

TEST_CASE("rows without visible pixels pass through") {
    const DisparityMap d = row_map({3, 1, 4});
    const OcclusionMask m = row_mask({Label::Occluded, Label::Exclusive, Label::Occluded});
    const DisparityMap out = goapp(d, m, 4);
    CHECK(out.data == d.data);
}

TEST_CASE("idempotent for a fixed mask") {
    std::mt19937 rng(2);
    for (int it = 0; it < 25; ++it) {
        const DisparityMap d = testutil::random_disparity(rng, 20, 8, 12.0);
        const OcclusionMask m = random_mask(rng, 20, 8);
        const DisparityMap once = goapp(d, m, 3);
        const DisparityMap twice = goapp(once, m, 3);
        CHECK(twice.data == once.data);
        CHECK(twice.valid == once.valid);
    }
}

TEST_CASE("visible pixels are never modified") {
    std::mt19937 rng(3);
    for (int it = 0; it < 25; ++it) {
        const DisparityMap d = testutil::random_disparity(rng, 24, 10, 12.0);
        const OcclusionMask m = random_mask(rng, 24, 10);
        const DisparityMap out = goapp(d, m, 5);
        for (int y = 0; y < 10; ++y)
            for (int x = 0; x < 24; ++x)
                if (m.at(x, y) == Label::Visible) {
                    CHECK(out.at(x, y) == d.at(x, y));
                    CHECK(out.is_valid(x, y) == d.is_valid(x, y));
                }
    }
}

TEST_CASE("filled values stay within the row's visible range") {
    std::mt19937 rng(4);
    for (int it = 0; it < 25; ++it) {
        const DisparityMap d = testutil::random_disparity(rng, 24, 6, 12.0);
        const OcclusionMask m = random_mask(rng, 24, 6);
        const DisparityMap out = goapp(d, m, 3);
        for (int y = 0; y < 6; ++y) {
            double lo = 1e300, hi = -1e300;
            for (int x = 0; x < 24; ++x)
                if (m.at(x, y) == Label::Visible) {
                    lo = std::min(lo, d.at(x, y));
                    hi = std::max(hi, d.at(x, y));
                }
            for (int x = 0; x < 24; ++x) {
                if (out.at(x, y) == d.at(x, y)) continue;  // untouched
                CHECK(out.at(x, y) >= lo - 1e-12);
                CHECK(out.at(x, y) <= hi + 1e-12);
            }
        }
    }
}

TEST_CASE("occluded pixels pick up the background surface") {
    std::mt19937 rng(5);
    const SceneSpec spec = testutil::random_scene(rng, 64, 48, 1);
    REQUIRE(spec.layers.size() == 1);
    const SynthScene scene = render(spec, 3);

    // Blur-like corruption: occluded pixels inherit the foreground value.
    DisparityMap corrupted = scene.gt_disp;
    for (size_t i = 0; i < corrupted.size(); ++i)
        if (scene.gt_mask.label[i] == Label::Occluded)
            corrupted.data[i] = spec.layers[0].disparity;

    const DisparityMap fixed = goapp(corrupted, scene.gt_mask, 10);

    double err_before = 0, err_after = 0;
    size_t n = 0;
    for (size_t i = 0; i < fixed.size(); ++i) {
        if (scene.gt_mask.label[i] != Label::Occluded) continue;
        err_before += std::abs(corrupted.data[i] - scene.gt_disp.data[i]);
        err_after += std::abs(fixed.data[i] - scene.gt_disp.data[i]);
        CHECK(std::abs(fixed.data[i] - spec.background_disparity) < 1.0);
        ++n;
    }
    REQUIRE(n > 0);
    CHECK(err_after < err_before);
}

TEST_CASE("argument validation") {
    const DisparityMap d = row_map({1, 2});
    const OcclusionMask m(2, 1, Label::Visible);
    CHECK_THROWS_AS(goapp(d, m, 0), std::invalid_argument);
    CHECK_THROWS_AS(goapp(d, OcclusionMask(3, 1), 2), std::invalid_argument);
}

TEST_SUITE_END();
