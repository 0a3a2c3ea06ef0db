#include <random>

#include <doctest.h>

#include "stereo/geometry.hpp"
#include "stereo/imgio.hpp"
#include "stereo/synth.hpp"
#include "test_util.hpp"

using namespace stereo;

namespace {

DisparityMap row_map(const std::vector<double>& d) {
    DisparityMap m(static_cast<int>(d.size()), 1);
    m.data = d;
    return m;
}

void check_equal(const OcclusionMask& a, const OcclusionMask& b) {
    REQUIRE(a.width == b.width);
    REQUIRE(a.height == b.height);
    for (size_t i = 0; i < a.size(); ++i) REQUIRE(a.label[i] == b.label[i]);
}

}  // namespace

TEST_SUITE_BEGIN("geometry");

TEST_CASE("plateau row example") {
    const DisparityMap m = row_map({1, 1, 1, 1, 4, 4, 4, 4});
    const std::vector<Label> want = {Label::Exclusive, Label::Occluded, Label::Occluded,
                                     Label::Occluded,  Label::Visible,  Label::Visible,
                                     Label::Visible,   Label::Visible};
    for (double tol : {0.5, 1.0}) {
        const OcclusionMask brute = occlusion_mask_bruteforce(m, tol);
        const OcclusionMask fast = occlusion_mask(m, tol);
        for (int x = 0; x < m.width; ++x) {
            CHECK(brute.at(x, 0) == want[x]);
            CHECK(fast.at(x, 0) == want[x]);
        }
    }
}

TEST_CASE("constant zero row is fully visible") {
    const DisparityMap m = row_map({0, 0, 0, 0, 0, 0});
    const OcclusionMask mask = occlusion_mask(m, 1.0);
    for (int x = 0; x < m.width; ++x) CHECK(mask.at(x, 0) == Label::Visible);
}

TEST_CASE("exclusive condition") {
    const DisparityMap m = row_map({5, 0});
    const OcclusionMask mask = occlusion_mask(m, 1.0);
    CHECK(mask.at(0, 0) == Label::Exclusive);
    CHECK(mask.at(1, 0) == Label::Visible);
}

TEST_CASE("empty image") {
    const DisparityMap m(0, 0);
    CHECK(occlusion_mask(m, 1.0).size() == 0);
    CHECK(occlusion_mask_bruteforce(m, 1.0).size() == 0);
}

TEST_CASE("exclusive iff d > u for valid pixels") {
    std::mt19937 rng(21);
    for (int it = 0; it < 20; ++it) {
        const DisparityMap m = testutil::random_disparity(rng, 24, 8, 16.0, 0.05);
        const OcclusionMask mask = occlusion_mask(m, 1.0);
        for (int y = 0; y < m.height; ++y)
            for (int x = 0; x < m.width; ++x) {
                if (!m.is_valid(x, y)) continue;
                CHECK((mask.at(x, y) == Label::Exclusive) == (m.at(x, y) > x));
            }
    }
}

TEST_CASE("sweep equals brute force on random maps") {
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> dim(1, 32);
    for (int it = 0; it < 100; ++it) {
        const DisparityMap m =
            testutil::random_disparity(rng, dim(rng), dim(rng), 16.0, it % 3 ? 0.0 : 0.1);
        for (double tol : {0.5, 1.0, 2.0})
            check_equal(occlusion_mask(m, tol), occlusion_mask_bruteforce(m, tol));
    }
}

TEST_CASE("monotone rows have no occlusion") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    DisparityMap m(32, 4);
    for (int y = 0; y < m.height; ++y) {
        double d = 8.0 + 4.0 * uni(rng);
        for (int x = 0; x < m.width; ++x) {
            m.at(x, y) = std::max(d, 0.0);
            d -= 0.3 * uni(rng);  // non-increasing along the row
        }
    }
    const OcclusionMask mask = occlusion_mask(m, 1.0);
    for (size_t i = 0; i < mask.size(); ++i) CHECK(mask.label[i] != Label::Occluded);
}

TEST_CASE("appending a zero column preserves labels") {
    std::mt19937 rng(17);
    for (double tol : {0.5, 1.0}) {
        const DisparityMap m = testutil::random_disparity(rng, 20, 6, 12.0);
        DisparityMap wider(m.width + 1, m.height);
        for (int y = 0; y < m.height; ++y)
            for (int x = 0; x < m.width; ++x) wider.at(x, y) = m.at(x, y);
        const OcclusionMask a = occlusion_mask(m, tol);
        const OcclusionMask b = occlusion_mask(wider, tol);
        for (int y = 0; y < m.height; ++y)
            for (int x = 0; x < m.width; ++x) CHECK(a.at(x, y) == b.at(x, y));
    }
}

TEST_CASE("invalid pixels neither occlude nor stay visible") {
    DisparityMap m = row_map({0, 1, 2});  // targets all 0: chain of collisions
    OcclusionMask mask = occlusion_mask(m, 1.0);
    CHECK(mask.at(0, 0) == Label::Occluded);
    CHECK(mask.at(1, 0) == Label::Occluded);
    CHECK(mask.at(2, 0) == Label::Visible);

    m.set_valid(2, 0, false);  // the occluder of column 1 disappears
    mask = occlusion_mask(m, 1.0);
    CHECK(mask.at(0, 0) == Label::Occluded);  // still collides with column 1
    CHECK(mask.at(1, 0) == Label::Visible);
    CHECK(mask.at(2, 0) == Label::Occluded);  // invalid: excluded from the loss
    CHECK(!mask.binary(2, 0));
    check_equal(mask, occlusion_mask_bruteforce(m, 1.0));
}

TEST_CASE("bin tolerance must be positive") {
    const DisparityMap m = row_map({0});
    CHECK_THROWS_AS(occlusion_mask(m, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(occlusion_mask_bruteforce(m, -1.0), std::invalid_argument);
}

TEST_CASE("disparity to depth") {
    const CameraCalib calib{721.0, 0.54};
    DisparityMap m(3, 1);
    m.at(0, 0) = 721.0 * 0.54 / 10.0;
    m.at(1, 0) = 1e-6;  // far beyond the cap
    m.set_valid(2, 0, false);
    const DepthMap depth = disparity_to_depth(m, calib);
    CHECK(depth.at(0, 0) == doctest::Approx(10.0));
    CHECK(depth.is_valid(0, 0));
    CHECK(depth.at(1, 0) == 80.0);
    CHECK(!depth.is_valid(2, 0));

    CHECK_THROWS_AS(disparity_to_depth(m, CameraCalib{0.0, 0.54}), std::invalid_argument);
}

TEST_CASE("occlusion stats") {
    std::mt19937 rng(33);
    const SceneSpec spec = testutil::random_scene(rng);
    const SynthScene scene = render(spec, 4);

    SUBCASE("perfect prediction") {
        const OcclusionStats s = occlusion_stats(scene.gt_disp, scene.gt_disp, scene.gt_mask);
        CHECK(s.mean_error_occluded == 0.0);
        CHECK(s.mean_error_visible == 0.0);
        CHECK(s.total_error_share_occluded == 0.0);
        CHECK(s.area_share_occluded >= 0.0);
        CHECK(s.area_share_occluded <= 1.0);
    }
    SUBCASE("all visible mask") {
        const OcclusionMask all(scene.gt_disp.width, scene.gt_disp.height, Label::Visible);
        const OcclusionStats s = occlusion_stats(scene.gt_disp, scene.gt_disp, all);
        CHECK(s.area_share_occluded == 0.0);
    }
    SUBCASE("corrupted occluded pixels dominate the error") {
        DisparityMap pred = scene.gt_disp;
        for (size_t i = 0; i < pred.size(); ++i) {
            if (scene.gt_mask.label[i] == Label::Occluded) pred.data[i] += 5.0;
            else pred.data[i] += 0.1;
        }
        const OcclusionStats s = occlusion_stats(pred, scene.gt_disp, scene.gt_mask);
        CHECK(s.mean_error_occluded > s.mean_error_visible);
        CHECK(s.total_error_share_occluded > 0.0);
        CHECK(s.total_error_share_occluded <= 1.0);
    }
    SUBCASE("shape mismatch") {
        const DisparityMap other(3, 3);
        CHECK_THROWS_AS(occlusion_stats(other, scene.gt_disp, scene.gt_mask),
                        std::invalid_argument);
    }
}

TEST_CASE("mask png encoding") {
    testutil::TempDir tmp;
    OcclusionMask mask(3, 1);
    mask.at(0, 0) = Label::Visible;
    mask.at(1, 0) = Label::Exclusive;
    mask.at(2, 0) = Label::Occluded;
    write_mask_png(mask, tmp.file("m.png"));

    int w, h;
    const std::vector<uint8_t> bytes = read_png_gray8(tmp.file("m.png"), w, h);
    CHECK(bytes == std::vector<uint8_t>{255, 128, 0});

    const OcclusionMask back = read_mask_png(tmp.file("m.png"));
    check_equal(mask, back);

    const uint8_t bogus[1] = {7};
    write_png_gray8(bogus, 1, 1, tmp.file("bogus.png"));
    CHECK_THROWS_AS(read_mask_png(tmp.file("bogus.png")), std::runtime_error);
}

TEST_SUITE_END();
