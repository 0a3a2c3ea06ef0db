#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stereo/geometry.hpp"
#include "stereo/image.hpp"

namespace stereo {

enum class TextureKind { Checker, Noise, Gradient };

struct Texture {
    TextureKind kind = TextureKind::Noise;
    int period = 4;      // checker
    uint32_t seed = 0;   // noise
    int smoothness = 1;  // noise: box-blur passes
};

// Fronto-parallel rectangle at constant disparity.
struct Layer {
    int x = 0, y = 0, w = 0, h = 0;
    double disparity = 0.0;
    Texture texture;
};

// Declarative layered scene. Layer rectangles must lie within the image,
// be pairwise disjoint, and sit strictly nearer than the background; that
// keeps every surface visible in the left view, so the analytic mask is an
// exact dual of the disparity-based detection for integer disparities.
struct SceneSpec {
    int width = 0, height = 0;
    double background_disparity = 0.0;
    Texture background_texture;
    std::vector<Layer> layers;

    void validate() const;
};

struct SynthScene {
    IntensityImage left;
    IntensityImage right;
    DisparityMap gt_disp;   // top surface disparity per left pixel
    OcclusionMask gt_mask;  // analytic labels
};

// Deterministic given (spec, seed). The right view renders each surface
// shifted left by its disparity with textures attached to surface
// coordinates, so corresponding pixels carry identical values.
SynthScene render(const SceneSpec& spec, uint32_t seed);

// Plain text scene description:
//   size W H
//   background DISP TEXTURE
//   layer X Y W H DISP TEXTURE
// with TEXTURE one of: "checker PERIOD" | "noise SEED SMOOTHNESS" |
// "gradient". '#' starts a comment; one layer per line.
SceneSpec parse_scene_spec(const std::string& text);
SceneSpec load_scene_spec(const std::string& path);

}  // namespace stereo
