#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "stereo/synth.hpp"

namespace stereo {

namespace {

// Texture sampled over surface coordinates; the horizontal domain extends
// past the image width so the right view can look up u = x + d.
class TextureGrid {
public:
    TextureGrid(const Texture& tex, int ext_width, int height, uint32_t mixed_seed) {
        width_ = ext_width;
        height_ = height;
        values_.resize(static_cast<size_t>(ext_width) * height);
        switch (tex.kind) {
            case TextureKind::Checker: {
                const int p = std::max(tex.period, 1);
                for (int v = 0; v < height; ++v)
                    for (int u = 0; u < ext_width; ++u)
                        values_[idx(u, v)] = ((u / p + v / p) % 2 == 0) ? 0.85 : 0.15;
                break;
            }
            case TextureKind::Gradient: {
                const double span = std::max(ext_width - 1, 1);
                for (int v = 0; v < height; ++v)
                    for (int u = 0; u < ext_width; ++u)
                        values_[idx(u, v)] = 0.05 + 0.9 * (u / span);
                break;
            }
            case TextureKind::Noise: {
                std::mt19937 rng(mixed_seed);
                std::uniform_real_distribution<double> uni(0.0, 1.0);
                for (double& v : values_) v = uni(rng);
                for (int pass = 0; pass < tex.smoothness; ++pass) box_blur();
                rescale();
                break;
            }
        }
    }

    double at(int u, int v) const {
        return values_[idx(std::clamp(u, 0, width_ - 1), std::clamp(v, 0, height_ - 1))];
    }

    // Linear interpolation along u for fractional surface coordinates;
    // exact grid lookup at integers.
    double sample(double u, int v) const {
        const double cu = std::clamp(u, 0.0, static_cast<double>(width_ - 1));
        const int u0 = std::min(static_cast<int>(cu), width_ - 1);
        const double f = cu - u0;
        if (f == 0.0) return at(u0, v);
        return (1.0 - f) * at(u0, v) + f * at(u0 + 1, v);
    }

private:
    size_t idx(int u, int v) const { return static_cast<size_t>(v) * width_ + u; }

    void box_blur() {
        std::vector<double> tmp(values_.size());
        for (int v = 0; v < height_; ++v)
            for (int u = 0; u < width_; ++u) {
                double s = 0.0;
                int n = 0;
                for (int dv = -1; dv <= 1; ++dv)
                    for (int du = -1; du <= 1; ++du) {
                        const int uu = u + du, vv = v + dv;
                        if (uu < 0 || vv < 0 || uu >= width_ || vv >= height_) continue;
                        s += values_[idx(uu, vv)];
                        ++n;
                    }
                tmp[idx(u, v)] = s / n;
            }
        values_ = std::move(tmp);
    }

    // Keep contrast after blurring.
    void rescale() {
        const auto [mn, mx] = std::minmax_element(values_.begin(), values_.end());
        const double lo = *mn, span = *mx - *mn;
        if (span <= 0.0) return;
        for (double& v : values_) v = 0.02 + 0.96 * (v - lo) / span;
    }

    int width_ = 0, height_ = 0;
    std::vector<double> values_;
};

uint32_t mix_seed(uint32_t scene_seed, uint32_t layer_index, uint32_t tex_seed) {
    uint64_t z = (static_cast<uint64_t>(scene_seed) << 32) ^ (static_cast<uint64_t>(tex_seed) << 8) ^
                 layer_index;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return static_cast<uint32_t>(z ^ (z >> 31));
}

bool rects_overlap(const Layer& a, const Layer& b) {
    return a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h && b.y < a.y + a.h;
}

}  // namespace

void SceneSpec::validate() const {
    if (width <= 0 || height <= 0) throw std::invalid_argument("scene: bad image size");
    if (background_disparity < 0.0)
        throw std::invalid_argument("scene: background disparity must be >= 0");
    for (size_t i = 0; i < layers.size(); ++i) {
        const Layer& l = layers[i];
        if (l.w <= 0 || l.h <= 0) throw std::invalid_argument("scene: degenerate layer rect");
        if (l.x < 0 || l.y < 0 || l.x + l.w > width || l.y + l.h > height)
            throw std::invalid_argument("scene: layer rect outside image");
        if (!(l.disparity > background_disparity))
            throw std::invalid_argument("scene: layer disparity must exceed the background");
        for (size_t j = i + 1; j < layers.size(); ++j)
            if (rects_overlap(l, layers[j]))
                throw std::invalid_argument("scene: layer rects must be disjoint");
    }
}

SynthScene render(const SceneSpec& spec, uint32_t seed) {
    spec.validate();
    const int W = spec.width, H = spec.height;

    double max_d = spec.background_disparity;
    for (const Layer& l : spec.layers) max_d = std::max(max_d, l.disparity);
    const int ext = W + static_cast<int>(std::ceil(max_d)) + 1;

    const TextureGrid bg_tex(spec.background_texture, ext, H, mix_seed(seed, 0xffffffffu, spec.background_texture.seed));
    std::vector<TextureGrid> layer_tex;
    layer_tex.reserve(spec.layers.size());
    for (size_t i = 0; i < spec.layers.size(); ++i)
        layer_tex.emplace_back(spec.layers[i].texture, ext, H,
                               mix_seed(seed, static_cast<uint32_t>(i), spec.layers[i].texture.seed));

    // Top surface per left pixel: largest disparity wins, later layer on ties.
    auto top_left = [&](int u, int v) -> int {  // -1 = background
        int best = -1;
        double best_d = spec.background_disparity;
        for (size_t i = 0; i < spec.layers.size(); ++i) {
            const Layer& l = spec.layers[i];
            if (u >= l.x && u < l.x + l.w && v >= l.y && v < l.y + l.h && l.disparity >= best_d) {
                best = static_cast<int>(i);
                best_d = l.disparity;
            }
        }
        return best;
    };
    // Top surface per right pixel: each layer shifted left by its disparity.
    auto top_right = [&](int x, int v) -> int {
        int best = -1;
        double best_d = spec.background_disparity;
        for (size_t i = 0; i < spec.layers.size(); ++i) {
            const Layer& l = spec.layers[i];
            if (v < l.y || v >= l.y + l.h) continue;
            if (x + l.disparity >= l.x && x + l.disparity < l.x + l.w && l.disparity >= best_d) {
                best = static_cast<int>(i);
                best_d = l.disparity;
            }
        }
        return best;
    };

    SynthScene scene;
    scene.left = IntensityImage(W, H);
    scene.right = IntensityImage(W, H);
    scene.gt_disp = DisparityMap(W, H);
    scene.gt_mask = OcclusionMask(W, H);

    for (int v = 0; v < H; ++v) {
        for (int u = 0; u < W; ++u) {
            const int t = top_left(u, v);
            const double d = t < 0 ? spec.background_disparity : spec.layers[t].disparity;
            scene.gt_disp.at(u, v) = d;
            scene.left.at(u, v) = t < 0 ? bg_tex.at(u, v) : layer_tex[t].at(u, v);
        }
        for (int x = 0; x < W; ++x) {
            const int t = top_right(x, v);
            if (t < 0)
                scene.right.at(x, v) = bg_tex.sample(x + spec.background_disparity, v);
            else
                scene.right.at(x, v) = layer_tex[t].sample(x + spec.layers[t].disparity, v);
        }
    }

    // Analytic labels: a pixel whose right-image target falls outside the
    // frame is Exclusive; one whose target is covered by a strictly nearer
    // layer is Occluded.
    for (int v = 0; v < H; ++v) {
        for (int u = 0; u < W; ++u) {
            const double d1 = scene.gt_disp.at(u, v);
            const double xr = u - d1;
            if (xr < 0.0) {
                scene.gt_mask.at(u, v) = Label::Exclusive;
                continue;
            }
            Label lab = Label::Visible;
            for (const Layer& l : spec.layers) {
                if (l.disparity <= d1) continue;
                if (v < l.y || v >= l.y + l.h) continue;
                if (xr >= l.x - l.disparity && xr < l.x + l.w - l.disparity) {
                    lab = Label::Occluded;
                    break;
                }
            }
            scene.gt_mask.at(u, v) = lab;
        }
    }
    return scene;
}

namespace {

Texture parse_texture(std::istringstream& in, int line_no) {
    std::string kind;
    if (!(in >> kind)) throw std::invalid_argument("scene: missing texture on line " + std::to_string(line_no));
    Texture tex;
    if (kind == "checker") {
        tex.kind = TextureKind::Checker;
        if (!(in >> tex.period) || tex.period < 1)
            throw std::invalid_argument("scene: bad checker period on line " + std::to_string(line_no));
    } else if (kind == "noise") {
        tex.kind = TextureKind::Noise;
        if (!(in >> tex.seed >> tex.smoothness) || tex.smoothness < 0)
            throw std::invalid_argument("scene: bad noise params on line " + std::to_string(line_no));
    } else if (kind == "gradient") {
        tex.kind = TextureKind::Gradient;
    } else {
        throw std::invalid_argument("scene: unknown texture '" + kind + "' on line " +
                                    std::to_string(line_no));
    }
    return tex;
}

}  // namespace

SceneSpec parse_scene_spec(const std::string& text) {
    SceneSpec spec;
    bool have_size = false, have_background = false;
    std::istringstream lines(text);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream in(line);
        std::string word;
        if (!(in >> word)) continue;
        if (word == "size") {
            if (!(in >> spec.width >> spec.height))
                throw std::invalid_argument("scene: bad size on line " + std::to_string(line_no));
            have_size = true;
        } else if (word == "background") {
            if (!(in >> spec.background_disparity))
                throw std::invalid_argument("scene: bad background on line " + std::to_string(line_no));
            spec.background_texture = parse_texture(in, line_no);
            have_background = true;
        } else if (word == "layer") {
            Layer l;
            if (!(in >> l.x >> l.y >> l.w >> l.h >> l.disparity))
                throw std::invalid_argument("scene: bad layer on line " + std::to_string(line_no));
            l.texture = parse_texture(in, line_no);
            spec.layers.push_back(l);
        } else {
            throw std::invalid_argument("scene: unknown directive '" + word + "' on line " +
                                        std::to_string(line_no));
        }
    }
    if (!have_size) throw std::invalid_argument("scene: missing 'size' line");
    if (!have_background) throw std::invalid_argument("scene: missing 'background' line");
    spec.validate();
    return spec;
}

SceneSpec load_scene_spec(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("scene: cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_scene_spec(buf.str());
}

}  // namespace stereo
