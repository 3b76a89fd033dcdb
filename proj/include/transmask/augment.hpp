#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>

#include "transmask/maskgen.hpp"
#include "transmask/raster.hpp"

namespace transmask {

inline constexpr double kDefaultNoiseSigma = 0.005;  // meters; toolkit default

struct AugmentSpec {
    bool hflip = false;
    unsigned rotation_quarters = 0;  // clockwise, in units of 90 degrees
    double noise_sigma = 0.0;        // meters
    std::uint64_t seed = 0;

    void validate() const {
        if (!(noise_sigma >= 0.0)) {
            throw ConfigError("noise_sigma must be >= 0");
        }
        if (rotation_quarters > 3) {
            throw ConfigError("rotation must be one of 0, 90, 180, 270 degrees");
        }
    }

    unsigned rotation_degrees() const { return rotation_quarters * 90; }

    friend bool operator==(const AugmentSpec&, const AugmentSpec&) = default;
};

/// SplitMix64 step; used to derive independent per-frame seeds from a run seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Draws a flip, a quarter-turn rotation and a noise seed from `seed`.
inline AugmentSpec random_augment(std::uint64_t seed, double noise_sigma = kDefaultNoiseSigma) {
    std::mt19937_64 rng(seed);
    AugmentSpec spec;
    spec.hflip = (rng() & 1u) != 0;
    spec.rotation_quarters = static_cast<unsigned>(rng() % 4);
    spec.noise_sigma = noise_sigma;
    spec.seed = rng();
    return spec;
}

template <typename T>
Raster<T> hflip(const Raster<T>& in) {
    Raster<T> out = in;
    const std::size_t w = in.width();
    for (std::size_t y = 0; y < in.height(); ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            out(x, y) = in(w - 1 - x, y);
        }
    }
    return out;
}

/// 90 degree clockwise rotation; the result is height x width.
template <typename T>
Raster<T> rotate_cw(const Raster<T>& in) {
    const std::size_t w = in.width();
    const std::size_t h = in.height();
    Raster<T> out(h, w, in[0]);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            out(h - 1 - y, x) = in(x, y);
        }
    }
    return out;
}

template <typename T>
Raster<T> transform(const Raster<T>& in, const AugmentSpec& spec) {
    Raster<T> out = spec.hflip ? hflip(in) : in;
    for (unsigned q = 0; q < spec.rotation_quarters; ++q) {
        out = rotate_cw(out);
    }
    return out;
}

/// Applies the same flip/rotation to every raster of the pair, then adds
/// seeded gaussian noise to valid depth. The noise sample for a pixel is
/// shared by masked and target depth so kept pixels still agree; samples that
/// would push depth to <= 0 are dropped.
inline TrainingPair apply_augment(const TrainingPair& pair, const AugmentSpec& spec) {
    spec.validate();
    TrainingPair out{transform(pair.masked_rgb, spec), transform(pair.masked_depth, spec),
                     transform(pair.target_depth, spec), transform(pair.trans_mask, spec),
                     transform(pair.final_mask, spec)};
    if (spec.noise_sigma == 0.0) {
        return out;
    }
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (std::size_t i = 0; i < out.target_depth.size(); ++i) {
        const double n = noise(rng);  // drawn for every pixel so the stream is position-stable
        const float target = out.target_depth[i];
        if (target <= 0.0f) {
            continue;
        }
        const auto noisy = static_cast<float>(double(target) + n);
        if (!(noisy > 0.0f)) {
            continue;
        }
        out.target_depth[i] = noisy;
        if (out.masked_depth[i] > 0.0f) {
            out.masked_depth[i] = noisy;
        }
    }
    return out;
}

}  // namespace transmask
