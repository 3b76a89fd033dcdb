#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "transmask/morphology.hpp"
#include "transmask/raster.hpp"

namespace transmask {

/// Where erosion happens relative to the union of non-transparent instances.
enum class ErosionOrder {
    per_instance,  // erode every instance, then union (keeps gaps between touching objects)
    union_first,   // union all instances, then erode the blob
};

inline const char* to_string(ErosionOrder order) {
    return order == ErosionOrder::per_instance ? "per_instance" : "union_first";
}

struct MaskingConfig {
    ElementSize erosion_element{5, 5};
    std::size_t erosion_iterations = 3;
    bool erosion_enabled = true;
    ErosionOrder erosion_order = ErosionOrder::per_instance;

    void validate() const { erosion_element.validate(); }

    friend bool operator==(const MaskingConfig&, const MaskingConfig&) = default;
};

/// Instance masks for one frame, as produced by an upstream segmenter.
struct MaskSet {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<BinaryMask> trans_masks;
    std::vector<BinaryMask> non_trans_masks;

    MaskSet() = default;
    MaskSet(std::size_t w, std::size_t h) : width(w), height(h) {}

    void validate() const {
        if (width == 0 || height == 0) {
            throw DimensionError("mask set dimensions must be positive");
        }
        auto check = [&](const std::vector<BinaryMask>& list, const char* kind) {
            for (const auto& m : list) {
                if (m.width() != width || m.height() != height) {
                    throw DimensionError(std::string(kind) + " mask is " + std::to_string(m.width()) +
                                         "x" + std::to_string(m.height()) + ", frame is " +
                                         std::to_string(width) + "x" + std::to_string(height));
                }
            }
        };
        check(trans_masks, "transparent");
        check(non_trans_masks, "non-transparent");
    }
};

struct ComposedMasks {
    BinaryMask final_mask;          // 1 = depth kept, 0 = depth zeroed
    BinaryMask trans_union;
    BinaryMask eroded_non_trans_union;
};

struct TrainingPair {
    RgbImage masked_rgb;
    DepthMap masked_depth;
    DepthMap target_depth;
    BinaryMask trans_mask;
    BinaryMask final_mask;

    friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

/// Union of `masks`, or an all-zero mask of the given size for an empty list.
inline BinaryMask union_or_empty(const std::vector<BinaryMask>& masks, std::size_t width,
                                 std::size_t height) {
    if (masks.empty()) {
        return BinaryMask(width, height, 0);
    }
    return mask_union(masks);
}

inline ComposedMasks compose_final_mask(const MaskSet& masks, const MaskingConfig& cfg) {
    cfg.validate();
    masks.validate();
    const std::size_t w = masks.width;
    const std::size_t h = masks.height;

    BinaryMask eroded(w, h, 0);
    if (!cfg.erosion_enabled) {
        eroded = union_or_empty(masks.non_trans_masks, w, h);
    } else if (cfg.erosion_order == ErosionOrder::union_first) {
        eroded = erode(union_or_empty(masks.non_trans_masks, w, h), cfg.erosion_element,
                       cfg.erosion_iterations);
    } else {
        for (const auto& m : masks.non_trans_masks) {
            const BinaryMask shrunk = erode(m, cfg.erosion_element, cfg.erosion_iterations);
            eroded = mask_union({eroded, shrunk});
        }
    }

    BinaryMask trans = union_or_empty(masks.trans_masks, w, h);
    BinaryMask final_mask = complement(mask_union({eroded, trans}));
    return {std::move(final_mask), std::move(trans), std::move(eroded)};
}

/// Builds (I', D', D'_gt) for one frame: transparent pixels are blacked out in
/// RGB and zeroed in both depths; depth is additionally zeroed wherever the
/// final mask is 0.
inline TrainingPair synthesize_pair(const RgbImage& rgb, const DepthMap& depth,
                                    const MaskSet& masks, const MaskingConfig& cfg) {
    require_same_shape(rgb, depth, "synthesize_pair rgb/depth");
    if (masks.width != depth.width() || masks.height != depth.height()) {
        throw DimensionError("synthesize_pair: mask set does not match frame size");
    }
    ComposedMasks composed = compose_final_mask(masks, cfg);

    TrainingPair pair;
    pair.masked_rgb = rgb;
    pair.masked_depth = depth;
    pair.target_depth = depth;
    for (std::size_t i = 0; i < depth.size(); ++i) {
        if (composed.trans_union[i]) {
            pair.masked_rgb[i] = Rgb{};
            pair.target_depth[i] = 0.0f;
        }
        if (!composed.final_mask[i]) {
            pair.masked_depth[i] = 0.0f;
        }
    }
    pair.trans_mask = std::move(composed.trans_union);
    pair.final_mask = std::move(composed.final_mask);
    return pair;
}

/// Lists every violated TrainingPair invariant; empty means the pair is consistent.
inline std::vector<std::string> pair_violations(const TrainingPair& pair, double tol = 1e-6) {
    std::vector<std::string> out;
    const auto& d = pair.masked_depth;
    if (!d.same_shape(pair.target_depth) || !d.same_shape(pair.masked_rgb) ||
        !d.same_shape(pair.trans_mask) || !d.same_shape(pair.final_mask)) {
        out.emplace_back("rasters differ in size");
        return out;
    }
    std::size_t bad_final = 0, bad_trans = 0, bad_copy = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!pair.final_mask[i] && d[i] != 0.0f) {
            ++bad_final;
        }
        if (pair.trans_mask[i] && (pair.target_depth[i] != 0.0f || pair.masked_rgb[i] != Rgb{})) {
            ++bad_trans;
        }
        if (!pair.trans_mask[i] && pair.final_mask[i] &&
            std::abs(double(d[i]) - double(pair.target_depth[i])) > tol) {
            ++bad_copy;
        }
    }
    if (bad_final) out.push_back(std::to_string(bad_final) + " pixels keep depth where final_mask=0");
    if (bad_trans) out.push_back(std::to_string(bad_trans) + " transparent pixels not cleared");
    if (bad_copy) out.push_back(std::to_string(bad_copy) + " kept pixels differ from target depth");
    return out;
}

}  // namespace transmask
