#pragma once

#include <cmath>
#include <cstddef>

#include "transmask/geometry.hpp"
#include "transmask/morphology.hpp"
#include "transmask/raster.hpp"

namespace transmask {

inline constexpr double kDefaultNormalWeight = 0.1;  // alpha
inline constexpr double kDefaultRegionWeight = 0.9;  // beta

struct LossOptions {
    double alpha = kDefaultNormalWeight;
    double beta = kDefaultRegionWeight;
    // Drop pixels whose ground truth is missing (0). Turning this off scores
    // them against 0 like any other pixel.
    bool exclude_invalid_gt = true;
};

struct RegionLoss {
    double value = 0.0;
    std::size_t count = 0;
};

struct LossBreakdown {
    double l1 = 0.0;  // outside transparent regions
    double l2 = 0.0;  // inside transparent regions
    double combined = 0.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

/// beta * l2 + (1 - beta) * l1
inline double combine_losses(double l1, double l2, double beta) {
    return beta * l2 + (1.0 - beta) * l1;
}

/// Mean of squared depth residual plus alpha * (1 - cos) between normals over
/// the region. The normal term is 0 wherever either normal is invalid.
inline RegionLoss region_loss(const DepthMap& pred, const DepthMap& gt, const NormalMap& pred_normals,
                              const NormalMap& gt_normals, const BinaryMask& region, double alpha,
                              bool exclude_invalid_gt = true) {
    if (!(alpha >= 0.0)) {
        throw ConfigError("loss weight alpha must be >= 0");
    }
    require_same_shape(pred, gt, "region_loss pred/gt");
    require_same_shape(pred, region, "region_loss region");
    require_same_shape(pred, pred_normals.normals, "region_loss pred normals");
    require_same_shape(pred, gt_normals.normals, "region_loss gt normals");

    const ScalarMap cosine = normal_cosine_map(pred_normals, gt_normals);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!region[i] || (exclude_invalid_gt && gt[i] <= 0.0f)) {
            continue;
        }
        const double r = double(pred[i]) - double(gt[i]);
        double term = r * r;
        if (cosine.valid[i]) {
            term += alpha * (1.0 - cosine.values[i]);
        }
        sum += term;
        ++count;
    }
    return {count ? sum / double(count) : 0.0, count};
}

inline RegionLoss region_loss(const DepthMap& pred, const DepthMap& gt, const BinaryMask& region,
                              const CameraIntrinsics& k, double alpha,
                              bool exclude_invalid_gt = true) {
    require_same_shape(pred, gt, "region_loss pred/gt");
    return region_loss(pred, gt, normals_from_depth(pred, k), normals_from_depth(gt, k), region, alpha,
                       exclude_invalid_gt);
}

/// Loss over everything except transparent regions.
inline RegionLoss self_supervised_loss(const DepthMap& pred, const DepthMap& gt,
                                       const BinaryMask& trans_mask, const CameraIntrinsics& k,
                                       double alpha = kDefaultNormalWeight) {
    require_same_shape(pred, trans_mask, "self_supervised_loss");
    return region_loss(pred, gt, complement(trans_mask), k, alpha);
}

inline LossBreakdown supervised_loss(const DepthMap& pred, const DepthMap& gt_full,
                                     const BinaryMask& trans_mask, const CameraIntrinsics& k,
                                     const LossOptions& opts = {}) {
    if (!(opts.beta >= 0.0 && opts.beta <= 1.0)) {
        throw ConfigError("loss weight beta must lie in [0, 1]");
    }
    require_same_shape(pred, gt_full, "supervised_loss pred/gt");
    require_same_shape(pred, trans_mask, "supervised_loss mask");
    const NormalMap pn = normals_from_depth(pred, k);
    const NormalMap gn = normals_from_depth(gt_full, k);
    const RegionLoss inside = region_loss(pred, gt_full, pn, gn, trans_mask, opts.alpha,
                                          opts.exclude_invalid_gt);
    const RegionLoss outside = region_loss(pred, gt_full, pn, gn, complement(trans_mask), opts.alpha,
                                           opts.exclude_invalid_gt);
    LossBreakdown out;
    out.l1 = outside.value;
    out.n1 = outside.count;
    out.l2 = inside.value;
    out.n2 = inside.count;
    out.combined = combine_losses(out.l1, out.l2, opts.beta);
    return out;
}

}  // namespace transmask
