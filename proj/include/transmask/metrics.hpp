#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>

#include "transmask/raster.hpp"

namespace transmask {

inline constexpr std::array<double, 3> kSigmaThresholds{1.05, 1.10, 1.25};

struct MetricsReport {
    double rmse = 0.0;       // meters
    double rel = 0.0;
    double mae = 0.0;        // meters
    double sigma_105 = 0.0;  // percent
    double sigma_110 = 0.0;
    double sigma_125 = 0.0;
    std::size_t n_pixels = 0;
};

/// Running sums over evaluated pixels. Accumulating several frames and
/// finishing once pools their pixels, which is how multi-frame reports are
/// aggregated.
class MetricsAccumulator {
public:
    void add(double pred, double gt) {
        const double diff = pred - gt;
        sq_ += diff * diff;
        abs_ += std::abs(diff);
        rel_ += std::abs(diff) / gt;
        if (pred > 0.0) {
            const double ratio = std::max(pred / gt, gt / pred);
            for (std::size_t t = 0; t < kSigmaThresholds.size(); ++t) {
                if (ratio < kSigmaThresholds[t]) {
                    ++hits_[t];
                }
            }
        }
        ++n_;
    }

    /// Adds every pixel with mask = 1 and gt > 0.
    void add(const DepthMap& pred, const DepthMap& gt, const BinaryMask& mask) {
        require_same_shape(pred, gt, "evaluate pred/gt");
        require_same_shape(pred, mask, "evaluate mask");
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (mask[i] && gt[i] > 0.0f) {
                add(pred[i], gt[i]);
            }
        }
    }

    void merge(const MetricsAccumulator& other) {
        sq_ += other.sq_;
        abs_ += other.abs_;
        rel_ += other.rel_;
        for (std::size_t t = 0; t < hits_.size(); ++t) {
            hits_[t] += other.hits_[t];
        }
        n_ += other.n_;
    }

    std::size_t count() const noexcept { return n_; }

    MetricsReport report() const {
        if (n_ == 0) {
            throw EmptyEvaluationError("no pixels to evaluate: mask selects no pixel with valid ground truth");
        }
        const double n = double(n_);
        MetricsReport r;
        r.rmse = std::sqrt(sq_ / n);
        r.rel = rel_ / n;
        r.mae = abs_ / n;
        r.sigma_105 = 100.0 * double(hits_[0]) / n;
        r.sigma_110 = 100.0 * double(hits_[1]) / n;
        r.sigma_125 = 100.0 * double(hits_[2]) / n;
        r.n_pixels = n_;
        return r;
    }

private:
    double sq_ = 0.0;
    double abs_ = 0.0;
    double rel_ = 0.0;
    std::array<std::size_t, 3> hits_{};
    std::size_t n_ = 0;
};

/// Metrics over D_t = {mask = 1 and gt > 0}. A predicted 0 inside D_t is
/// scored as a full miss rather than skipped.
inline MetricsReport evaluate(const DepthMap& pred, const DepthMap& gt, const BinaryMask& trans_mask) {
    MetricsAccumulator acc;
    acc.add(pred, gt, trans_mask);
    return acc.report();
}

/// Single-line `key=value` form. Distances carry six decimals, percentages two.
inline std::string to_key_value(const MetricsReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "n_pixels=%zu rmse=%.6f rel=%.6f mae=%.6f sigma_105=%.2f sigma_110=%.2f sigma_125=%.2f",
                  r.n_pixels, r.rmse, r.rel, r.mae, r.sigma_105, r.sigma_110, r.sigma_125);
    return buf;
}

inline constexpr double kDefaultErrorMapMaxRel = 0.10;
inline constexpr Rgb kErrorMapBackground{255, 255, 255};
inline constexpr Rgb kErrorMapMaxColor{255, 0, 0};

/// Color for a relative error: t = min(rel, max_rel) / max_rel, each channel is
/// round-half-away(background * (1 - t) + red * t).
inline Rgb error_ramp_color(double rel, double max_rel) {
    const double t = std::clamp(rel, 0.0, max_rel) / max_rel;
    auto mix = [t](std::uint8_t lo, std::uint8_t hi) {
        return static_cast<std::uint8_t>(std::lround(double(lo) * (1.0 - t) + double(hi) * t));
    };
    return {mix(kErrorMapBackground.r, kErrorMapMaxColor.r), mix(kErrorMapBackground.g, kErrorMapMaxColor.g),
            mix(kErrorMapBackground.b, kErrorMapMaxColor.b)};
}

/// Relative-error visualization |d - d*| / d*. Pixels outside the mask or
/// without ground truth stay at the background color.
inline RgbImage error_map(const DepthMap& pred, const DepthMap& gt, const BinaryMask& eval_mask,
                          double max_rel = kDefaultErrorMapMaxRel) {
    if (!(max_rel > 0.0) || !std::isfinite(max_rel)) {
        throw ConfigError("error map max_rel must be a positive finite number");
    }
    require_same_shape(pred, gt, "error_map pred/gt");
    require_same_shape(pred, eval_mask, "error_map mask");
    RgbImage out(pred.width(), pred.height(), kErrorMapBackground);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!eval_mask[i] || gt[i] <= 0.0f) {
            continue;
        }
        const double rel = std::abs(double(pred[i]) - double(gt[i])) / double(gt[i]);
        out[i] = error_ramp_color(rel, max_rel);
    }
    return out;
}

}  // namespace transmask
