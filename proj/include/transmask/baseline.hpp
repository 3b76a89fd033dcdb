#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <vector>

#include "transmask/raster.hpp"

namespace transmask {

inline constexpr std::size_t kDefaultCompletionIterations = 10000;
inline constexpr double kDefaultCompletionTol = 1e-5;  // meters

struct CompletionResult {
    DepthMap depth;
    std::size_t iterations = 0;   // sweeps actually run
    double max_update = 0.0;      // largest change in the last sweep
    bool converged = true;
    std::size_t components = 0;
    std::size_t unfilled_components = 0;  // no valid depth on their border; left at 0
    std::size_t unfilled_pixels = 0;
};

namespace detail {

struct FillLayout {
    std::vector<std::int32_t> component;  // -1 outside the fill region
    std::vector<std::uint8_t> fillable;   // per component
};

inline constexpr std::array<std::array<int, 2>, 4> kNeighbors4{{{-1, 0}, {0, -1}, {1, 0}, {0, 1}}};

inline void check_fill_inputs(const DepthMap& masked, const BinaryMask& fill_region) {
    require_same_shape(masked, fill_region, "complete_depth");
    for (std::size_t i = 0; i < masked.size(); ++i) {
        if (fill_region[i] && masked[i] != 0.0f) {
            throw ValidationError("fill region must only cover pixels with missing depth");
        }
    }
}

// Labels 4-connected fill components and marks the ones touching valid depth.
inline FillLayout label_fill_components(const DepthMap& masked, const BinaryMask& fill_region) {
    const auto w = static_cast<std::ptrdiff_t>(masked.width());
    const auto h = static_cast<std::ptrdiff_t>(masked.height());
    FillLayout layout;
    layout.component.assign(masked.size(), -1);
    std::deque<std::size_t> queue;
    for (std::size_t seed = 0; seed < masked.size(); ++seed) {
        if (!fill_region[seed] || layout.component[seed] >= 0) {
            continue;
        }
        const auto label = static_cast<std::int32_t>(layout.fillable.size());
        layout.fillable.push_back(0);
        layout.component[seed] = label;
        queue.push_back(seed);
        while (!queue.empty()) {
            const std::size_t i = queue.front();
            queue.pop_front();
            const auto x = static_cast<std::ptrdiff_t>(i) % w;
            const auto y = static_cast<std::ptrdiff_t>(i) / w;
            for (const auto& [dx, dy] : kNeighbors4) {
                const std::ptrdiff_t nx = x + dx, ny = y + dy;
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
                    continue;
                }
                const auto j = static_cast<std::size_t>(ny * w + nx);
                if (fill_region[j]) {
                    if (layout.component[j] < 0) {
                        layout.component[j] = label;
                        queue.push_back(j);
                    }
                } else if (masked[j] > 0.0f) {
                    layout.fillable[label] = 1;
                }
            }
        }
    }
    return layout;
}

// Breadth-first propagation of the closest valid depth into fill pixels.
inline std::vector<double> nearest_valid_seed(const DepthMap& masked, const BinaryMask& fill_region) {
    const auto w = static_cast<std::ptrdiff_t>(masked.width());
    const auto h = static_cast<std::ptrdiff_t>(masked.height());
    std::vector<double> values(masked.pixels().begin(), masked.pixels().end());
    std::vector<std::uint8_t> reached(masked.size(), 0);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < masked.size(); ++i) {
        if (!fill_region[i] && masked[i] > 0.0f) {
            reached[i] = 1;
            queue.push_back(i);
        }
    }
    while (!queue.empty()) {
        const std::size_t i = queue.front();
        queue.pop_front();
        const auto x = static_cast<std::ptrdiff_t>(i) % w;
        const auto y = static_cast<std::ptrdiff_t>(i) / w;
        for (const auto& [dx, dy] : kNeighbors4) {
            const std::ptrdiff_t nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
                continue;
            }
            const auto j = static_cast<std::size_t>(ny * w + nx);
            if (fill_region[j] && !reached[j]) {
                reached[j] = 1;
                values[j] = values[i];
                queue.push_back(j);
            }
        }
    }
    return values;
}

}  // namespace detail

/// Fills every fill-region pixel with the depth of its nearest valid pixel
/// (4-connected geodesic distance, ties broken by scan order). Used to seed
/// the harmonic fill and as a reference point for it.
inline DepthMap nearest_valid_fill(const DepthMap& masked, const BinaryMask& fill_region) {
    detail::check_fill_inputs(masked, fill_region);
    const std::vector<double> values = detail::nearest_valid_seed(masked, fill_region);
    DepthMap out = masked;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<float>(values[i]);
    }
    return out;
}

/// Harmonic hole filling: Gauss-Seidel sweeps of the 4-neighbour mean over
/// the fill region, seeded by nearest-valid depth. Neighbours that are
/// neither valid depth nor part of the fill region are ignored. Stops when
/// the largest per-sweep update drops below `tol` or after `max_iterations`.
inline CompletionResult complete_depth(const DepthMap& masked, const BinaryMask& fill_region,
                                       std::size_t max_iterations = kDefaultCompletionIterations,
                                       double tol = kDefaultCompletionTol) {
    if (max_iterations == 0) {
        throw ConfigError("complete_depth needs at least one iteration");
    }
    if (!(tol >= 0.0)) {
        throw ConfigError("complete_depth tolerance must be >= 0");
    }
    detail::check_fill_inputs(masked, fill_region);

    const detail::FillLayout layout = detail::label_fill_components(masked, fill_region);
    std::vector<double> values = detail::nearest_valid_seed(masked, fill_region);

    const auto w = static_cast<std::ptrdiff_t>(masked.width());
    const auto h = static_cast<std::ptrdiff_t>(masked.height());
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < masked.size(); ++i) {
        const auto c = layout.component[i];
        if (c >= 0 && layout.fillable[static_cast<std::size_t>(c)]) {
            active.push_back(i);
        }
    }
    // Known = valid input depth, or a pixel being filled.
    std::vector<std::uint8_t> known(masked.size(), 0);
    for (std::size_t i = 0; i < masked.size(); ++i) {
        known[i] = (!fill_region[i] && masked[i] > 0.0f) ? 1 : 0;
    }
    for (auto i : active) {
        known[i] = 1;
    }

    CompletionResult result;
    result.components = layout.fillable.size();
    result.converged = true;
    if (!active.empty()) {
        result.converged = false;
        for (std::size_t sweep = 0; sweep < max_iterations; ++sweep) {
            double max_update = 0.0;
            for (auto i : active) {
                const auto x = static_cast<std::ptrdiff_t>(i) % w;
                const auto y = static_cast<std::ptrdiff_t>(i) / w;
                double sum = 0.0;
                int n = 0;
                for (const auto& [dx, dy] : detail::kNeighbors4) {
                    const std::ptrdiff_t nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
                        continue;
                    }
                    const auto j = static_cast<std::size_t>(ny * w + nx);
                    if (known[j]) {
                        sum += values[j];
                        ++n;
                    }
                }
                const double next = sum / n;
                max_update = std::max(max_update, std::abs(next - values[i]));
                values[i] = next;
            }
            result.iterations = sweep + 1;
            result.max_update = max_update;
            if (max_update < tol) {
                result.converged = true;
                break;
            }
        }
    }

    result.depth = masked;
    for (auto i : active) {
        result.depth[i] = static_cast<float>(values[i]);
    }
    for (std::size_t c = 0; c < layout.fillable.size(); ++c) {
        result.unfilled_components += layout.fillable[c] ? 0 : 1;
    }
    for (std::size_t i = 0; i < masked.size(); ++i) {
        const auto c = layout.component[i];
        if (c >= 0 && !layout.fillable[static_cast<std::size_t>(c)]) {
            ++result.unfilled_pixels;
        }
    }
    return result;
}

}  // namespace transmask
