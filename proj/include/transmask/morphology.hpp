#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "transmask/raster.hpp"

namespace transmask {

/// Size of a rectangular structuring element. Both sides must be odd so the
/// element has a center pixel.
struct ElementSize {
    std::size_t width = 5;
    std::size_t height = 5;

    void validate() const {
        if (width == 0 || height == 0 || width % 2 == 0 || height % 2 == 0) {
            throw ConfigError("structuring element must have odd positive sides, got " +
                              std::to_string(width) + "x" + std::to_string(height));
        }
    }

    friend bool operator==(const ElementSize&, const ElementSize&) = default;
};

namespace detail {

// One-dimensional erosion along a line of `count` samples spaced by `stride`.
// A sample survives iff all samples within `radius` on both sides are set and
// inside the line; running length of consecutive ones gives that in O(n).
inline void erode_line(const std::uint8_t* in, std::uint8_t* out, std::size_t count,
                       std::size_t stride, std::size_t radius) {
    const std::size_t span = 2 * radius + 1;
    std::size_t run = 0;  // consecutive ones ending at i
    for (std::size_t i = 0; i < count; ++i) {
        run = in[i * stride] ? run + 1 : 0;
        out[i * stride] = 0;
        // Window [i - 2r, i] complete means center i - r survives.
        if (i >= 2 * radius && run >= span) {
            out[(i - radius) * stride] = 1;
        }
    }
}

}  // namespace detail

/// Binary erosion with a rectangular element, applied `iterations` times.
/// Pixels outside the image count as 0, so anything within the element's
/// half-size of the border is always removed.
inline BinaryMask erode(const BinaryMask& mask, ElementSize element, std::size_t iterations) {
    element.validate();
    BinaryMask current = mask;
    if (iterations == 0 || mask.empty()) {
        return current;
    }
    const std::size_t w = mask.width();
    const std::size_t h = mask.height();
    BinaryMask scratch(w, h, 0);
    const std::size_t rx = element.width / 2;
    const std::size_t ry = element.height / 2;

    for (std::size_t it = 0; it < iterations; ++it) {
        // Rectangles are separable: horizontal pass then vertical pass.
        for (std::size_t y = 0; y < h; ++y) {
            detail::erode_line(&current[y * w], &scratch[y * w], w, 1, rx);
        }
        for (std::size_t x = 0; x < w; ++x) {
            detail::erode_line(&scratch[x], &current[x], h, w, ry);
        }
    }
    return current;
}

/// Per-pixel logical OR of a nonempty list of equally sized masks.
inline BinaryMask mask_union(std::span<const BinaryMask> masks) {
    if (masks.empty()) {
        throw DimensionError("mask_union requires at least one mask");
    }
    BinaryMask out = masks.front();
    for (std::size_t m = 1; m < masks.size(); ++m) {
        require_same_shape(out, masks[m], "mask_union");
        const auto src = masks[m].pixels();
        auto dst = out.pixels();
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] = static_cast<std::uint8_t>(dst[i] | src[i]);
        }
    }
    return out;
}

inline BinaryMask mask_union(std::initializer_list<BinaryMask> masks) {
    return mask_union(std::span<const BinaryMask>(masks.begin(), masks.size()));
}

/// J - mask.
inline BinaryMask complement(const BinaryMask& mask) {
    BinaryMask out = mask;
    for (auto& v : out.pixels()) {
        v = static_cast<std::uint8_t>(1 - v);
    }
    return out;
}

inline BinaryMask intersect(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b, "intersect");
    BinaryMask out = a;
    const auto src = b.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = static_cast<std::uint8_t>(dst[i] & src[i]);
    }
    return out;
}

inline std::size_t count_set(const BinaryMask& mask) {
    std::size_t n = 0;
    for (auto v : mask.pixels()) {
        n += v;
    }
    return n;
}

}  // namespace transmask
