#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "transmask/errors.hpp"

namespace transmask {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Per-pixel value constraints checked when a raster is built from external data.
template <typename T>
struct PixelTraits {
    static bool valid(const T&) { return true; }
    static constexpr const char* name = "raster";
};

/// Depth in meters: finite and non-negative, 0 means missing.
template <>
struct PixelTraits<float> {
    static bool valid(float v) { return std::isfinite(v) && v >= 0.0f; }
    static constexpr const char* name = "depth map";
};

/// Binary mask: strictly {0,1}.
template <>
struct PixelTraits<std::uint8_t> {
    static bool valid(std::uint8_t v) { return v <= 1; }
    static constexpr const char* name = "binary mask";
};

template <>
struct PixelTraits<Rgb> {
    static bool valid(const Rgb&) { return true; }
    static constexpr const char* name = "rgb image";
};

/// Row-major single-plane raster. A default-constructed raster is 0x0 and
/// only serves as a placeholder; every constructor that takes dimensions
/// rejects zero or overflowing sizes.
template <typename T>
class Raster {
public:
    using value_type = T;

    Raster() = default;

    Raster(std::size_t width, std::size_t height, const T& fill = T{})
        : width_(width), height_(height), data_(checked_area(width, height), fill) {
        if (!PixelTraits<T>::valid(fill)) {
            throw ConfigError(std::string("invalid fill value for ") + PixelTraits<T>::name);
        }
    }

    static Raster from_data(std::size_t width, std::size_t height, std::vector<T> data) {
        if (checked_area(width, height) != data.size()) {
            throw DimensionError(std::string(PixelTraits<T>::name) + ": " + std::to_string(width) +
                                 "x" + std::to_string(height) + " does not match " +
                                 std::to_string(data.size()) + " values");
        }
        for (const T& v : data) {
            if (!PixelTraits<T>::valid(v)) {
                throw ConfigError(std::string("invalid pixel value in ") + PixelTraits<T>::name);
            }
        }
        Raster r;
        r.width_ = width;
        r.height_ = height;
        r.data_ = std::move(data);
        return r;
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    const T& operator()(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }
    T& operator()(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
    const T& operator[](std::size_t i) const { return data_[i]; }
    T& operator[](std::size_t i) { return data_[i]; }

    bool contains(std::ptrdiff_t x, std::ptrdiff_t y) const noexcept {
        return x >= 0 && y >= 0 && static_cast<std::size_t>(x) < width_ &&
               static_cast<std::size_t>(y) < height_;
    }

    std::span<const T> pixels() const noexcept { return data_; }
    std::span<T> pixels() noexcept { return data_; }

    template <typename U>
    bool same_shape(const Raster<U>& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    static std::size_t checked_area(std::size_t width, std::size_t height) {
        if (width == 0 || height == 0) {
            throw DimensionError("raster dimensions must be positive, got " +
                                 std::to_string(width) + "x" + std::to_string(height));
        }
        constexpr std::size_t max_elems = std::numeric_limits<std::ptrdiff_t>::max() / sizeof(T);
        if (width > max_elems / height) {
            throw DimensionError("raster dimensions overflow");
        }
        return width * height;
    }

    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<T> data_;
};

using DepthMap = Raster<float>;
using BinaryMask = Raster<std::uint8_t>;
using RgbImage = Raster<Rgb>;

template <typename T>
Raster<T> new_raster(std::size_t width, std::size_t height, const T& fill) {
    return Raster<T>(width, height, fill);
}

/// The all-ones mask J.
inline BinaryMask all_ones(std::size_t width, std::size_t height) {
    return BinaryMask(width, height, 1);
}

template <typename A, typename B>
void require_same_shape(const Raster<A>& a, const Raster<B>& b, const char* what) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(what) + ": " + std::to_string(a.width()) + "x" +
                             std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                             "x" + std::to_string(b.height()));
    }
}

struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;

    void validate() const {
        if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy) ||
            !std::isfinite(cx) || !std::isfinite(cy)) {
            throw ConfigError("camera intrinsics require finite fx > 0 and fy > 0");
        }
    }

    friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

}  // namespace transmask
