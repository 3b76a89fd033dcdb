#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "transmask/raster.hpp"

namespace transmask {

using Vec3 = Eigen::Vector3d;

/// Back-projected points; `valid` is 0 where the source depth was missing.
struct PointMap {
    Raster<Vec3> points;
    BinaryMask valid;
};

/// Unit surface normals facing the camera (z <= 0). Invalid pixels hold a
/// zero vector and must not enter any reduction.
struct NormalMap {
    Raster<Vec3> normals;
    BinaryMask valid;

    std::size_t width() const noexcept { return normals.width(); }
    std::size_t height() const noexcept { return normals.height(); }
};

struct ScalarMap {
    Raster<double> values;
    BinaryMask valid;
};

inline PointMap backproject(const DepthMap& depth, const CameraIntrinsics& k) {
    k.validate();
    PointMap out{Raster<Vec3>(depth.width(), depth.height(), Vec3::Zero()),
                 BinaryMask(depth.width(), depth.height(), 0)};
    for (std::size_t v = 0; v < depth.height(); ++v) {
        for (std::size_t u = 0; u < depth.width(); ++u) {
            const double z = depth(u, v);
            if (z <= 0.0) {
                continue;
            }
            out.points(u, v) = Vec3((double(u) - k.cx) / k.fx * z, (double(v) - k.cy) / k.fy * z, z);
            out.valid(u, v) = 1;
        }
    }
    return out;
}

/// Normal from the cross product of central-difference tangents of the point
/// map. Needs depth at the four direct neighbours; the center pixel's own
/// depth must also be valid.
inline NormalMap normals_from_depth(const DepthMap& depth, const CameraIntrinsics& k) {
    const PointMap pts = backproject(depth, k);
    const std::size_t w = depth.width();
    const std::size_t h = depth.height();
    NormalMap out{Raster<Vec3>(w, h, Vec3::Zero()), BinaryMask(w, h, 0)};
    if (w < 3 || h < 3) {
        return out;
    }
    for (std::size_t v = 1; v + 1 < h; ++v) {
        for (std::size_t u = 1; u + 1 < w; ++u) {
            if (!pts.valid(u, v) || !pts.valid(u - 1, v) || !pts.valid(u + 1, v) ||
                !pts.valid(u, v - 1) || !pts.valid(u, v + 1)) {
                continue;
            }
            const Vec3 du = pts.points(u + 1, v) - pts.points(u - 1, v);
            const Vec3 dv = pts.points(u, v + 1) - pts.points(u, v - 1);
            Vec3 n = du.cross(dv);
            const double norm = n.norm();
            if (!(norm > 0.0) || !std::isfinite(norm)) {
                continue;
            }
            n /= norm;
            if (n.z() > 0.0) {
                n = -n;
            }
            out.normals(u, v) = n;
            out.valid(u, v) = 1;
        }
    }
    return out;
}

/// Per-pixel cosine similarity of two unit normal maps, evaluated as
/// 1 - |a - b|^2 / 2 so identical normals give exactly 1.
inline ScalarMap normal_cosine_map(const NormalMap& a, const NormalMap& b) {
    require_same_shape(a.normals, b.normals, "normal_cosine_map");
    ScalarMap out{Raster<double>(a.width(), a.height(), 0.0),
                  BinaryMask(a.width(), a.height(), 0)};
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (a.valid[i] && b.valid[i]) {
            out.values[i] = std::clamp(1.0 - 0.5 * (a.normals[i] - b.normals[i]).squaredNorm(), -1.0, 1.0);
            out.valid[i] = 1;
        }
    }
    return out;
}

}  // namespace transmask
