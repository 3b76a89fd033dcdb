#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <random>
#include <string>
#include <system_error>
#include <vector>

#include <openssl/evp.h>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "transmask/augment.hpp"
#include "transmask/maskgen.hpp"
#include "transmask/manifest.hpp"
#include "transmask/raster.hpp"

namespace transmask {

namespace fs = std::filesystem;

inline constexpr double kDefaultDepthScale = 1000.0;  // on-disk units per meter
inline constexpr const char* kCameraConfigName = "camera.cfg";
inline constexpr const char* kPairSchema = "transmask-pair/1";

/// Validation failure carrying one line per offending path.
class DatasetValidationError : public ValidationError {
public:
    explicit DatasetValidationError(std::vector<std::string> issues)
        : ValidationError(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string msg = "dataset validation failed:";
        for (const auto& s : issues) {
            msg += "\n  " + s;
        }
        return msg;
    }

    std::vector<std::string> issues_;
};

/// Per-dataset camera and depth encoding, read from `camera.cfg`.
struct DatasetConfig {
    CameraIntrinsics intrinsics;
    double depth_scale = kDefaultDepthScale;

    static DatasetConfig parse(const Manifest& cfg) {
        DatasetConfig out;
        out.intrinsics.fx = cfg.get_double("fx");
        out.intrinsics.fy = cfg.get_double("fy");
        out.intrinsics.cx = cfg.get_double("cx");
        out.intrinsics.cy = cfg.get_double("cy");
        if (cfg.find("depth_scale")) {
            out.depth_scale = cfg.get_double("depth_scale");
        }
        out.intrinsics.validate();
        if (!(out.depth_scale > 0.0)) {
            throw ConfigError("depth_scale must be > 0");
        }
        return out;
    }

    Manifest to_manifest() const {
        Manifest m;
        m.set("fx", intrinsics.fx);
        m.set("fy", intrinsics.fy);
        m.set("cx", intrinsics.cx);
        m.set("cy", intrinsics.cy);
        m.set("depth_scale", depth_scale);
        return m;
    }
};

struct FrameRecord {
    std::string scene_id;
    std::string frame_id;
    fs::path rgb_path;
    fs::path depth_path;
    std::vector<fs::path> trans_mask_paths;
    std::vector<fs::path> non_trans_mask_paths;
    CameraIntrinsics intrinsics;
    double depth_scale = kDefaultDepthScale;

    std::string key() const { return scene_id + "/" + frame_id; }
};

struct ScanResult {
    std::vector<FrameRecord> frames;
    std::vector<std::string> warnings;
};

struct FrameData {
    RgbImage rgb;
    DepthMap depth;
    MaskSet masks;
};

// ---------------------------------------------------------------------------
// Files and hashing

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const fs::path& path, const void* data, std::size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot create " + path.string());
    }
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

inline std::string sha256_hex(const void* data, std::size_t size) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data, size, digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 computation failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

inline std::string sha256_hex(const std::string& bytes) { return sha256_hex(bytes.data(), bytes.size()); }

inline Manifest read_manifest(const fs::path& path) {
    if (!fs::is_regular_file(path)) {
        throw FormatError("missing manifest " + path.string());
    }
    return Manifest::parse(read_file(path));
}

// ---------------------------------------------------------------------------
// Raster codecs

namespace detail {

inline cv::Mat read_image(const fs::path& path) {
    if (!fs::is_regular_file(path)) {
        throw IoError("no such image file " + path.string());
    }
    cv::Mat img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (img.empty()) {
        throw FormatError("cannot decode image " + path.string());
    }
    return img;
}

inline std::vector<std::uint8_t> encode_png(const cv::Mat& img) {
    std::vector<std::uint8_t> buf;
    if (!cv::imencode(".png", img, buf, {cv::IMWRITE_PNG_COMPRESSION, 3})) {
        throw FormatError("png encoding failed");
    }
    return buf;
}

inline std::uint16_t quantize_depth(float meters, double scale) {
    if (meters <= 0.0f) {
        return 0;
    }
    const double units = std::round(double(meters) * scale);
    if (units > 65535.0) {
        throw FormatError("depth " + std::to_string(meters) + " m exceeds the 16-bit range at scale " +
                          std::to_string(scale));
    }
    // Valid depth never rounds to the invalid code.
    return static_cast<std::uint16_t>(std::max(units, 1.0));
}

}  // namespace detail

inline DepthMap decode_depth(const cv::Mat& img, double scale, const std::string& what) {
    if (img.type() != CV_16UC1) {
        throw FormatError(what + ": depth must be 16-bit single channel");
    }
    DepthMap out(static_cast<std::size_t>(img.cols), static_cast<std::size_t>(img.rows), 0.0f);
    for (int y = 0; y < img.rows; ++y) {
        const auto* row = img.ptr<std::uint16_t>(y);
        for (int x = 0; x < img.cols; ++x) {
            out(std::size_t(x), std::size_t(y)) = static_cast<float>(double(row[x]) / scale);
        }
    }
    return out;
}

/// Loads a 16-bit single-channel depth image; stored value / scale = meters.
inline DepthMap load_depth(const fs::path& path, double scale = kDefaultDepthScale) {
    if (!(scale > 0.0)) {
        throw ConfigError("depth scale must be > 0");
    }
    return decode_depth(detail::read_image(path), scale, path.string());
}

inline RgbImage decode_rgb(const cv::Mat& img, const std::string& what) {
    if (img.type() != CV_8UC3) {
        throw FormatError(what + ": rgb must be 8-bit three channel");
    }
    RgbImage out(static_cast<std::size_t>(img.cols), static_cast<std::size_t>(img.rows), Rgb{});
    for (int y = 0; y < img.rows; ++y) {
        const auto* row = img.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.cols; ++x) {
            out(std::size_t(x), std::size_t(y)) = Rgb{row[x][2], row[x][1], row[x][0]};
        }
    }
    return out;
}

/// 8-bit single-channel mask, binarized at >= 128.
inline BinaryMask decode_mask(const cv::Mat& img, const std::string& what) {
    if (img.type() != CV_8UC1) {
        throw FormatError(what + ": mask must be 8-bit single channel");
    }
    BinaryMask out(static_cast<std::size_t>(img.cols), static_cast<std::size_t>(img.rows), 0);
    for (int y = 0; y < img.rows; ++y) {
        const auto* row = img.ptr<std::uint8_t>(y);
        for (int x = 0; x < img.cols; ++x) {
            out(std::size_t(x), std::size_t(y)) = row[x] >= 128 ? 1 : 0;
        }
    }
    return out;
}

inline RgbImage load_rgb(const fs::path& path) { return decode_rgb(detail::read_image(path), path.string()); }

inline BinaryMask load_mask(const fs::path& path) { return decode_mask(detail::read_image(path), path.string()); }

inline std::vector<std::uint8_t> encode_depth_png(const DepthMap& depth, double scale = kDefaultDepthScale) {
    cv::Mat img(int(depth.height()), int(depth.width()), CV_16UC1);
    for (std::size_t y = 0; y < depth.height(); ++y) {
        auto* row = img.ptr<std::uint16_t>(int(y));
        for (std::size_t x = 0; x < depth.width(); ++x) {
            row[x] = detail::quantize_depth(depth(x, y), scale);
        }
    }
    return detail::encode_png(img);
}

inline std::vector<std::uint8_t> encode_rgb_png(const RgbImage& rgb) {
    cv::Mat img(int(rgb.height()), int(rgb.width()), CV_8UC3);
    for (std::size_t y = 0; y < rgb.height(); ++y) {
        auto* row = img.ptr<cv::Vec3b>(int(y));
        for (std::size_t x = 0; x < rgb.width(); ++x) {
            const Rgb p = rgb(x, y);
            row[x] = cv::Vec3b(p.b, p.g, p.r);
        }
    }
    return detail::encode_png(img);
}

inline std::vector<std::uint8_t> encode_mask_png(const BinaryMask& mask) {
    cv::Mat img(int(mask.height()), int(mask.width()), CV_8UC1);
    for (std::size_t y = 0; y < mask.height(); ++y) {
        auto* row = img.ptr<std::uint8_t>(int(y));
        for (std::size_t x = 0; x < mask.width(); ++x) {
            row[x] = mask(x, y) ? 255 : 0;
        }
    }
    return detail::encode_png(img);
}

inline void save_depth(const fs::path& path, const DepthMap& depth, double scale = kDefaultDepthScale) {
    const auto bytes = encode_depth_png(depth, scale);
    write_file(path, bytes.data(), bytes.size());
}

inline void save_rgb(const fs::path& path, const RgbImage& rgb) {
    const auto bytes = encode_rgb_png(rgb);
    write_file(path, bytes.data(), bytes.size());
}

inline void save_mask(const fs::path& path, const BinaryMask& mask) {
    const auto bytes = encode_mask_png(mask);
    write_file(path, bytes.data(), bytes.size());
}

// ---------------------------------------------------------------------------
// Dataset layout: root/camera.cfg, root/scene_*/frame_*/{rgb,depth,mask_trans_*,mask_nontrans_*}.png

inline bool has_prefix(const std::string& s, std::string_view prefix) {
    return s.size() >= prefix.size() && std::string_view(s).substr(0, prefix.size()) == prefix;
}

inline std::vector<fs::path> sorted_children(const fs::path& dir) {
    std::vector<fs::path> out;
    std::error_code ec;
    for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
        out.push_back(it->path());
    }
    if (ec) {
        throw IoError("cannot list " + dir.string() + ": " + ec.message());
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline ScanResult scan_dataset(const fs::path& root) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw IoError("dataset root is not a readable directory: " + root.string());
    }
    ScanResult result;
    std::vector<std::string> issues;
    std::vector<FrameRecord> frames;

    for (const auto& scene : sorted_children(root)) {
        const std::string scene_name = scene.filename().string();
        if (!has_prefix(scene_name, "scene_")) {
            continue;
        }
        if (!fs::is_directory(scene)) {
            issues.push_back(scene.string() + ": scene entry is not a directory");
            continue;
        }
        for (const auto& frame : sorted_children(scene)) {
            const std::string frame_name = frame.filename().string();
            if (!has_prefix(frame_name, "frame_")) {
                continue;
            }
            if (!fs::is_directory(frame)) {
                issues.push_back(frame.string() + ": frame entry is not a directory");
                continue;
            }
            FrameRecord rec;
            rec.scene_id = scene_name;
            rec.frame_id = frame_name;
            rec.rgb_path = frame / "rgb.png";
            rec.depth_path = frame / "depth.png";
            if (!fs::is_regular_file(rec.rgb_path)) {
                issues.push_back(frame.string() + ": missing rgb.png");
            }
            if (!fs::is_regular_file(rec.depth_path)) {
                issues.push_back(frame.string() + ": missing depth.png");
            }
            for (const auto& file : sorted_children(frame)) {
                const std::string name = file.filename().string();
                if (file.extension() != ".png") {
                    continue;
                }
                if (has_prefix(name, "mask_trans_")) {
                    rec.trans_mask_paths.push_back(file);
                } else if (has_prefix(name, "mask_nontrans_")) {
                    rec.non_trans_mask_paths.push_back(file);
                }
            }
            frames.push_back(std::move(rec));
        }
    }

    if (frames.empty() && issues.empty()) {
        result.warnings.push_back("no frames found under " + root.string());
        return result;
    }
    const fs::path cfg_path = root / kCameraConfigName;
    std::optional<DatasetConfig> cfg;
    if (!fs::is_regular_file(cfg_path)) {
        issues.push_back(cfg_path.string() + ": missing camera config");
    } else {
        try {
            cfg = DatasetConfig::parse(Manifest::parse(read_file(cfg_path)));
        } catch (const Error& e) {
            issues.push_back(cfg_path.string() + ": " + e.what());
        }
    }
    if (!issues.empty()) {
        throw DatasetValidationError(std::move(issues));
    }
    for (auto& f : frames) {
        f.intrinsics = cfg->intrinsics;
        f.depth_scale = cfg->depth_scale;
    }
    result.frames = std::move(frames);
    return result;
}

/// Loads every raster of a frame and checks they share one size.
inline FrameData load_frame(const FrameRecord& rec) {
    FrameData out;
    out.rgb = load_rgb(rec.rgb_path);
    out.depth = load_depth(rec.depth_path, rec.depth_scale);
    if (!out.rgb.same_shape(out.depth)) {
        throw DimensionError(rec.key() + ": rgb and depth sizes differ");
    }
    out.masks = MaskSet(out.depth.width(), out.depth.height());
    auto load_list = [&](const std::vector<fs::path>& paths, std::vector<BinaryMask>& dst) {
        for (const auto& p : paths) {
            BinaryMask m = load_mask(p);
            if (!m.same_shape(out.depth)) {
                throw DimensionError(p.string() + ": mask size differs from depth");
            }
            dst.push_back(std::move(m));
        }
    };
    load_list(rec.trans_mask_paths, out.masks.trans_masks);
    load_list(rec.non_trans_mask_paths, out.masks.non_trans_masks);
    return out;
}

// ---------------------------------------------------------------------------
// TrainingPair bundles

/// Everything recorded next to a pair besides its rasters.
struct PairMetadata {
    std::string scene_id;
    std::string frame_id;
    CameraIntrinsics intrinsics{1.0, 1.0, 0.0, 0.0};
    double depth_scale = kDefaultDepthScale;
    MaskingConfig masking;
    std::optional<AugmentSpec> augment;
};

struct LoadedPair {
    TrainingPair pair;
    PairMetadata meta;
};

inline void echo_masking_config(Manifest& m, const MaskingConfig& cfg) {
    m.set("masking.erosion_enabled", cfg.erosion_enabled);
    m.set("masking.erosion_element", std::to_string(cfg.erosion_element.width) + "x" +
                                          std::to_string(cfg.erosion_element.height));
    m.set("masking.erosion_iterations", std::uint64_t{cfg.erosion_iterations});
    m.set("masking.erosion_order", std::string(to_string(cfg.erosion_order)));
}

inline MaskingConfig parse_masking_config(const Manifest& m) {
    MaskingConfig cfg;
    cfg.erosion_enabled = m.get_bool("masking.erosion_enabled");
    const std::string elem = m.get("masking.erosion_element");
    const auto x = elem.find('x');
    if (x == std::string::npos) {
        throw FormatError("bad masking.erosion_element '" + elem + "'");
    }
    try {
        cfg.erosion_element = {std::stoul(elem.substr(0, x)), std::stoul(elem.substr(x + 1))};
    } catch (const std::exception&) {
        throw FormatError("bad masking.erosion_element '" + elem + "'");
    }
    cfg.erosion_iterations = m.get_uint("masking.erosion_iterations");
    const std::string order = m.get("masking.erosion_order");
    if (order == "per_instance") {
        cfg.erosion_order = ErosionOrder::per_instance;
    } else if (order == "union_first") {
        cfg.erosion_order = ErosionOrder::union_first;
    } else {
        throw FormatError("bad masking.erosion_order '" + order + "'");
    }
    return cfg;
}

inline const std::vector<std::pair<std::string, std::string>>& pair_files() {
    static const std::vector<std::pair<std::string, std::string>> files{
        {"masked_rgb", "masked_rgb.png"},   {"masked_depth", "masked_depth.png"},
        {"target_depth", "target_depth.png"}, {"trans_mask", "trans_mask.png"},
        {"final_mask", "final_mask.png"}};
    return files;
}

/// Writes the pair's rasters and `manifest.txt` into `out_dir`, replacing any
/// previous content. Files are staged in a sibling temp directory and moved
/// into place with a rename. Returns the SHA-256 of the manifest text.
inline std::string write_pair(const TrainingPair& pair, const fs::path& out_dir, const PairMetadata& meta) {
    const auto violations = pair_violations(pair);
    if (!violations.empty()) {
        throw ValidationError("refusing to write inconsistent pair: " + violations.front());
    }
    const std::vector<std::vector<std::uint8_t>> blobs{
        encode_rgb_png(pair.masked_rgb), encode_depth_png(pair.masked_depth, meta.depth_scale),
        encode_depth_png(pair.target_depth, meta.depth_scale), encode_mask_png(pair.trans_mask),
        encode_mask_png(pair.final_mask)};

    Manifest m;
    m.set("schema", std::string(kPairSchema));
    m.set("scene_id", meta.scene_id);
    m.set("frame_id", meta.frame_id);
    m.set("width", std::uint64_t{pair.masked_depth.width()});
    m.set("height", std::uint64_t{pair.masked_depth.height()});
    m.set("depth_scale", meta.depth_scale);
    m.set("intrinsics.fx", meta.intrinsics.fx);
    m.set("intrinsics.fy", meta.intrinsics.fy);
    m.set("intrinsics.cx", meta.intrinsics.cx);
    m.set("intrinsics.cy", meta.intrinsics.cy);
    echo_masking_config(m, meta.masking);
    m.set("augment.enabled", meta.augment.has_value());
    if (meta.augment) {
        m.set("augment.hflip", meta.augment->hflip);
        m.set("augment.rotation_deg", std::uint64_t{meta.augment->rotation_degrees()});
        m.set("augment.noise_sigma", meta.augment->noise_sigma);
        m.set("augment.seed", meta.augment->seed);
    }
    for (std::size_t i = 0; i < blobs.size(); ++i) {
        m.set("file." + pair_files()[i].second, sha256_hex(blobs[i].data(), blobs[i].size()));
    }
    const std::string manifest_text = m.serialize();

    const fs::path target = out_dir.lexically_normal();
    const fs::path parent = target.has_parent_path() ? target.parent_path() : fs::path(".");
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec) {
        throw IoError("cannot create " + parent.string() + ": " + ec.message());
    }
    std::random_device rd;
    const fs::path staging =
        parent / (".tmp-" + target.filename().string() + "-" + std::to_string(rd()) + std::to_string(rd()));
    try {
        fs::create_directory(staging);
        for (std::size_t i = 0; i < blobs.size(); ++i) {
            write_file(staging / pair_files()[i].second, blobs[i].data(), blobs[i].size());
        }
        write_file(staging / "manifest.txt", manifest_text.data(), manifest_text.size());
        if (fs::exists(target)) {
            fs::remove_all(target);
        }
        fs::rename(staging, target);
    } catch (const fs::filesystem_error& e) {
        fs::remove_all(staging, ec);
        throw IoError(std::string("writing pair failed: ") + e.what());
    } catch (...) {
        fs::remove_all(staging, ec);
        throw;
    }
    return sha256_hex(manifest_text);
}

inline LoadedPair read_pair(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw IoError("pair directory does not exist: " + dir.string());
    }
    const Manifest m = read_manifest(dir / "manifest.txt");
    if (m.get("schema") != kPairSchema) {
        throw FormatError(dir.string() + ": unsupported pair schema '" + m.get("schema") + "'");
    }
    LoadedPair out;
    out.meta.scene_id = m.get("scene_id");
    out.meta.frame_id = m.get("frame_id");
    out.meta.depth_scale = m.get_double("depth_scale");
    out.meta.intrinsics = {m.get_double("intrinsics.fx"), m.get_double("intrinsics.fy"),
                           m.get_double("intrinsics.cx"), m.get_double("intrinsics.cy")};
    out.meta.masking = parse_masking_config(m);
    if (m.get_bool("augment.enabled")) {
        AugmentSpec a;
        a.hflip = m.get_bool("augment.hflip");
        a.rotation_quarters = static_cast<unsigned>(m.get_uint("augment.rotation_deg") / 90);
        a.noise_sigma = m.get_double("augment.noise_sigma");
        a.seed = m.get_uint("augment.seed");
        out.meta.augment = a;
    }

    std::vector<cv::Mat> images;
    for (const auto& [role, name] : pair_files()) {
        const std::string bytes = read_file(dir / name);
        if (sha256_hex(bytes) != m.get("file." + name)) {
            throw FormatError((dir / name).string() + ": content hash does not match manifest");
        }
        const cv::Mat raw(1, int(bytes.size()), CV_8UC1, const_cast<char*>(bytes.data()));
        cv::Mat img = cv::imdecode(raw, cv::IMREAD_UNCHANGED);
        if (img.empty()) {
            throw FormatError((dir / name).string() + ": cannot decode");
        }
        images.push_back(img);
    }
    out.pair.masked_rgb = decode_rgb(images[0], (dir / "masked_rgb.png").string());
    out.pair.masked_depth = decode_depth(images[1], out.meta.depth_scale, (dir / "masked_depth.png").string());
    out.pair.target_depth = decode_depth(images[2], out.meta.depth_scale, (dir / "target_depth.png").string());
    out.pair.trans_mask = decode_mask(images[3], (dir / "trans_mask.png").string());
    out.pair.final_mask = decode_mask(images[4], (dir / "final_mask.png").string());
    const auto violations = pair_violations(out.pair);
    if (!violations.empty()) {
        throw FormatError(dir.string() + ": " + violations.front());
    }
    return out;
}

}  // namespace transmask
