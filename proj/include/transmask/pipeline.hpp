#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "transmask/augment.hpp"
#include "transmask/dataset_io.hpp"
#include "transmask/maskgen.hpp"
#include "transmask/metrics.hpp"

namespace transmask {

inline constexpr const char* kRunSchema = "transmask-manifest/1";

/// Coarse error class used for per-frame reporting and process exit codes.
enum class ErrorKind { validation = 1, io = 2, internal = 3 };

inline ErrorKind classify(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e)) {
        return ErrorKind::io;
    }
    if (dynamic_cast<const Error*>(&e)) {
        return ErrorKind::validation;
    }
    return ErrorKind::internal;
}

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::validation: return "validation";
        case ErrorKind::io: return "io";
        default: return "internal";
    }
}

/// Runs `fn(i)` for i in [0, count) on `jobs` threads. Each index is handled
/// exactly once; the caller owns ordering of results.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
}

struct SynthesizeOptions {
    fs::path root;
    fs::path out;
    MaskingConfig masking;
    bool augment = false;
    double noise_sigma = kDefaultNoiseSigma;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
};

struct FrameFailure {
    std::string frame;
    ErrorKind kind = ErrorKind::internal;
    std::string message;
};

struct SynthesizeSummary {
    std::size_t frames = 0;
    std::size_t written = 0;
    std::vector<FrameFailure> failures;
    std::vector<std::string> warnings;
    fs::path manifest_path;

    bool ok() const { return failures.empty(); }
};

/// Seed for one frame, independent of scheduling: the run seed folded with the
/// frame key.
inline std::uint64_t frame_seed(std::uint64_t run_seed, const std::string& key) {
    std::uint64_t h = mix_seed(run_seed);
    for (unsigned char c : key) {
        h = mix_seed(h ^ c);
    }
    return h;
}

inline void echo_run_config(Manifest& m, const SynthesizeOptions& opts) {
    echo_masking_config(m, opts.masking);
    m.set("augment.enabled", opts.augment);
    m.set("augment.noise_sigma", opts.noise_sigma);
    m.set("seed", opts.seed);
}

/// Scans `opts.root`, writes one pair directory per frame under
/// `opts.out/<scene>/<frame>` and a run manifest at `opts.out/manifest.txt`.
/// Frame failures are collected, never skipped silently; the manifest then
/// records status=partial and the failing frames.
inline SynthesizeSummary run_synthesize(const SynthesizeOptions& opts) {
    opts.masking.validate();
    if (!(opts.noise_sigma >= 0.0)) {
        throw ConfigError("noise sigma must be >= 0");
    }
    ScanResult scan = scan_dataset(opts.root);
    SynthesizeSummary summary;
    summary.frames = scan.frames.size();
    summary.warnings = scan.warnings;

    struct Outcome {
        std::optional<std::string> manifest_hash;
        std::optional<FrameFailure> failure;
    };
    std::vector<Outcome> outcomes(scan.frames.size());

    parallel_for(scan.frames.size(), opts.jobs, [&](std::size_t i) {
        const FrameRecord& rec = scan.frames[i];
        try {
            const FrameData frame = load_frame(rec);
            TrainingPair pair = synthesize_pair(frame.rgb, frame.depth, frame.masks, opts.masking);
            PairMetadata meta{rec.scene_id, rec.frame_id, rec.intrinsics, rec.depth_scale, opts.masking, {}};
            if (opts.augment) {
                meta.augment = random_augment(frame_seed(opts.seed, rec.key()), opts.noise_sigma);
                pair = apply_augment(pair, *meta.augment);
            }
            outcomes[i].manifest_hash = write_pair(pair, opts.out / rec.scene_id / rec.frame_id, meta);
        } catch (const std::exception& e) {
            outcomes[i].failure = FrameFailure{rec.key(), classify(e), e.what()};
        }
    });

    Manifest run;
    run.set("schema", std::string(kRunSchema));
    echo_run_config(run, opts);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].manifest_hash) {
            run.add("pair", scan.frames[i].key() + " " + *outcomes[i].manifest_hash);
            ++summary.written;
        } else {
            run.add("failed", outcomes[i].failure->frame);
            summary.failures.push_back(*outcomes[i].failure);
        }
    }
    run.set("frames", std::uint64_t{summary.written});
    run.set("status", std::string(summary.failures.empty() ? "complete" : "partial"));

    std::error_code ec;
    fs::create_directories(opts.out, ec);
    if (ec) {
        throw IoError("cannot create output directory " + opts.out.string() + ": " + ec.message());
    }
    summary.manifest_path = opts.out / "manifest.txt";
    const std::string text = run.serialize();
    const fs::path staging = opts.out / ".manifest.txt.tmp";
    write_file(staging, text.data(), text.size());
    fs::rename(staging, summary.manifest_path);
    return summary;
}

// ---------------------------------------------------------------------------
// Directory evaluation

/// Relative paths of every .png below `dir`, sorted.
inline std::vector<fs::path> list_pngs(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw IoError("not a directory: " + dir.string());
    }
    std::vector<fs::path> out;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png") {
            out.push_back(fs::relative(entry.path(), dir));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct FrameMetrics {
    std::string frame;
    std::optional<MetricsReport> report;  // empty when the frame has no evaluable pixel
};

struct EvaluationRun {
    MetricsReport aggregate;
    std::vector<FrameMetrics> frames;
};

/// Pairs pred/gt/mask images by relative path and pools all evaluated pixels
/// into one report.
inline EvaluationRun evaluate_directories(const fs::path& pred_dir, const fs::path& gt_dir,
                                          const fs::path& mask_dir, double depth_scale = kDefaultDepthScale) {
    for (const auto& d : {pred_dir, gt_dir, mask_dir}) {
        if (!fs::is_directory(d)) {
            throw IoError("not a directory: " + d.string());
        }
    }
    const auto files = list_pngs(pred_dir);
    std::vector<std::string> issues;
    for (const auto& rel : files) {
        if (!fs::is_regular_file(gt_dir / rel)) issues.push_back((gt_dir / rel).string() + ": missing ground truth");
        if (!fs::is_regular_file(mask_dir / rel)) issues.push_back((mask_dir / rel).string() + ": missing mask");
    }
    if (files.empty()) {
        issues.push_back(pred_dir.string() + ": no predicted depth images");
    }
    if (!issues.empty()) {
        throw DatasetValidationError(std::move(issues));
    }

    EvaluationRun run;
    MetricsAccumulator total;
    for (const auto& rel : files) {
        const DepthMap pred = load_depth(pred_dir / rel, depth_scale);
        const DepthMap gt = load_depth(gt_dir / rel, depth_scale);
        const BinaryMask mask = load_mask(mask_dir / rel);
        MetricsAccumulator frame;
        frame.add(pred, gt, mask);
        FrameMetrics fm{rel.generic_string(), std::nullopt};
        if (frame.count() > 0) {
            fm.report = frame.report();
        }
        run.frames.push_back(std::move(fm));
        total.merge(frame);
    }
    run.aggregate = total.report();
    return run;
}

inline Manifest metrics_manifest(const MetricsReport& r) {
    Manifest m;
    m.set("schema", std::string("transmask-metrics/1"));
    m.set("n_pixels", std::uint64_t{r.n_pixels});
    m.set("rmse", r.rmse);
    m.set("rel", r.rel);
    m.set("mae", r.mae);
    m.set("sigma_105", r.sigma_105);
    m.set("sigma_110", r.sigma_110);
    m.set("sigma_125", r.sigma_125);
    return m;
}

}  // namespace transmask
