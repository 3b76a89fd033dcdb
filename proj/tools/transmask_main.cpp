// transmask: batch front end for pair synthesis, evaluation, loss reports and
// baseline completion. Exit codes: 0 success, 1 validation, 2 I/O, 3 internal.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "transmask/baseline.hpp"
#include "transmask/dataset_io.hpp"
#include "transmask/losses.hpp"
#include "transmask/metrics.hpp"
#include "transmask/pipeline.hpp"

namespace fs = std::filesystem;
using namespace transmask;

namespace {

ElementSize parse_element(const std::string& text) {
    const auto x = text.find('x');
    try {
        if (x == std::string::npos) {
            const auto n = std::stoul(text);
            return {n, n};
        }
        return {std::stoul(text.substr(0, x)), std::stoul(text.substr(x + 1))};
    } catch (const std::exception&) {
        throw ConfigError("erosion size must be N or WxH, got '" + text + "'");
    }
}

int run_synthesize_cmd(const SynthesizeOptions& opts) {
    const SynthesizeSummary summary = run_synthesize(opts);
    for (const auto& w : summary.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    std::cout << "frames=" << summary.frames << " written=" << summary.written
              << " failed=" << summary.failures.size() << " manifest=" << summary.manifest_path.string() << "\n";
    if (summary.ok()) {
        return 0;
    }
    int code = 0;
    std::cerr << "frame\tkind\tmessage\n";
    for (const auto& f : summary.failures) {
        std::cerr << f.frame << "\t" << to_string(f.kind) << "\t" << f.message << "\n";
        code = std::max(code, static_cast<int>(f.kind));
    }
    return code;
}

struct EvaluateArgs {
    std::string pred_dir, gt_dir, mask_dir, report;
    bool per_frame = false;
    double depth_scale = kDefaultDepthScale;
};

int run_evaluate_cmd(const EvaluateArgs& a) {
    const EvaluationRun run = evaluate_directories(a.pred_dir, a.gt_dir, a.mask_dir, a.depth_scale);
    Manifest report = metrics_manifest(run.aggregate);
    report.set("frames", std::uint64_t{run.frames.size()});
    for (const auto& f : run.frames) {
        const std::string line = f.report ? to_key_value(*f.report) : std::string("n_pixels=0");
        if (a.per_frame) {
            std::cout << "frame=" << f.frame << " " << line << "\n";
            report.add("frame", f.frame + " " + line);
        }
    }
    std::cout << to_key_value(run.aggregate) << "\n";
    if (!a.report.empty()) {
        const std::string text = report.serialize();
        write_file(a.report, text.data(), text.size());
    }
    return 0;
}

struct ErrorMapArgs {
    std::string pred, gt, mask, out;
    double max_rel = kDefaultErrorMapMaxRel;
    double depth_scale = kDefaultDepthScale;
};

int run_error_map_cmd(const ErrorMapArgs& a) {
    const DepthMap pred = load_depth(a.pred, a.depth_scale);
    const DepthMap gt = load_depth(a.gt, a.depth_scale);
    const BinaryMask mask = load_mask(a.mask);
    save_rgb(a.out, error_map(pred, gt, mask, a.max_rel));
    return 0;
}

struct LossArgs {
    std::string pred, pair_dir, gt_depth;
    LossOptions opts;
    bool keep_invalid_gt = false;
};

int run_loss_cmd(LossArgs a) {
    const LoadedPair loaded = read_pair(a.pair_dir);
    const double scale = loaded.meta.depth_scale;
    const DepthMap pred = load_depth(a.pred, scale);
    const DepthMap gt = a.gt_depth.empty() ? loaded.pair.target_depth : load_depth(a.gt_depth, scale);
    a.opts.exclude_invalid_gt = !a.keep_invalid_gt;
    const LossBreakdown b = supervised_loss(pred, gt, loaded.pair.trans_mask, loaded.meta.intrinsics, a.opts);
    std::printf("l1=%.9g l2=%.9g combined=%.9g n1=%zu n2=%zu alpha=%g beta=%g\n", b.l1, b.l2, b.combined, b.n1,
                b.n2, a.opts.alpha, a.opts.beta);
    return 0;
}

struct CompleteArgs {
    std::string pair_dir, out;
    std::size_t iterations = kDefaultCompletionIterations;
    double tol = kDefaultCompletionTol;
};

int run_complete_cmd(const CompleteArgs& a) {
    const LoadedPair loaded = read_pair(a.pair_dir);
    const TrainingPair& p = loaded.pair;
    // Fill the artificially masked depth; transparent regions stay empty.
    BinaryMask fill(p.masked_depth.width(), p.masked_depth.height(), 0);
    for (std::size_t i = 0; i < fill.size(); ++i) {
        fill[i] = (!p.final_mask[i] && !p.trans_mask[i] && p.masked_depth[i] == 0.0f) ? 1 : 0;
    }
    const CompletionResult r = complete_depth(p.masked_depth, fill, a.iterations, a.tol);
    const fs::path out = a.out.empty() ? fs::path(a.pair_dir) / "completed_depth.png" : fs::path(a.out);
    save_depth(out, r.depth, loaded.meta.depth_scale);
    std::cout << "out=" << out.string() << " iterations=" << r.iterations << " converged=" << (r.converged ? 1 : 0)
              << " components=" << r.components << " unfilled_components=" << r.unfilled_components
              << " unfilled_pixels=" << r.unfilled_pixels << "\n";
    if (r.unfilled_components > 0) {
        std::cerr << "warning: " << r.unfilled_components
                  << " masked component(s) have no valid depth on their border and were left empty\n";
    }
    return 0;
}

int exit_code_for(const std::exception& e) { return static_cast<int>(classify(e)); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-supervised training pair synthesis and depth completion evaluation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI/TOML file supplying flag values");

    SynthesizeOptions syn;
    std::string erosion_size = "5x5";
    std::string erosion_order = "per_instance";
    bool no_erosion = false;
    std::string root, out;
    syn.jobs = std::max(1u, std::thread::hardware_concurrency());
    auto* synthesize = app.add_subcommand("synthesize", "Write masked training pairs for every frame of a dataset");
    synthesize->add_option("--root", root, "Dataset root (scene_*/frame_*/ + camera.cfg)")->required();
    synthesize->add_option("--out", out, "Output directory for pair bundles and manifest")->required();
    synthesize->add_option("--erosion-iters", syn.masking.erosion_iterations, "Erosion passes per instance")
        ->capture_default_str();
    synthesize->add_option("--erosion-size", erosion_size, "Rectangular element, N or WxH (odd sides)")
        ->capture_default_str();
    synthesize->add_option("--erosion-order", erosion_order, "per_instance or union_first")
        ->check(CLI::IsMember({"per_instance", "union_first"}))
        ->capture_default_str();
    synthesize->add_flag("--no-erosion", no_erosion, "Mask whole non-transparent instances (ablation)");
    synthesize->add_option("--seed", syn.seed, "Seed for augmentation")->capture_default_str();
    synthesize->add_flag("--augment", syn.augment, "Random flip, quarter-turn rotation and depth noise per frame");
    synthesize->add_option("--noise-sigma", syn.noise_sigma, "Depth noise std in meters when augmenting")
        ->capture_default_str();
    synthesize->add_option("--jobs", syn.jobs, "Frame-level worker threads")
        ->envname("TRANSMASK_JOBS")
        ->check(CLI::PositiveNumber);

    EvaluateArgs eval;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Metrics over transparent pixels, pooled across frames");
    evaluate_cmd->add_option("--pred-dir", eval.pred_dir, "Predicted 16-bit depth PNGs")->required();
    evaluate_cmd->add_option("--gt-dir", eval.gt_dir, "Ground-truth depth PNGs, same relative paths")->required();
    evaluate_cmd->add_option("--mask-dir", eval.mask_dir, "Transparent masks, same relative paths")->required();
    evaluate_cmd->add_option("--report", eval.report, "Write a key=value metrics file");
    evaluate_cmd->add_flag("--per-frame", eval.per_frame, "Also print and record per-frame metrics");
    evaluate_cmd->add_option("--depth-scale", eval.depth_scale, "On-disk units per meter")->capture_default_str();

    ErrorMapArgs emap;
    auto* error_map_cmd = app.add_subcommand("error-map", "Render |d - d*| / d* as a white-to-red image");
    error_map_cmd->add_option("--pred", emap.pred, "Predicted depth PNG")->required();
    error_map_cmd->add_option("--gt", emap.gt, "Ground-truth depth PNG")->required();
    error_map_cmd->add_option("--mask", emap.mask, "Evaluation mask PNG")->required();
    error_map_cmd->add_option("--max-rel", emap.max_rel, "Relative error rendered as pure red")
        ->capture_default_str();
    error_map_cmd->add_option("--out", emap.out, "Output PNG")->required();
    error_map_cmd->add_option("--depth-scale", emap.depth_scale, "On-disk units per meter")->capture_default_str();

    LossArgs loss;
    auto* loss_cmd = app.add_subcommand("loss-report", "Region losses of a prediction against a pair bundle");
    loss_cmd->add_option("--pred", loss.pred, "Predicted depth PNG")->required();
    loss_cmd->add_option("--gt-pair-dir", loss.pair_dir, "Pair directory written by synthesize")->required();
    loss_cmd->add_option("--gt-depth", loss.gt_depth, "Full ground-truth depth PNG (default: pair target depth)");
    loss_cmd->add_option("--alpha", loss.opts.alpha, "Normal term weight")->capture_default_str();
    loss_cmd->add_option("--beta", loss.opts.beta, "Transparent-region weight")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    loss_cmd->add_flag("--keep-invalid-gt", loss.keep_invalid_gt, "Score pixels whose ground truth is 0");

    CompleteArgs comp;
    auto* complete_cmd = app.add_subcommand("baseline-complete", "Harmonic fill of a pair's masked depth");
    complete_cmd->add_option("--pair-dir", comp.pair_dir, "Pair directory written by synthesize")->required();
    complete_cmd->add_option("--out", comp.out, "Output PNG (default: <pair-dir>/completed_depth.png)");
    complete_cmd->add_option("--iterations", comp.iterations, "Sweep cap")->capture_default_str();
    complete_cmd->add_option("--tol", comp.tol, "Stop when the largest update is below this (m)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*synthesize) {
            syn.root = root;
            syn.out = out;
            syn.masking.erosion_element = parse_element(erosion_size);
            syn.masking.erosion_enabled = !no_erosion;
            syn.masking.erosion_order =
                erosion_order == "union_first" ? ErosionOrder::union_first : ErosionOrder::per_instance;
            return run_synthesize_cmd(syn);
        }
        if (*evaluate_cmd) return run_evaluate_cmd(eval);
        if (*error_map_cmd) return run_error_map_cmd(emap);
        if (*loss_cmd) return run_loss_cmd(loss);
        if (*complete_cmd) return run_complete_cmd(comp);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 3;
}
