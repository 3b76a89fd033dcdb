// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "run_command.hpp"
#include "synthetic_scene.hpp"
#include "temp_dir.hpp"
#include "transmask/baseline.hpp"
#include "transmask/dataset_io.hpp"
#include "transmask/geometry.hpp"
#include "transmask/losses.hpp"
#include "transmask/maskgen.hpp"
#include "transmask/metrics.hpp"
#include "transmask/morphology.hpp"

#ifndef TRANSMASK_CLI_PATH
#error "TRANSMASK_CLI_PATH must point at the built command-line tool"
#endif

using namespace transmask;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---------------------------------------------------------------------------

Outcome mask_algebra() {
    Outcome out;
    std::mt19937_64 rng(2024);
    const std::size_t w = 64, h = 64;
    for (int trial = 0; trial < 200 && out.pass; ++trial) {
        MaskSet masks(w, h);
        const std::size_t n_trans = rng() % 4, n_non = rng() % 6;
        for (std::size_t i = 0; i < n_trans; ++i) masks.trans_masks.push_back(fixture::random_mask(w, h, rng, 0.5));
        for (std::size_t i = 0; i < n_non; ++i) masks.non_trans_masks.push_back(fixture::random_mask(w, h, rng, 0.8));
        RgbImage rgb(w, h, Rgb{});
        DepthMap depth(w, h, 0.0f);
        std::uniform_real_distribution<float> dist(0.2f, 3.0f);
        for (std::size_t i = 0; i < rgb.size(); ++i) {
            rgb[i] = Rgb{std::uint8_t(rng()), std::uint8_t(rng()), std::uint8_t(rng())};
            depth[i] = rng() % 10 == 0 ? 0.0f : dist(rng);
        }
        MaskingConfig cfg;
        cfg.erosion_iterations = 1 + rng() % 3;
        cfg.erosion_enabled = rng() % 5 != 0;

        const TrainingPair p = synthesize_pair(rgb, depth, masks, cfg);
        const auto v = pair_violations(p);
        out.require(v.empty(), "trial " + std::to_string(trial) + ": " + (v.empty() ? "" : v.front()));

        const BinaryMask expected = oracle::final_mask(masks.non_trans_masks, masks.trans_masks, w, h, 5, 5,
                                                       cfg.erosion_iterations, cfg.erosion_enabled);
        for (std::size_t i = 0; i < expected.size() && out.pass; ++i) {
            bool in_trans = false;
            for (const auto& m : masks.trans_masks) in_trans = in_trans || m[i];
            const Rgb black{};
            out.require(p.final_mask[i] == expected[i], "final mask differs at pixel " + std::to_string(i));
            out.require(p.trans_mask[i] == (in_trans ? 1 : 0), "transparent union differs");
            out.require(p.masked_rgb[i] == (in_trans ? black : rgb[i]), "masked rgb differs");
            out.require(p.masked_depth[i] == (expected[i] ? depth[i] : 0.0f), "masked depth differs");
            out.require(p.target_depth[i] == (in_trans ? 0.0f : depth[i]), "target depth differs");
        }
    }
    return out;
}

Outcome erosion_oracle() {
    Outcome out;
    std::mt19937_64 rng(99);
    std::size_t cases = 0;
    for (int trial = 0; trial < 100 && out.pass; ++trial) {
        const BinaryMask m = fixture::random_mask(32, 32, rng, 0.75);
        const std::vector<long> cheb = oracle::chebyshev_to_zero(m);
        for (std::size_t side : {3u, 5u}) {
            for (std::size_t k : {1u, 2u, 3u}) {
                ++cases;
                const BinaryMask fast = erode(m, ElementSize{side, side}, k);
                out.require(fast == oracle::erode(m, side, side, k),
                            "brute force mismatch, element " + std::to_string(side) + " k=" + std::to_string(k));
                const long radius = long(side / 2) * long(k);
                for (std::size_t i = 0; i < m.size(); ++i) {
                    out.require((fast[i] == 1) == (cheb[i] > radius), "Chebyshev characterization fails");
                }
                if (side == 5) {
                    const std::size_t big = 4 * k + 1;
                    out.require(fast == erode(m, ElementSize{big, big}, 1), "iteration law fails");
                    out.require(fast == oracle::erode(m, big, big, 1), "iteration law fails against brute force");
                }
            }
        }
    }
    if (out.pass) out.detail = std::to_string(cases) + " cases";
    return out;
}

DepthMap render_plane(std::size_t w, std::size_t h, const CameraIntrinsics& k, double a, double b, double c) {
    DepthMap d(w, h, 0.0f);
    for (std::size_t v = 0; v < h; ++v)
        for (std::size_t u = 0; u < w; ++u) {
            const double xn = (double(u) - k.cx) / k.fx, yn = (double(v) - k.cy) / k.fy;
            d(u, v) = static_cast<float>(c / (1.0 - a * xn - b * yn));
        }
    return d;
}

Outcome normal_checks() {
    Outcome out;
    const CameraIntrinsics k{90.0, 90.0, 39.5, 29.5};
    const std::size_t w = 80, h = 60;
    const NormalMap flat = normals_from_depth(DepthMap(w, h, 1.7f), k);
    for (std::size_t v = 1; v + 1 < h; ++v)
        for (std::size_t u = 1; u + 1 < w; ++u) {
            out.require(flat.valid(u, v) == 1, "interior fronto-parallel normal invalid");
            out.require(flat.normals(u, v) == Vec3(0.0, 0.0, -1.0), "fronto-parallel normal not exactly (0,0,-1)");
        }

    // Plane Z = a X + b Y + c has normal along (a, b, -1).
    double worst = 0.0;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> slope(-0.6, 0.6), offset(0.8, 2.5);
    for (int i = 0; i < 20; ++i) {
        const double a = slope(rng), b = slope(rng);
        const NormalMap n = normals_from_depth(render_plane(w, h, k, a, b, offset(rng)), k);
        const Vec3 expected = Vec3(a, b, -1.0).normalized();
        for (std::size_t j = 0; j < n.normals.size(); ++j) {
            if (!n.valid[j]) continue;
            for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(n.normals[j][c] - expected[c]));
        }
    }
    out.require(worst < 1e-3, "slanted plane error " + fmt("%.3g", worst));

    double worst_len = 0.0;
    for (int i = 0; i < 10; ++i) {
        const auto scene = fixture::random_scene(w, h, rng());
        DepthMap d = scene.depth;
        for (auto& v : d.pixels())
            if (rng() % 15 == 0) v = 0.0f;
        const NormalMap n = normals_from_depth(d, k);
        for (std::size_t j = 0; j < n.normals.size(); ++j)
            if (n.valid[j]) worst_len = std::max(worst_len, std::abs(n.normals[j].norm() - 1.0));
    }
    out.require(worst_len < 1e-6, "normal length error " + fmt("%.3g", worst_len));
    if (out.pass) out.detail = "slanted max error " + fmt("%.2e", worst);
    return out;
}

Outcome loss_oracle() {
    Outcome out;
    const CameraIntrinsics k{60.0, 60.0, 23.5, 17.5};
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const auto scene = fixture::random_scene(48, 36, rng());
        DepthMap gt = scene.depth, pred = scene.depth;
        std::normal_distribution<float> noise(0.0f, 0.02f);
        for (std::size_t i = 0; i < gt.size(); ++i) {
            if (rng() % 8 == 0) gt[i] = 0.0f;
            pred[i] = std::max(0.05f, pred[i] + noise(rng));
        }
        const BinaryMask trans = fixture::random_mask(48, 36, rng);

        const LossBreakdown zero = supervised_loss(gt, gt, trans, k);
        out.require(zero.l1 == 0.0 && zero.l2 == 0.0 && zero.combined == 0.0, "loss not zero at truth");
        out.require(self_supervised_loss(gt, gt, trans, k).value == 0.0, "self-supervised loss not zero at truth");

        const LossBreakdown b = supervised_loss(pred, gt, trans, k);
        std::size_t inside = 0, outside = 0;
        for (std::size_t i = 0; i < gt.size(); ++i)
            if (gt[i] > 0.0f) (trans[i] ? inside : outside)++;
        out.require(b.n1 == outside && b.n2 == inside, "regions do not partition valid pixels");
        const RegionLoss whole = region_loss(pred, gt, BinaryMask(48, 36, 1), k, 0.1);
        const double pooled = (b.l1 * double(b.n1) + b.l2 * double(b.n2)) / double(b.n1 + b.n2);
        out.require(whole.count == b.n1 + b.n2 && std::abs(whole.value - pooled) < 1e-9,
                    "region losses do not recombine to the whole-image loss");

        double prev = -1.0;
        for (double alpha : {0.0, 0.01, 0.1, 1.0, 10.0}) {
            LossOptions opts;
            opts.alpha = alpha;
            const double v = supervised_loss(pred, gt, trans, k, opts).combined;
            out.require(v >= prev, "loss decreases as alpha grows");
            prev = v;
        }
    }

    const DepthMap gt(2, 2, 1.0f);
    DepthMap pred = gt;
    pred(1, 0) = 1.1f;
    pred(1, 1) = 1.3f;
    pred(0, 0) = 4.0f;
    BinaryMask trans(2, 2, 0);
    trans(0, 0) = 1;
    trans(0, 1) = 1;
    const RegionLoss hand = self_supervised_loss(pred, gt, trans, k);
    out.require(hand.count == 2 && std::abs(hand.value - 0.05) < 1e-6, "2x2 example gives " + fmt("%.9g", hand.value));
    out.require(combine_losses(0.5, 1.0, 0.9) == 0.95, "0.9 * 1.0 + 0.1 * 0.5 is not bit-exactly 0.95");
    return out;
}

Outcome metrics_suite() {
    Outcome out;
    DepthMap gt(5, 4, 1.3f);
    gt(0, 0) = 0.0f;
    const MetricsReport id = evaluate(gt, gt, BinaryMask(5, 4, 1));
    out.require(id.rmse == 0.0 && id.rel == 0.0 && id.mae == 0.0, "identity errors not zero");
    out.require(id.sigma_105 == 100.0 && id.sigma_110 == 100.0 && id.sigma_125 == 100.0, "identity sigma not 100");
    out.require(to_key_value(id).find("sigma_105=100.00") != std::string::npos, "identity report format");

    const MetricsReport one =
        evaluate(DepthMap::from_data(1, 1, {1.06f}), DepthMap::from_data(1, 1, {1.0f}), BinaryMask(1, 1, 1));
    out.require(one.sigma_105 == 0.0 && one.sigma_110 == 100.0, "1.06 vs 1.00 threshold case");

    const MetricsReport two = evaluate(DepthMap::from_data(2, 1, {1.0f, 1.2f}), DepthMap::from_data(2, 1, {1.0f, 1.0f}),
                                       BinaryMask(2, 1, 1));
    // 1.2f is not exactly 1.2; compare against the residual actually present.
    const double r = double(1.2f) - 1.0;
    out.require(std::abs(two.mae - r / 2) < 1e-12 && std::abs(two.mae - 0.1) < 1e-7, "two-pixel MAE");
    out.require(std::abs(two.rmse - std::sqrt(r * r / 2)) < 1e-9, "two-pixel RMSE vs its residual");
    out.require(std::abs(two.rmse - std::sqrt(0.02)) < 1e-7, "two-pixel RMSE " + fmt("%.12f", two.rmse));

    std::mt19937_64 rng(77);
    std::uniform_real_distribution<float> depth(0.2f, 3.0f), scale(0.6f, 1.6f);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t w = 1 + rng() % 16, h = 1 + rng() % 16;
        DepthMap g(w, h, 0.0f), p(w, h, 0.0f);
        BinaryMask m(w, h, 0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] = depth(rng);
            p[i] = rng() % 25 == 0 ? 0.0f : g[i] * scale(rng);
            m[i] = rng() % 4 != 0;
        }
        m[0] = 1;
        const MetricsReport rep = evaluate(p, g, m);
        out.require(rep.rmse >= rep.mae, "RMSE < MAE on trial " + std::to_string(trial));
        out.require(rep.sigma_105 <= rep.sigma_110 && rep.sigma_110 <= rep.sigma_125,
                    "sigma not monotone on trial " + std::to_string(trial));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string cli() { return fixture::quote(TRANSMASK_CLI_PATH); }

std::string tree_digest(const fs::path& root) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root));
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& f : files) all += f.generic_string() + " " + sha256_hex(read_file(root / f)) + "\n";
    return sha256_hex(all);
}

struct AblationArm {
    std::size_t masked = 0;
    MetricsAccumulator metrics;
};

AblationArm evaluate_arm(const fs::path& out_dir) {
    AblationArm arm;
    for (const auto& scene : fs::directory_iterator(out_dir)) {
        if (!scene.is_directory()) continue;
        for (const auto& frame : fs::directory_iterator(scene.path())) {
            const TrainingPair p = read_pair(frame.path()).pair;
            BinaryMask fill(p.final_mask.width(), p.final_mask.height(), 0);
            for (std::size_t i = 0; i < fill.size(); ++i) {
                fill[i] = (!p.final_mask[i] && !p.trans_mask[i]) ? 1 : 0;
                arm.masked += fill[i] && p.target_depth[i] > 0.0f;
            }
            const DepthMap completed = complete_depth(p.masked_depth, fill).depth;
            arm.metrics.add(completed, p.target_depth, fill);
        }
    }
    return arm;
}

Outcome ablation() {
    Outcome out;
    fixture::TempDir tmp("transmask-ablation");
    fixture::write_dataset(tmp / "data", 3, 4, 128, 96, 11);
    const std::string base = cli() + " synthesize --jobs 4 --root " + fixture::quote((tmp / "data").string());
    const auto a = fixture::run_command(base + " --out " + fixture::quote((tmp / "erosion").string()));
    const auto b =
        fixture::run_command(base + " --no-erosion --out " + fixture::quote((tmp / "no_erosion").string()));
    out.require(a.exit_code == 0 && b.exit_code == 0, "synthesize failed: " + a.output + b.output);
    if (!out.pass) return out;

    AblationArm ero = evaluate_arm(tmp / "erosion");
    AblationArm full = evaluate_arm(tmp / "no_erosion");
    out.require(full.masked > ero.masked, "non-erosion does not mask more pixels");
    const MetricsReport e = ero.metrics.report(), n = full.metrics.report();
    out.require(n.rmse > e.rmse, "non-erosion RMSE " + fmt("%.5f", n.rmse) + " not worse than " + fmt("%.5f", e.rmse));
    out.require(n.rel > e.rel && n.mae > e.mae, "non-erosion REL/MAE not worse");
    out.require(n.sigma_105 < e.sigma_105 && n.sigma_110 < e.sigma_110 && n.sigma_125 < e.sigma_125,
                "non-erosion thresholds not worse");
    std::ostringstream s;
    s << "masked " << ero.masked << " vs " << full.masked << "; RMSE " << fmt("%.4f", e.rmse) << " vs "
      << fmt("%.4f", n.rmse) << "; sigma_105 " << fmt("%.2f", e.sigma_105) << " vs " << fmt("%.2f", n.sigma_105);
    if (out.pass) out.detail = s.str();
    else out.detail += " (" + s.str() + ")";
    return out;
}

Outcome determinism() {
    Outcome out;
    fixture::TempDir tmp("transmask-determinism");
    fixture::write_dataset(tmp / "data", 3, 4, 64, 48, 3);
    const std::string base =
        cli() + " synthesize --jobs 4 --augment --seed 17 --root " + fixture::quote((tmp / "data").string());
    const auto a = fixture::run_command(base + " --out " + fixture::quote((tmp / "run1").string()));
    const auto b = fixture::run_command(base + " --out " + fixture::quote((tmp / "run2").string()));
    out.require(a.exit_code == 0 && b.exit_code == 0, "synthesize failed: " + a.output + b.output);
    if (!out.pass) return out;
    const std::string h1 = tree_digest(tmp / "run1"), h2 = tree_digest(tmp / "run2");
    out.require(h1 == h2, "output trees differ");
    if (out.pass) out.detail = "tree sha256 " + h1.substr(0, 16);
    return out;
}

// Valid pixels 4-adjacent to each fill component give that component's bounds.
Outcome baseline_completer() {
    Outcome out;
    {
        BinaryMask hole(30, 24, 0);
        for (std::size_t y = 6; y < 17; ++y)
            for (std::size_t x = 8; x < 21; ++x) hole(x, y) = 1;
        DepthMap d(30, 24, 1.25f);
        for (std::size_t i = 0; i < d.size(); ++i)
            if (hole[i]) d[i] = 0.0f;
        out.require(complete_depth(d, hole).depth == DepthMap(30, 24, 1.25f), "constant plane not exact");

        DepthMap ramp(30, 24, 0.0f), punched(30, 24, 0.0f);
        for (std::size_t y = 0; y < 24; ++y)
            for (std::size_t x = 0; x < 30; ++x) ramp(x, y) = 0.9f + 0.012f * float(x) - 0.007f * float(y);
        for (std::size_t i = 0; i < ramp.size(); ++i) punched[i] = hole[i] ? 0.0f : ramp[i];
        const DepthMap filled = complete_depth(punched, hole).depth;
        double worst = 0.0;
        for (std::size_t i = 0; i < ramp.size(); ++i) worst = std::max(worst, double(std::abs(filled[i] - ramp[i])));
        out.require(worst < 1e-3, "ramp error " + fmt("%.3g", worst));
    }

    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 100 && out.pass; ++trial) {
        const std::size_t w = 40 + rng() % 40, h = 30 + rng() % 30;
        const auto scene = fixture::random_scene(w, h, rng());
        const BinaryMask fill = fixture::random_mask(w, h, rng, 0.9);
        DepthMap masked = scene.depth;
        for (std::size_t i = 0; i < masked.size(); ++i)
            if (fill[i]) masked[i] = 0.0f;
        const DepthMap filled = complete_depth(masked, fill).depth;

        std::vector<int> label(fill.size(), -1);
        for (std::size_t seed = 0; seed < fill.size(); ++seed) {
            if (!fill[seed] || label[seed] >= 0) continue;
            std::vector<std::size_t> members;
            float lo = std::numeric_limits<float>::infinity(), hi = -lo;
            std::deque<std::size_t> q{seed};
            label[seed] = int(seed);
            while (!q.empty()) {
                const std::size_t i = q.front();
                q.pop_front();
                members.push_back(i);
                const std::size_t x = i % w, y = i / w;
                const std::size_t nb[4] = {x > 0 ? i - 1 : i, x + 1 < w ? i + 1 : i, y > 0 ? i - w : i,
                                           y + 1 < h ? i + w : i};
                for (std::size_t j : nb) {
                    if (j == i) continue;
                    if (fill[j]) {
                        if (label[j] < 0) {
                            label[j] = int(seed);
                            q.push_back(j);
                        }
                    } else if (masked[j] > 0.0f) {
                        lo = std::min(lo, masked[j]);
                        hi = std::max(hi, masked[j]);
                    }
                }
            }
            for (std::size_t i : members) {
                if (lo > hi) {
                    out.require(filled[i] == 0.0f, "component without boundary was filled");
                } else {
                    out.require(filled[i] >= lo && filled[i] <= hi,
                                "maximum principle violated on trial " + std::to_string(trial));
                }
            }
        }
    }
    return out;
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;  // <= 0: no runtime bound
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "mask algebra on 200 random 64x64 mask sets", 5.0, mask_algebra},
        {2, "erosion vs brute force, iteration law, Chebyshev distance", 10.0, erosion_oracle},
        {3, "surface normals on planes", 0.0, normal_checks},
        {4, "loss properties and hand-computed values", 0.0, loss_oracle},
        {5, "metrics cases and 1000 random instances", 0.0, metrics_suite},
        {6, "erosion ablation: coverage and baseline completion error", 30.0, ablation},
        {7, "synthesize --jobs 4 twice gives identical trees", 0.0, determinism},
        {8, "baseline completion: plane, ramp, maximum principle", 0.0, baseline_completer},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0.0 && secs >= c.budget_s) {
            o.require(false, "took " + fmt("%.2f", secs) + " s, budget " + fmt("%.0f", c.budget_s) + " s");
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s criterion %d: %s [%.2f s]%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    o.detail.empty() ? "" : " - ", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
