// Acceptance suite: one check per shipped guarantee, each printing a
// [PASS]/[FAIL]/[SKIP] line. Exits nonzero if any check fails.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "docbin/dataset.hpp"
#include "docbin/error.hpp"
#include "docbin/image_io.hpp"
#include "docbin/losses.hpp"
#include "docbin/metrics.hpp"
#include "docbin/pipeline.hpp"
#include "docbin/resample.hpp"
#include "docbin/threshold.hpp"
#include "docbin/wavelet.hpp"
#include "oracles.hpp"

using namespace docbin;
namespace fs = std::filesystem;

namespace {

struct CheckContext {
    std::ostringstream detail;
    bool ok = true;
    bool skipped = false;

    void require(bool condition, const std::string& message) {
        if (!condition && ok) {
            ok = false;
            detail << message;
        }
    }
    void skip(const std::string& why) {
        skipped = true;
        detail << why;
    }
};

fs::path scratch_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("docbin-acceptance-" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

double max_abs_diff(const FloatImage& a, const FloatImage& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    }
    return worst;
}

// ---- 1: ASM reproduces the published rows to +-0.01 ----

void check_asm_rows(CheckContext& ctx) {
    struct Row {
        double fm, pfm, psnr, drd, expected;
    };
    // Benchmark, Nabuco, and CMATERdb result rows (FM, p-FM, PSNR, DRD, ASM).
    const Row rows[] = {
        {73.91, 75.93, 14.50, 30.32, 58.51},
        {75.83, 80.72, 15.62, 9.65, 65.63},
        {87.95, 89.01, 19.10, 4.83, 72.81},
        {88.56, 89.90, 19.31, 4.46, 73.33},
        {88.14, 89.71, 19.09, 4.64, 73.08},
        {89.13, 90.35, 19.30, 4.49, 73.57},
        {88.83, 89.87, 19.07, 4.86, 73.23},
        {89.69, 90.78, 19.15, 4.45, 73.79},
        {85.93, 86.57, 18.17, 6.33, 71.08},
        {87.45, 88.16, 18.61, 5.40, 72.21},
        {85.95, 86.37, 18.17, 5.69, 71.20},
        {87.63, 88.27, 18.65, 5.17, 72.34},
        {87.56, 88.22, 18.51, 5.10, 72.30},
        {88.04, 88.72, 18.60, 5.06, 72.58},
        {82.19, 88.17, 16.37, 6.36, 70.09},
        {83.10, 89.44, 16.85, 5.59, 70.95},
        {87.06, 91.49, 17.76, 4.34, 72.99},
        {87.24, 92.31, 17.83, 4.24, 73.28},
        {87.22, 91.66, 17.80, 4.29, 73.10},
        {87.36, 92.46, 17.85, 4.19, 73.37},
    };
    for (const Row& row : rows) {
        const double got = average_score(row.fm, row.pfm, row.psnr, row.drd);
        std::ostringstream msg;
        msg << "ASM(" << row.fm << ", " << row.pfm << ", " << row.psnr << ", " << row.drd
            << ") = " << got << ", expected " << row.expected;
        ctx.require(std::abs(got - row.expected) <= 0.01, msg.str());
    }
}

// ---- 2: HWT round-trip and Parseval ----

void check_hwt_roundtrip(CheckContext& ctx) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> dim(2, 512);
    for (int trial = 0; trial < 200; ++trial) {
        const int w = dim(rng), h = dim(rng);
        const FloatImage img = oracles::random_image(rng, w, h, 0.0, 255.0, false);
        const WaveletSubbands sb = hwt_forward(img);
        const FloatImage back = hwt_inverse(sb);
        const double err = max_abs_diff(back, img);
        ctx.require(err <= 1e-9, "round-trip error " + std::to_string(err) + " on " +
                                     std::to_string(w) + "x" + std::to_string(h));

        if (w % 2 == 0 && h % 2 == 0) {
            double in_energy = 0.0, band_energy = 0.0;
            for (double v : img.values) in_energy += v * v;
            for (const FloatImage* band : {&sb.ll, &sb.lh, &sb.hl, &sb.hh}) {
                for (double v : band->values) band_energy += v * v;
            }
            ctx.require(std::abs(band_energy - in_energy) <= 1e-6 * in_energy,
                        "Parseval violated on " + std::to_string(w) + "x" + std::to_string(h));
        }
    }
}

// ---- 3: Otsu equals the exhaustive search ----

void check_otsu_oracle(CheckContext& ctx) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        // alternate full-range and narrow-range images to stress tie handling
        const double lo = (trial % 2 == 0) ? 0.0 : 90.0;
        const double hi = (trial % 2 == 0) ? 255.0 : 120.0;
        const FloatImage img = oracles::random_image(rng, 32, 32, lo, hi);
        const int got = otsu_threshold(img);
        const int want = oracles::exhaustive_otsu(img);
        if (got != want) {
            ctx.require(false, "otsu mismatch: got " + std::to_string(got) + ", oracle " +
                                   std::to_string(want) + " at trial " + std::to_string(trial));
            return;
        }
    }
}

// ---- 4: integral-image local thresholds equal the naive reference ----

void check_local_threshold_oracle(CheckContext& ctx) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const FloatImage img = oracles::random_image(rng, 64, 64);
        for (int window : {3, 15, 25}) {
            for (const ThresholdParams& params :
                 {ThresholdParams::niblack(window), ThresholdParams::sauvola(window)}) {
                const BinaryMask got = binarize_local(img, params);
                const BinaryMask want = oracles::naive_local_threshold(img, params);
                if (got.bits != want.bits) {
                    ctx.require(false, threshold_method_name(params.method) + " window " +
                                           std::to_string(window) + " differs from naive reference");
                    return;
                }
            }
        }
    }
}

// ---- 5: metric fixtures ----

void check_metric_fixtures(CheckContext& ctx) {
    ctx.require(std::abs(f_measure({2, 2, 2, 10}) - 50.0) < 1e-12, "FM(tp=fp=fn=2) != 50");

    BinaryMask gt100(10, 10);
    BinaryMask pred100 = gt100;
    pred100.set(4, 7, true);
    ctx.require(std::abs(psnr(pred100, gt100) - 20.0) < 1e-9, "PSNR(1 flip in 100) != 20 dB");

    BinaryMask block_gt(24, 24);
    for (int y = 4; y < 20; ++y)
        for (int x = 4; x < 20; ++x) block_gt.set(x, y, true);
    const auto nubn = nubn_count(block_gt, 8);
    BinaryMask flipped = block_gt;
    flipped.set(10, 10, false);
    ctx.require(std::abs(drd(flipped, block_gt) - 1.0 / static_cast<double>(nubn)) < 1e-12,
                "DRD(single interior flip) != 1/NUBN");

    BinaryMask strokes(30, 9);
    for (int x = 2; x < 28; ++x) {
        strokes.set(x, 2, true);
        strokes.set(x, 6, true);
    }
    std::mt19937_64 rng(5);
    const BinaryMask pred = oracles::random_mask(rng, 30, 9, 0.3);
    ctx.require(std::abs(pseudo_f_measure(pred, strokes) -
                         f_measure(confusion_counts(pred, strokes))) < 1e-9,
                "p-FM != FM on 1-pixel strokes");

    for (int trial = 0; trial < 20; ++trial) {
        const BinaryMask g = oracles::random_mask(rng, 16, 16, 0.4);
        if (nubn_count(g, 8) == 0) continue;
        const BinaryMask p = oracles::random_mask(rng, 16, 16, 0.4);
        ctx.require(std::abs(drd(p, g) - oracles::brute_force_drd(p, g)) <= 1e-9,
                    "DRD differs from the brute-force weight-matrix oracle");
    }
}

// ---- 6: loss gradients ----

void check_loss_gradients(CheckContext& ctx) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> dist(0.05, 0.95);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> pv(64), gv(64);
        for (auto& v : pv) v = dist(rng);
        for (auto& v : gv) v = dist(rng);
        const ProbMap point = ProbMap::from_values(8, 8, pv);
        const ProbMap target = ProbMap::from_values(8, 8, gv);

        const auto bce_check = check_grad([&](const ProbMap& p) { return bce(p, target).loss; },
                                          bce(point, target).grad, point);
        ctx.require(bce_check.max_rel_err < 1e-5,
                    "BCE gradient error " + std::to_string(bce_check.max_rel_err));

        const auto dice_check = check_grad([&](const ProbMap& p) { return soft_dice(p, target).loss; },
                                           soft_dice(point, target).grad, point);
        ctx.require(dice_check.max_rel_err < 1e-5,
                    "Soft-Dice gradient error " + std::to_string(dice_check.max_rel_err));
        if (!ctx.ok) return;
    }

    const double n = 64.0;
    const double alpha = 10.0;
    const ProbMap point = ProbMap::from_values(8, 8, std::vector<double>(64, 0.5));
    const FloatImage condition(8, 8, 0.0);
    const CriticFn sum_critic = [](const ProbMap& m, const FloatImage&) {
        double acc = 0.0;
        for (double v : m.values) acc += v;
        return acc;
    };
    const CriticFn mean_critic = [&](const ProbMap& m, const FloatImage& c) {
        return sum_critic(m, c) / static_cast<double>(m.size());
    };
    const double gp_sum = gradient_penalty(sum_critic, point, condition, alpha);
    const double want_sum = alpha * std::pow(std::sqrt(n) - 1.0, 2.0);
    ctx.require(std::abs(gp_sum - want_sum) <= 1e-6 * want_sum, "sum-critic gradient penalty off");

    const double gp_mean = gradient_penalty(mean_critic, point, condition, alpha);
    const double want_mean = alpha * std::pow(1.0 / std::sqrt(n) - 1.0, 2.0);
    ctx.require(std::abs(gp_mean - want_mean) <= 1e-6 * want_mean, "mean-critic gradient penalty off");
}

// ---- 7: resampler oracle ----

void check_resize_oracle(CheckContext& ctx) {
    const ResizeMethod methods[] = {
        {ResizeKind::nearest}, {ResizeKind::bilinear}, {ResizeKind::bicubic},
        {ResizeKind::area},    {ResizeKind::lanczos},
    };
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const FloatImage img = oracles::random_image(rng, 16, 16, 0.0, 255.0, false);
        for (const auto& m : methods) {
            for (auto [w, h] : {std::pair{7, 5}, std::pair{8, 8}, std::pair{31, 9}}) {
                const FloatImage got = resize(img, m, w, h);
                const FloatImage want = oracles::naive_resize(img, m, w, h);
                const double err = max_abs_diff(got, want);
                if (err > 1e-6) {
                    ctx.require(false, resize_kind_name(m.kind) + " differs from oracle by " +
                                           std::to_string(err));
                    return;
                }
            }
        }
    }
    const FloatImage constant(20, 20, 77.0);
    for (const auto& m : methods) {
        const FloatImage out = resize(constant, m, 13, 9);
        for (double v : out.values) {
            ctx.require(std::abs(v - 77.0) <= 1e-9,
                        resize_kind_name(m.kind) + " does not preserve constants");
        }
    }
}

// ---- 8: resizer comparison harness on the synthetic corpus ----

void check_table3_harness(CheckContext& ctx) {
    const fs::path root = scratch_dir("table3");
    fs::create_directories(root / "synthetic" / "inputs");
    fs::create_directories(root / "synthetic" / "gt");
    for (int seed = 0; seed < 20; ++seed) {
        const oracles::SyntheticPage page = oracles::make_degraded_page(1000 + seed);
        const std::string id = "seed-" + std::to_string(seed);
        save_image(quantize_u8(page.image), root / "synthetic" / "inputs" / (id + ".png"));
        save_mask(page.gt, root / "synthetic" / "gt" / (id + ".png"));
    }
    const DatasetManifest manifest = ingest_manifest(root / "synthetic");
    const ResizerTable table = compare_resizers({manifest}, table3_methods());

    const std::size_t hwt_row = 5;  // "HWT"
    for (std::size_t mi = 0; mi < table.methods.size(); ++mi) {
        if (mi == hwt_row) continue;
        std::ostringstream msg;
        msg << "HWT (" << table.mean_values[hwt_row] << " dB) does not rank strictly below "
            << table.methods[mi] << " (" << table.mean_values[mi] << " dB)";
        ctx.require(table.mean_values[hwt_row] < table.mean_values[mi], msg.str());
    }

    const fs::path csv = root / "table3.csv";
    write_resizer_csv(table, csv);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    ctx.require(header == "Method,synthetic,Mean Values", "unexpected CSV header: " + header);
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) labels.push_back(line.substr(0, line.find(',')));
    }
    const std::vector<std::string> expected{"Bicubic", "Bilinear", "Area",
                                            "Nearest", "Lanczos",  "HWT", "Ours"};
    ctx.require(labels == expected, "unexpected CSV row labels");
}

// ---- 9: optional external-data check against DIBCO 2013 ----

void check_dibco2013(CheckContext& ctx) {
    const char* dir = std::getenv("DOCBIN_DIBCO2013_DIR");
    if (dir == nullptr) {
        ctx.skip("set DOCBIN_DIBCO2013_DIR to a directory with inputs/ and gt/ to enable");
        return;
    }
    const DatasetManifest manifest = ingest_manifest(dir);
    ctx.require(!manifest.pairs.empty(), "no pages found under " + std::string(dir));
    double fm = 0.0, pfm = 0.0, psnr_db = 0.0, drd_v = 0.0;
    std::size_t n = 0;
    for (const auto& pair : manifest.pairs) {
        const FloatImage gray = to_grayscale(load_image(pair.input));
        const BinaryMask pred = binarize_global(gray);
        const BinaryMask gt = load_mask(pair.gt);
        const MetricsReport report = evaluate_masks(pred, gt);
        fm += report.fm;
        pfm += report.pfm;
        psnr_db += report.psnr;
        drd_v += report.drd.value_or(0.0);
        ++n;
    }
    fm /= n;
    pfm /= n;
    psnr_db /= n;
    drd_v /= n;
    std::ostringstream msg;
    msg << std::fixed << std::setprecision(2) << "got FM " << fm << ", p-FM " << pfm << ", PSNR "
        << psnr_db << ", DRD " << drd_v;
    ctx.require(std::abs(fm - 80.04) <= 0.5, "FM outside 80.04 +- 0.5; " + msg.str());
    ctx.require(std::abs(psnr_db - 16.63) <= 0.1, "PSNR outside 16.63 +- 0.1; " + msg.str());
    ctx.require(std::abs(drd_v - 10.98) <= 0.5, "DRD outside 10.98 +- 0.5; " + msg.str());
    ctx.require(std::abs(pfm - 83.43) <= 2.0, "p-FM outside 83.43 +- 2.0; " + msg.str());
}

// ---- 10: end-to-end determinism and the fusion law ----

void check_end_to_end(CheckContext& ctx) {
    const fs::path root = scratch_dir("e2e");
    fs::create_directories(root / "ds" / "inputs");
    fs::create_directories(root / "ds" / "gt");
    const oracles::SyntheticPage page = oracles::make_degraded_page(77, 1024, 768);
    save_image(quantize_u8(page.image), root / "ds" / "inputs" / "page.png");
    save_mask(page.gt, root / "ds" / "gt" / "page.png");
    const DatasetManifest manifest = ingest_manifest(root / "ds");

    const PipelineConfig cfg;  // classical defaults: MFE on, Sauvola local, Otsu global

    const auto start = std::chrono::steady_clock::now();
    const PipelineResult result = run_pipeline(manifest, cfg, root / "out1");
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ctx.require(result.failures.empty(), "pipeline reported a failure");
    ctx.require(elapsed < 10.0, "single-page run took " + std::to_string(elapsed) + " s");

    run_pipeline(manifest, cfg, root / "out2");
    std::ifstream a(root / "out1" / "page.png", std::ios::binary);
    std::ifstream b(root / "out2" / "page.png", std::ios::binary);
    const std::string bytes_a((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string bytes_b((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    ctx.require(!bytes_a.empty() && bytes_a == bytes_b, "masks differ between identical runs");

    // recompute the three masks independently and verify the AND law
    const RasterImage original = load_image(root / "ds" / "inputs" / "page.png");
    const FloatImage enhanced = run_stage2(run_stage1(original, cfg), cfg);
    const BinaryMask local = stage3_local_mask(enhanced, cfg);
    const BinaryMask global = stage3_global_mask(original, cfg);
    const BinaryMask emitted = load_mask(root / "out1" / "page.png");
    ctx.require(emitted.bits == fuse_and(local, global).bits,
                "emitted mask is not the AND of the local and global masks");

    const StageTiming& t = result.timing;
    ctx.require(std::abs(t.parts_sum() - t.total) <= 0.05 * t.total + 1e-3,
                "stage timings do not account for the end-to-end wall clock");
}

struct Criterion {
    int id;
    std::string label;
    std::function<void(CheckContext&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "ASM reproduces published table rows to +-0.01", check_asm_rows},
        {2, "HWT round-trip <= 1e-9 and Parseval to 1e-6", check_hwt_roundtrip},
        {3, "Otsu equals exhaustive search on 1000 images", check_otsu_oracle},
        {4, "local thresholds equal naive reference bit-for-bit", check_local_threshold_oracle},
        {5, "metric fixtures (FM, PSNR, DRD, p-FM, DRD oracle)", check_metric_fixtures},
        {6, "analytic loss gradients and penalty closed forms", check_loss_gradients},
        {7, "resamplers match the direct kernel-sum oracle", check_resize_oracle},
        {8, "un-normalized HWT ranks last on the synthetic corpus", check_table3_harness},
        {9, "DIBCO 2013 Otsu row (optional, external data)", check_dibco2013},
        {10, "end-to-end determinism and the fusion law", check_end_to_end},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        CheckContext ctx;
        const auto start = std::chrono::steady_clock::now();
        try {
            criterion.run(ctx);
        } catch (const std::exception& e) {
            ctx.ok = false;
            ctx.detail << "exception: " << e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        std::ostringstream line;
        const char* status = ctx.skipped ? "SKIP" : (ctx.ok ? "PASS" : "FAIL");
        line << "[" << status << "] criterion " << criterion.id << ": " << criterion.label << " ("
             << std::fixed << std::setprecision(2) << elapsed << "s)";
        if (!ctx.detail.str().empty()) {
            line << (ctx.skipped ? " -- " : " -- ") << ctx.detail.str();
        }
        std::cout << line.str() << std::endl;
        if (!ctx.ok && !ctx.skipped) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
