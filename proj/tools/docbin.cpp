// Command-line front end for the document binarization toolkit.
#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <random>
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

using namespace docbin;
namespace fs = std::filesystem;

namespace {

std::pair<int, int> parse_size(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos) {
        throw ConfigError("expected a size of the form WxH, got: " + text);
    }
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
}

NormalizationSpec norm_spec(const std::string& name) {
    NormalizationSpec spec;
    spec.strategy = parse_normalization(name);
    return spec;
}

CriticFn make_critic(const std::string& name) {
    if (name == "zero") {
        return [](const ProbMap&, const FloatImage&) { return 0.0; };
    }
    if (name == "sum") {
        return [](const ProbMap& m, const FloatImage&) {
            double acc = 0.0;
            for (double v : m.values) acc += v;
            return acc;
        };
    }
    if (name == "mean") {
        return [](const ProbMap& m, const FloatImage&) {
            double acc = 0.0;
            for (double v : m.values) acc += v;
            return acc / static_cast<double>(m.size());
        };
    }
    throw ConfigError("unknown critic: " + name);
}

void print_metrics(const MetricsReport& report, const std::string& file, bool csv) {
    std::cout << std::fixed << std::setprecision(2);
    if (csv) {
        std::cout << "file,fm,pfm,psnr_db,drd,asm\n";
        std::cout << file << ',' << report.fm << ',' << report.pfm << ',';
        if (report.psnr_infinite) std::cout << "inf";
        else std::cout << report.psnr;
        std::cout << ',';
        if (report.drd) std::cout << *report.drd;
        std::cout << ',';
        if (report.asm_score) std::cout << *report.asm_score;
        std::cout << '\n';
        return;
    }
    std::cout << "FM:   " << report.fm << "\n";
    std::cout << "p-FM: " << report.pfm << "\n";
    if (report.psnr_infinite) std::cout << "PSNR: inf\n";
    else std::cout << "PSNR: " << report.psnr << "dB\n";
    if (report.drd) std::cout << "DRD:  " << *report.drd << "\n";
    else std::cout << "DRD:  undefined (uniform ground truth)\n";
    if (report.asm_score) std::cout << "ASM:  " << *report.asm_score << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"document image binarization toolkit"};
    app.require_subcommand(1);

    // ---- binarize ----
    auto* binarize_cmd = app.add_subcommand("binarize", "threshold an image into a text mask");
    std::string bin_method = "otsu";
    int bin_window = 25;
    double bin_k = std::numeric_limits<double>::quiet_NaN();
    double bin_R = 128.0;
    std::string bin_in, bin_out;
    binarize_cmd->add_option("--method", bin_method, "otsu|niblack|sauvola")->capture_default_str();
    binarize_cmd->add_option("--window", bin_window, "local window (odd)")->capture_default_str();
    binarize_cmd->add_option("--k", bin_k, "niblack/sauvola k (defaults per method)");
    binarize_cmd->add_option("--R", bin_R, "sauvola dynamic range")->capture_default_str();
    binarize_cmd->add_option("input", bin_in)->required();
    binarize_cmd->add_option("output", bin_out)->required();

    // ---- resize ----
    auto* resize_cmd = app.add_subcommand("resize", "resample an image");
    std::string rs_method = "bilinear", rs_size, rs_in, rs_out;
    bool rs_clamp = false;
    resize_cmd->add_option("--method", rs_method, "nearest|bilinear|bicubic|area|lanczos")
        ->capture_default_str();
    resize_cmd->add_option("--size", rs_size, "target WxH")->required();
    resize_cmd->add_flag("--clamp", rs_clamp, "clamp output to [0,255] before saving");
    resize_cmd->add_option("input", rs_in)->required();
    resize_cmd->add_option("output", rs_out)->required();

    // ---- mfe ----
    auto* mfe_cmd = app.add_subcommand("mfe", "extract the normalized LL sub-band");
    std::string mfe_norm = "minmax", mfe_in, mfe_out, mfe_bands;
    mfe_cmd->add_option("--norm", mfe_norm, "minmax|half|zscore")->capture_default_str();
    mfe_cmd->add_option("--export-bands", mfe_bands, "directory for LL/LH/HL/HH PNGs");
    mfe_cmd->add_option("input", mfe_in)->required();
    mfe_cmd->add_option("output", mfe_out)->required();

    // ---- evaluate ----
    auto* eval_cmd = app.add_subcommand("evaluate", "score a mask against ground truth");
    std::string ev_pred, ev_gt;
    bool ev_csv = false;
    eval_cmd->add_option("--pred", ev_pred)->required();
    eval_cmd->add_option("--gt", ev_gt)->required();
    eval_cmd->add_flag("--csv", ev_csv, "emit one CSV row");

    // ---- loss ----
    auto* loss_cmd = app.add_subcommand("loss", "evaluate the reference losses on two images");
    std::string loss_kind = "bce", loss_pred, loss_gt, loss_critic = "zero";
    bool loss_baseline = false;
    double loss_eps = 0.5;
    loss_cmd->add_option("--kind", loss_kind, "bce|dice|gen|disc")->capture_default_str();
    loss_cmd->add_option("--pred", loss_pred)->required();
    loss_cmd->add_option("--gt", loss_gt)->required();
    loss_cmd->add_option("--critic", loss_critic, "zero|sum|mean")->capture_default_str();
    loss_cmd->add_option("--eps", loss_eps, "interpolation weight for disc")->capture_default_str();
    loss_cmd->add_flag("--baseline", loss_baseline, "lambda*BCE generator loss without Dice");

    // ---- gradcheck ----
    auto* grad_cmd = app.add_subcommand("gradcheck", "verify analytic gradients on random maps");
    std::uint64_t grad_seed = 1;
    int grad_w = 8, grad_h = 8;
    grad_cmd->add_option("--seed", grad_seed)->capture_default_str();
    grad_cmd->add_option("--width", grad_w)->capture_default_str();
    grad_cmd->add_option("--height", grad_h)->capture_default_str();

    // ---- dataset ----
    auto* dataset_cmd = app.add_subcommand("dataset", "manifest, folds, and augmentation");
    auto* ingest_cmd = dataset_cmd->add_subcommand("ingest", "pair inputs with ground truth");
    std::string ing_root;
    ingest_cmd->add_option("--root", ing_root)->required();

    auto* folds_cmd = dataset_cmd->add_subcommand("folds", "build cross-validation folds");
    std::string folds_root, folds_split;
    int folds_k = 5;
    std::uint64_t folds_seed = 0;
    folds_cmd->add_option("--root", folds_root)->required();
    folds_cmd->add_option("--k", folds_k)->capture_default_str();
    folds_cmd->add_option("--seed", folds_seed)->capture_default_str();
    folds_cmd->add_option("--splits", folds_split, "explicit page_id,fold CSV");

    auto* augment_cmd = dataset_cmd->add_subcommand("augment", "write augmented training data");
    std::string aug_root, aug_out;
    bool aug_global = false, aug_no_rotation = false;
    std::vector<double> aug_scales;
    int aug_patch = 256, aug_global_size = 512;
    augment_cmd->add_option("--root", aug_root)->required();
    augment_cmd->add_option("--out", aug_out)->required();
    augment_cmd->add_flag("--global", aug_global, "512^2 flip/rotation set instead of patches");
    augment_cmd->add_flag("--no-rotation", aug_no_rotation, "skip the 270-degree patch variant");
    augment_cmd->add_option("--scales", aug_scales, "patch scale factors");
    augment_cmd->add_option("--patch-size", aug_patch)->capture_default_str();
    augment_cmd->add_option("--global-size", aug_global_size)->capture_default_str();

    // ---- pipeline ----
    auto* pipeline_cmd = app.add_subcommand("pipeline", "three-stage runs and harnesses");
    auto* run_cmd = pipeline_cmd->add_subcommand("run", "run the three-stage pipeline");
    std::string run_config, run_data, run_out;
    run_cmd->add_option("--config", run_config, "pipeline JSON config");
    run_cmd->add_option("--data", run_data, "dataset root with inputs/ and gt/")->required();
    run_cmd->add_option("--out", run_out, "output directory")->required();

    auto* cmp_cmd = pipeline_cmd->add_subcommand("compare-resizers", "reproduce the resizer table");
    std::vector<std::string> cmp_data;
    std::string cmp_out, cmp_norm = "minmax";
    bool cmp_no_quantize = false;
    cmp_cmd->add_option("--data", cmp_data, "one or more dataset roots")->required();
    cmp_cmd->add_option("--out", cmp_out, "output CSV")->required();
    cmp_cmd->add_option("--norm", cmp_norm, "minmax|half|zscore")->capture_default_str();
    cmp_cmd->add_flag("--no-quantize", cmp_no_quantize, "skip 8-bit clamp+round before Otsu");

    auto* report_cmd = pipeline_cmd->add_subcommand("report", "reformat a metrics CSV");
    std::string rep_in, rep_out, rep_fmt = "aligned";
    report_cmd->add_option("--in", rep_in, "CSV from pipeline run")->required();
    report_cmd->add_option("--out", rep_out)->required();
    report_cmd->add_option("--fmt", rep_fmt, "csv|aligned")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (binarize_cmd->parsed()) {
            ThresholdParams params;
            params.method = parse_threshold_method(bin_method);
            if (params.method == ThresholdMethod::niblack) params = ThresholdParams::niblack(bin_window);
            if (params.method == ThresholdMethod::sauvola) params = ThresholdParams::sauvola(bin_window);
            if (!std::isnan(bin_k)) params.k = bin_k;
            params.R = bin_R;
            const FloatImage gray = to_grayscale(load_image(bin_in));
            save_mask(binarize(gray, params), bin_out);
        } else if (resize_cmd->parsed()) {
            ResizeMethod method;
            method.kind = parse_resize_kind(rs_method);
            const auto [w, h] = parse_size(rs_size);
            FloatImage out = resize(to_grayscale(load_image(rs_in)), method, w, h);
            if (rs_clamp) {
                for (double& v : out.values) v = std::clamp(v, 0.0, 255.0);
            }
            save_image(quantize_u8(out), rs_out);
        } else if (mfe_cmd->parsed()) {
            const FloatImage gray = to_grayscale(load_image(mfe_in));
            const NormalizationSpec spec = norm_spec(mfe_norm);
            save_image(quantize_u8(mfe_extract(gray, spec)), mfe_out);
            if (!mfe_bands.empty()) {
                const WaveletSubbands sb = hwt_forward(gray);
                save_image(quantize_u8(sb.ll), fs::path(mfe_bands) / "ll.png");
                save_image(quantize_u8(sb.lh), fs::path(mfe_bands) / "lh.png");
                save_image(quantize_u8(sb.hl), fs::path(mfe_bands) / "hl.png");
                save_image(quantize_u8(sb.hh), fs::path(mfe_bands) / "hh.png");
            }
        } else if (eval_cmd->parsed()) {
            print_metrics(evaluate_pair(ev_pred, ev_gt), ev_pred, ev_csv);
        } else if (loss_cmd->parsed()) {
            const ProbMap pred = ProbMap::from_image(to_grayscale(load_image(loss_pred)));
            const ProbMap gt = ProbMap::from_image(to_grayscale(load_image(loss_gt)));
            const FloatImage condition = to_grayscale(load_image(loss_gt));
            const LossConfig cfg;
            std::cout << std::setprecision(10);
            if (loss_kind == "bce") {
                std::cout << bce(pred, gt).loss << "\n";
            } else if (loss_kind == "dice") {
                std::cout << soft_dice(pred, gt).loss << "\n";
            } else if (loss_kind == "gen") {
                const GeneratorFn gen = [&pred](const FloatImage&) { return pred; };
                std::cout << generator_objective(make_critic(loss_critic), gen, condition, gt, cfg,
                                                 loss_baseline)
                          << "\n";
            } else if (loss_kind == "disc") {
                std::cout << discriminator_objective(make_critic(loss_critic), gt, pred, condition,
                                                     loss_eps, cfg)
                          << "\n";
            } else {
                throw ConfigError("unknown loss kind: " + loss_kind);
            }
        } else if (grad_cmd->parsed()) {
            std::mt19937_64 rng(grad_seed);
            std::uniform_real_distribution<double> dist(0.05, 0.95);
            std::vector<double> pv(static_cast<std::size_t>(grad_w) * grad_h);
            std::vector<double> gv(pv.size());
            for (auto& v : pv) v = dist(rng);
            for (auto& v : gv) v = dist(rng);
            const ProbMap point = ProbMap::from_values(grad_w, grad_h, pv);
            const ProbMap target = ProbMap::from_values(grad_w, grad_h, gv);
            const auto bce_result = check_grad([&](const ProbMap& p) { return bce(p, target).loss; },
                                               bce(point, target).grad, point);
            const auto dice_result =
                check_grad([&](const ProbMap& p) { return soft_dice(p, target).loss; },
                           soft_dice(point, target).grad, point);
            std::cout << "bce  max relative error: " << bce_result.max_rel_err << "\n";
            std::cout << "dice max relative error: " << dice_result.max_rel_err << "\n";
        } else if (ingest_cmd->parsed()) {
            const DatasetManifest manifest = ingest_manifest(ing_root);
            std::cout << manifest.name << ": " << manifest.pairs.size() << " pages\n";
            for (const auto& pair : manifest.pairs) {
                std::cout << "  " << pair.id << " (" << pair.width << "x" << pair.height << ")\n";
            }
        } else if (folds_cmd->parsed()) {
            const DatasetManifest manifest = ingest_manifest(folds_root);
            const FoldSpec spec = folds_split.empty() ? make_folds(manifest, folds_k, folds_seed)
                                                      : load_folds(manifest, folds_split);
            for (const auto& [id, fold] : spec.assignment) {
                std::cout << id << "," << fold << "\n";
            }
        } else if (augment_cmd->parsed()) {
            const DatasetManifest manifest = ingest_manifest(aug_root);
            AugmentConfig cfg;
            if (!aug_scales.empty()) cfg.scales = aug_scales;
            cfg.include_patch_rotation = !aug_no_rotation;
            cfg.patch_size = aug_patch;
            cfg.global_size = aug_global_size;
            const std::size_t count = aug_global ? augment_global_set(manifest, cfg, aug_out)
                                                 : augment_patch_set(manifest, cfg, aug_out);
            std::cout << count << (aug_global ? " images\n" : " patch pairs\n");
        } else if (run_cmd->parsed()) {
            const PipelineConfig cfg =
                run_config.empty() ? PipelineConfig{} : load_pipeline_config(run_config);
            const DatasetManifest manifest = ingest_manifest(run_data);
            const PipelineResult result = run_pipeline(manifest, cfg, run_out);
            emit_report(result.pages, result.mean, result.timing, ReportFormat::csv,
                        fs::path(run_out) / "reports.csv");
            emit_report(result.pages, result.mean, result.timing, ReportFormat::aligned_text,
                        fs::path(run_out) / "report.txt");
            std::cout << format_report(result.pages, result.mean, result.timing,
                                       ReportFormat::aligned_text);
            for (const auto& failure : result.failures) {
                std::cerr << "failed: " << failure.id << ": " << failure.message << "\n";
            }
        } else if (cmp_cmd->parsed()) {
            std::vector<DatasetManifest> manifests;
            for (const auto& root : cmp_data) manifests.push_back(ingest_manifest(root));
            const ResizerTable table =
                compare_resizers(manifests, table3_methods(), norm_spec(cmp_norm), !cmp_no_quantize);
            write_resizer_csv(table, cmp_out);
            std::cout << "wrote " << cmp_out << "\n";
        } else if (report_cmd->parsed()) {
            const auto [pages, mean] = read_report_csv(rep_in);
            const ReportFormat fmt = rep_fmt == "csv" ? ReportFormat::csv : ReportFormat::aligned_text;
            emit_report(pages, mean, StageTiming{}, fmt, rep_out);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
