#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "docbin/dataset.hpp"
#include "docbin/image.hpp"
#include "docbin/metrics.hpp"
#include "docbin/resample.hpp"
#include "docbin/threshold.hpp"
#include "docbin/wavelet.hpp"

namespace docbin {

enum class BackendKind { identity, classic, external_command };

/// Stand-in for a learned stage. `classic` backends run the configured
/// thresholding; `external_command` runs a shell command with {in}/{out}
/// placeholders exchanging 8-bit PNGs.
struct BackendSpec {
    BackendKind kind = BackendKind::identity;
    ThresholdParams params{};
    std::string command_template;
};

enum class CombineMode { mean, sum_clamped };

struct PipelineConfig {
    int patch_size = 256;
    bool mfe_enabled = true;
    NormalizationSpec norm{};
    std::array<BackendSpec, 4> stage2{};  // red, green, blue, gray
    BackendSpec stage3_local{BackendKind::classic, ThresholdParams::sauvola(), {}};
    BackendSpec stage3_global{BackendKind::classic, ThresholdParams::otsu(), {}};
    int global_size = 512;
    CombineMode combine = CombineMode::mean;
};

PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct StageTiming {
    double stage1 = 0.0;
    double stage2 = 0.0;
    double stage3_local = 0.0;
    double stage3_global = 0.0;
    double fuse = 0.0;
    double total = 0.0;  // wall clock around the five stages, measured separately

    double parts_sum() const { return stage1 + stage2 + stage3_local + stage3_global + fuse; }
};

struct Stage1Output {
    std::array<PatchGrid, 4> channels;  // red, green, blue, gray
    int source_width = 0;
    int source_height = 0;
    int patch_size = 0;  // tiling size at full resolution
    bool mfe_applied = false;
};

struct StageMasks {
    BinaryMask local;
    BinaryMask global;
    BinaryMask fused;
};

/// Tile, split into four channels, and (when MFE is on) reduce every patch to
/// its normalized LL sub-band at half size.
Stage1Output run_stage1(const RasterImage& img, const PipelineConfig& cfg);

/// Per-channel backends on every patch, LL upsampling when MFE is on,
/// stitching, and the configured channel combination. Output has the source
/// resolution.
FloatImage run_stage2(const Stage1Output& stage1, const PipelineConfig& cfg);

/// Local mask from the enhanced image, global mask from the nearest-resized
/// original, fused by pixel-wise AND.
StageMasks run_stage3(const FloatImage& enhanced, const RasterImage& original, const PipelineConfig& cfg);

// The two stage-3 branches, exposed for timing and tests.
BinaryMask stage3_local_mask(const FloatImage& enhanced, const PipelineConfig& cfg);
BinaryMask stage3_global_mask(const RasterImage& original, const PipelineConfig& cfg);

FloatImage apply_enhancement(const BackendSpec& backend, const FloatImage& input);
BinaryMask apply_binarization(const BackendSpec& backend, const FloatImage& input);

struct PageReport {
    std::string id;
    MetricsReport metrics;
};

struct PageFailure {
    std::string id;
    std::string message;
};

struct PipelineResult {
    std::vector<PageReport> pages;
    std::vector<PageFailure> failures;
    std::optional<MetricsReport> mean;
    StageTiming timing;
};

/// Run every page, write B_final masks into out_dir, evaluate against the
/// ground truth. Per-page errors are collected; the run continues.
PipelineResult run_pipeline(const DatasetManifest& manifest, const PipelineConfig& cfg,
                            const std::filesystem::path& out_dir);

// ---- Resizer comparison harness ----

enum class CompareKind { resampler, hwt_raw, hwt_norm };

struct CompareMethodSpec {
    std::string label;
    CompareKind kind = CompareKind::resampler;
    ResizeMethod method{};
};

/// Bicubic, Bilinear, Area, Nearest, Lanczos, HWT, Ours.
std::vector<CompareMethodSpec> table3_methods();

struct ResizerTable {
    std::vector<std::string> methods;              // row labels
    std::vector<std::string> datasets;             // column labels
    std::vector<std::vector<double>> psnr_db;      // [method][dataset]
    std::vector<double> mean_values;               // [method]
};

/// Downscale input and GT to half dims (GT by nearest), Otsu-binarize the
/// downscaled input, and report PSNR per dataset plus the mean column.
ResizerTable compare_resizers(const std::vector<DatasetManifest>& datasets,
                              const std::vector<CompareMethodSpec>& methods,
                              const NormalizationSpec& norm = {}, bool quantize = true);

void write_resizer_csv(const ResizerTable& table, const std::filesystem::path& path);

// ---- Report emission ----

enum class ReportFormat { csv, aligned_text };

std::string format_report(const std::vector<PageReport>& pages,
                          const std::optional<MetricsReport>& mean, const StageTiming& timing,
                          ReportFormat fmt);

void emit_report(const std::vector<PageReport>& pages, const std::optional<MetricsReport>& mean,
                 const StageTiming& timing, ReportFormat fmt, const std::filesystem::path& path);

/// Parse a CSV previously produced by emit_report.
std::pair<std::vector<PageReport>, std::optional<MetricsReport>> read_report_csv(
    const std::filesystem::path& path);

}  // namespace docbin
