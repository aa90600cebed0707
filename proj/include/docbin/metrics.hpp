#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "docbin/image.hpp"

namespace docbin {

/// Pixel tally with text as the positive class.
struct ConfusionCounts {
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct MetricsConfig {
    double psnr_peak = 1.0;  // C for {0,1}-valued masks
    int drd_window = 5;
    int drd_block = 8;
};

/// One evaluated (output, ground-truth) pair. PSNR is +infinity when the
/// masks are identical; DRD and ASM are absent when the ground truth has no
/// mixed block (uniform_gt).
struct MetricsReport {
    double fm = 0.0;
    double pfm = 0.0;
    double psnr = 0.0;
    bool psnr_infinite = false;
    std::optional<double> drd;
    std::optional<double> asm_score;
    bool uniform_gt = false;
};

ConfusionCounts confusion_counts(const BinaryMask& pred, const BinaryMask& gt);

/// FM = 100 * 2PR/(P+R). Zero when tp = 0; EmptyGroundTruth when tp+fn = 0.
double f_measure(const ConfusionCounts& c);

/// Zhang-Suen thinning to a 1-pixel-wide 8-connected skeleton.
BinaryMask skeletonize(const BinaryMask& gt);

/// Skeleton-based pseudo-recall with plain precision:
/// p-FM = 100 * 2*pR*P/(pR+P), pR = |pred intersect Skel(gt)| / |Skel(gt)|.
double pseudo_f_measure(const BinaryMask& pred, const BinaryMask& gt);

/// PSNR = 10*log10(C^2/MSE) on {0,1}-valued masks. Throws InfinitePsnr when
/// pred equals gt.
double psnr(const BinaryMask& pred, const BinaryMask& gt, const MetricsConfig& cfg = {});

/// Number of non-overlapping block x block GT regions containing both text
/// and background; partial edge blocks are included.
std::int64_t nubn_count(const BinaryMask& gt, int block = 8);

/// Distance reciprocal distortion: per flipped pixel, the normalized
/// inverse-distance-weighted disagreement over the 5x5 GT neighborhood
/// (reflect-padded), summed and divided by NUBN.
double drd(const BinaryMask& pred, const BinaryMask& gt, const MetricsConfig& cfg = {});

/// ASM = (FM + p-FM + PSNR + (100 - DRD)) / 4.
double average_score(double fm, double pfm, double psnr_db, double drd_value);

/// Load both files (pixels < 128 are text), compute all five numbers.
MetricsReport evaluate_pair(const std::filesystem::path& pred_path,
                            const std::filesystem::path& gt_path,
                            const MetricsConfig& cfg = {});

MetricsReport evaluate_masks(const BinaryMask& pred, const BinaryMask& gt,
                             const MetricsConfig& cfg = {});

}  // namespace docbin
