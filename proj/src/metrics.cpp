#include "docbin/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "docbin/error.hpp"
#include "docbin/image_io.hpp"

namespace docbin {

ConfusionCounts confusion_counts(const BinaryMask& pred, const BinaryMask& gt) {
    if (pred.width != gt.width || pred.height != gt.height) {
        throw DimensionError("confusion_counts: mask dimensions differ");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred.bits[i] != 0;
        const bool g = gt.bits[i] != 0;
        if (p && g) ++c.tp;
        else if (p && !g) ++c.fp;
        else if (!p && g) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double f_measure(const ConfusionCounts& c) {
    if (c.tp + c.fn == 0) {
        throw EmptyGroundTruth("f_measure: ground truth contains no text");
    }
    if (c.tp == 0) return 0.0;
    const double precision = static_cast<double>(c.tp) / (c.tp + c.fp);
    const double recall = static_cast<double>(c.tp) / (c.tp + c.fn);
    return 100.0 * 2.0 * precision * recall / (precision + recall);
}

namespace {

// Zhang-Suen neighborhood: p2..p9 clockwise from north.
constexpr int kNeighborDx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kNeighborDy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

}  // namespace

BinaryMask skeletonize(const BinaryMask& gt) {
    BinaryMask img = gt;
    const int w = img.width, h = img.height;
    auto value = [&](int x, int y) -> int {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0;
        return img.at(x, y) ? 1 : 0;
    };

    std::vector<std::pair<int, int>> to_delete;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            to_delete.clear();
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    if (!img.at(x, y)) continue;
                    int p[8];
                    int neighbors = 0;
                    for (int i = 0; i < 8; ++i) {
                        p[i] = value(x + kNeighborDx[i], y + kNeighborDy[i]);
                        neighbors += p[i];
                    }
                    if (neighbors < 2 || neighbors > 6) continue;
                    int transitions = 0;
                    for (int i = 0; i < 8; ++i) {
                        if (p[i] == 0 && p[(i + 1) % 8] == 1) ++transitions;
                    }
                    if (transitions != 1) continue;
                    // p[0]=N, p[2]=E, p[4]=S, p[6]=W
                    if (pass == 0) {
                        if (p[0] * p[2] * p[4] != 0) continue;
                        if (p[2] * p[4] * p[6] != 0) continue;
                    } else {
                        if (p[0] * p[2] * p[6] != 0) continue;
                        if (p[0] * p[4] * p[6] != 0) continue;
                    }
                    to_delete.emplace_back(x, y);
                }
            }
            for (auto [x, y] : to_delete) img.set(x, y, false);
            if (!to_delete.empty()) changed = true;
        }
    }
    return img;
}

double pseudo_f_measure(const BinaryMask& pred, const BinaryMask& gt) {
    if (pred.width != gt.width || pred.height != gt.height) {
        throw DimensionError("pseudo_f_measure: mask dimensions differ");
    }
    if (gt.count_text() == 0) {
        throw EmptyGroundTruth("pseudo_f_measure: ground truth contains no text");
    }
    const BinaryMask skel = skeletonize(gt);
    std::int64_t skel_total = 0, skel_hit = 0;
    for (std::size_t i = 0; i < skel.size(); ++i) {
        if (skel.bits[i]) {
            ++skel_total;
            if (pred.bits[i]) ++skel_hit;
        }
    }
    const ConfusionCounts c = confusion_counts(pred, gt);
    const double precision = (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    const double pseudo_recall = static_cast<double>(skel_hit) / skel_total;
    if (precision + pseudo_recall == 0.0) return 0.0;
    return 100.0 * 2.0 * pseudo_recall * precision / (pseudo_recall + precision);
}

double psnr(const BinaryMask& pred, const BinaryMask& gt, const MetricsConfig& cfg) {
    if (pred.width != gt.width || pred.height != gt.height) {
        throw DimensionError("psnr: mask dimensions differ");
    }
    if (cfg.psnr_peak <= 0.0) {
        throw ConfigError("psnr: peak must be positive");
    }
    std::int64_t diff = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if ((pred.bits[i] != 0) != (gt.bits[i] != 0)) ++diff;
    }
    if (diff == 0) {
        throw InfinitePsnr("psnr: masks are identical");
    }
    const double mse = static_cast<double>(diff) / static_cast<double>(pred.size());
    return 10.0 * std::log10(cfg.psnr_peak * cfg.psnr_peak / mse);
}

std::int64_t nubn_count(const BinaryMask& gt, int block) {
    if (block < 2) {
        throw ConfigError("nubn_count: block size must be >= 2");
    }
    std::int64_t count = 0;
    for (int by = 0; by < gt.height; by += block) {
        for (int bx = 0; bx < gt.width; bx += block) {
            bool any_text = false, any_bg = false;
            const int ymax = std::min(by + block, gt.height);
            const int xmax = std::min(bx + block, gt.width);
            for (int y = by; y < ymax && !(any_text && any_bg); ++y) {
                for (int x = bx; x < xmax; ++x) {
                    (gt.at(x, y) ? any_text : any_bg) = true;
                }
            }
            if (any_text && any_bg) ++count;
        }
    }
    return count;
}

double drd(const BinaryMask& pred, const BinaryMask& gt, const MetricsConfig& cfg) {
    if (pred.width != gt.width || pred.height != gt.height) {
        throw DimensionError("drd: mask dimensions differ");
    }
    if (cfg.drd_window % 2 == 0 || cfg.drd_window < 3) {
        throw ConfigError("drd: window must be odd and >= 3");
    }
    const std::int64_t nubn = nubn_count(gt, cfg.drd_block);
    if (nubn == 0) {
        throw UniformGroundTruth("drd: ground truth has no mixed block");
    }

    const int half = cfg.drd_window / 2;
    const int n = cfg.drd_window;
    std::vector<double> weights(static_cast<std::size_t>(n) * n, 0.0);
    double weight_sum = 0.0;
    for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const double wv = 1.0 / std::sqrt(static_cast<double>(dx * dx + dy * dy));
            weights[static_cast<std::size_t>(dy + half) * n + (dx + half)] = wv;
            weight_sum += wv;
        }
    }
    for (double& wv : weights) wv /= weight_sum;

    double total = 0.0;
    for (int y = 0; y < gt.height; ++y) {
        for (int x = 0; x < gt.width; ++x) {
            const bool p = pred.at(x, y);
            if (p == gt.at(x, y)) continue;
            const double pv = p ? 1.0 : 0.0;
            double flip_cost = 0.0;
            for (int dy = -half; dy <= half; ++dy) {
                const int sy = reflect_index(y + dy, gt.height);
                for (int dx = -half; dx <= half; ++dx) {
                    const int sx = reflect_index(x + dx, gt.width);
                    const double gv = gt.at(sx, sy) ? 1.0 : 0.0;
                    flip_cost += weights[static_cast<std::size_t>(dy + half) * n + (dx + half)] * std::abs(gv - pv);
                }
            }
            total += flip_cost;
        }
    }
    return total / static_cast<double>(nubn);
}

double average_score(double fm, double pfm, double psnr_db, double drd_value) {
    return (fm + pfm + psnr_db + (100.0 - drd_value)) / 4.0;
}

MetricsReport evaluate_masks(const BinaryMask& pred, const BinaryMask& gt, const MetricsConfig& cfg) {
    MetricsReport report;
    const ConfusionCounts c = confusion_counts(pred, gt);
    report.fm = f_measure(c);
    report.pfm = pseudo_f_measure(pred, gt);
    try {
        report.psnr = psnr(pred, gt, cfg);
    } catch (const InfinitePsnr&) {
        report.psnr = std::numeric_limits<double>::infinity();
        report.psnr_infinite = true;
    }
    try {
        report.drd = drd(pred, gt, cfg);
    } catch (const UniformGroundTruth&) {
        report.uniform_gt = true;
    }
    if (report.drd.has_value() && !report.psnr_infinite) {
        report.asm_score = average_score(report.fm, report.pfm, report.psnr, *report.drd);
    }
    return report;
}

MetricsReport evaluate_pair(const std::filesystem::path& pred_path,
                            const std::filesystem::path& gt_path,
                            const MetricsConfig& cfg) {
    const BinaryMask pred = load_mask(pred_path);
    const BinaryMask gt = load_mask(gt_path);
    if (pred.width != gt.width || pred.height != gt.height) {
        throw DimensionError("evaluate_pair: prediction and ground truth dimensions differ");
    }
    return evaluate_masks(pred, gt, cfg);
}

}  // namespace docbin
