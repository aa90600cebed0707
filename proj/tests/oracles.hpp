// Independent reference implementations used only by tests. Each oracle
// recomputes its result directly from the documented conventions, without
// touching the library's code paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "docbin/image.hpp"
#include "docbin/resample.hpp"
#include "docbin/threshold.hpp"

namespace oracles {

using docbin::BinaryMask;
using docbin::FloatImage;

inline int mirror(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

// ---- random images ----

inline FloatImage random_image(std::mt19937_64& rng, int w, int h, double lo = 0.0, double hi = 255.0,
                               bool integer_valued = true) {
    FloatImage img(w, h);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (auto& v : img.values) {
        v = dist(rng);
        if (integer_valued) v = std::round(v);
    }
    return img;
}

inline BinaryMask random_mask(std::mt19937_64& rng, int w, int h, double text_prob = 0.3) {
    BinaryMask mask(w, h);
    std::bernoulli_distribution dist(text_prob);
    for (auto& b : mask.bits) b = dist(rng) ? 1 : 0;
    return mask;
}

// ---- Otsu: exhaustive between-class-variance search over all 256 thresholds ----

inline int exhaustive_otsu(const FloatImage& img) {
    std::vector<std::int64_t> hist(256, 0);
    for (double v : img.values) {
        ++hist[static_cast<int>(std::lround(std::clamp(v, 0.0, 255.0)))];
    }
    const double total = static_cast<double>(img.size());
    int best_t = 0;
    double best = -1.0;
    for (int t = 0; t < 256; ++t) {
        double w0 = 0, w1 = 0, sum0 = 0, sum1 = 0;
        for (int i = 0; i <= t; ++i) {
            w0 += hist[i];
            sum0 += static_cast<double>(i) * hist[i];
        }
        for (int i = t + 1; i < 256; ++i) {
            w1 += hist[i];
            sum1 += static_cast<double>(i) * hist[i];
        }
        double sigma = 0.0;
        if (w0 > 0 && w1 > 0) {
            const double mu0 = sum0 / w0;
            const double mu1 = sum1 / w1;
            sigma = (w0 / total) * (w1 / total) * (mu0 - mu1) * (mu0 - mu1);
        }
        if (sigma > best) {
            best = sigma;
            best_t = t;
        }
    }
    return best_t;
}

// ---- local thresholds: direct O(n * w^2) sliding window ----

inline BinaryMask naive_local_threshold(const FloatImage& img, const docbin::ThresholdParams& p) {
    const int half = p.window / 2;
    BinaryMask mask(img.width, img.height);
    const double n = static_cast<double>(p.window) * p.window;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double sum = 0.0, sum_sq = 0.0;
            for (int dy = -half; dy <= half; ++dy) {
                const int sy = mirror(y + dy, img.height);
                for (int dx = -half; dx <= half; ++dx) {
                    const double v = img.at(mirror(x + dx, img.width), sy);
                    sum += v;
                    sum_sq += v * v;
                }
            }
            const double mean = sum / n;
            const double variance = std::max(0.0, (sum_sq - sum * mean) / n);
            const double stddev = std::sqrt(variance);
            const double threshold = p.method == docbin::ThresholdMethod::niblack
                                         ? mean + p.k * stddev
                                         : mean * (1.0 + p.k * (stddev / p.R - 1.0));
            mask.set(x, y, img.at(x, y) <= threshold);
        }
    }
    return mask;
}

// ---- resize: direct per-pixel 2-D kernel summation ----

namespace detail {

inline double cubic(double x, double a) {
    x = std::abs(x);
    if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
}

inline double lanczos(double x, int a) {
    if (std::abs(x) >= a) return 0.0;
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    const double pxa = px / a;
    return (std::sin(px) / px) * (std::sin(pxa) / pxa);
}

struct AxisWeights {
    int first = 0;
    std::vector<double> w;
};

inline AxisWeights axis_weights(int d, int src_n, int dst_n, const docbin::ResizeMethod& m) {
    const double scale = static_cast<double>(src_n) / dst_n;
    const double src = (d + 0.5) * scale - 0.5;
    AxisWeights out;
    switch (m.kind) {
        case docbin::ResizeKind::nearest:
            out.first = static_cast<int>(std::floor(src + 0.5));
            out.w = {1.0};
            break;
        case docbin::ResizeKind::bilinear: {
            const int i0 = static_cast<int>(std::floor(src));
            out.first = i0;
            out.w = {1.0 - (src - i0), src - i0};
            break;
        }
        case docbin::ResizeKind::bicubic: {
            const int i0 = static_cast<int>(std::floor(src));
            const double f = src - i0;
            out.first = i0 - 1;
            out.w = {cubic(f + 1.0, m.bicubic_a), cubic(f, m.bicubic_a), cubic(1.0 - f, m.bicubic_a),
                     cubic(2.0 - f, m.bicubic_a)};
            break;
        }
        case docbin::ResizeKind::lanczos: {
            const int a = m.lanczos_taps;
            const int i0 = static_cast<int>(std::floor(src));
            out.first = i0 - a + 1;
            out.w.resize(2 * a);
            double sum = 0.0;
            for (int i = 0; i < 2 * a; ++i) {
                out.w[i] = lanczos(src - (out.first + i), a);
                sum += out.w[i];
            }
            for (double& v : out.w) v /= sum;
            break;
        }
        case docbin::ResizeKind::area: {
            const double x0 = d * scale;
            const double x1 = (d + 1) * scale;
            const int i0 = std::clamp(static_cast<int>(std::floor(x0)), 0, src_n - 1);
            const int i1 = std::clamp(static_cast<int>(std::ceil(x1)) - 1, i0, src_n - 1);
            out.first = i0;
            out.w.resize(i1 - i0 + 1);
            for (int i = i0; i <= i1; ++i) {
                out.w[i - i0] =
                    std::max(std::min<double>(x1, i + 1) - std::max<double>(x0, i), 0.0) / (x1 - x0);
            }
            break;
        }
    }
    return out;
}

}  // namespace detail

inline FloatImage naive_resize(const FloatImage& src, const docbin::ResizeMethod& m, int out_w, int out_h) {
    FloatImage out(out_w, out_h);
    for (int y = 0; y < out_h; ++y) {
        const auto wy = detail::axis_weights(y, src.height, out_h, m);
        for (int x = 0; x < out_w; ++x) {
            const auto wx = detail::axis_weights(x, src.width, out_w, m);
            double acc = 0.0;
            for (std::size_t j = 0; j < wy.w.size(); ++j) {
                const int sy = std::clamp(wy.first + static_cast<int>(j), 0, src.height - 1);
                for (std::size_t i = 0; i < wx.w.size(); ++i) {
                    const int sx = std::clamp(wx.first + static_cast<int>(i), 0, src.width - 1);
                    acc += wy.w[j] * wx.w[i] * src.at(sx, sy);
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

// ---- DRD: literal weight matrix and per-flip accumulation ----

inline double brute_force_drd(const BinaryMask& pred, const BinaryMask& gt) {
    double wm[5][5];
    double wsum = 0.0;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            const int di = i - 2, dj = j - 2;
            wm[i][j] = (di == 0 && dj == 0) ? 0.0 : 1.0 / std::sqrt(static_cast<double>(di * di + dj * dj));
            wsum += wm[i][j];
        }
    }
    std::int64_t nubn = 0;
    for (int by = 0; by < gt.height; by += 8) {
        for (int bx = 0; bx < gt.width; bx += 8) {
            int text = 0, bg = 0;
            for (int y = by; y < std::min(by + 8, gt.height); ++y) {
                for (int x = bx; x < std::min(bx + 8, gt.width); ++x) {
                    if (gt.at(x, y)) ++text;
                    else ++bg;
                }
            }
            if (text > 0 && bg > 0) ++nubn;
        }
    }
    double total = 0.0;
    for (int y = 0; y < gt.height; ++y) {
        for (int x = 0; x < gt.width; ++x) {
            if (pred.at(x, y) == gt.at(x, y)) continue;
            const double pv = pred.at(x, y) ? 1.0 : 0.0;
            for (int i = 0; i < 5; ++i) {
                for (int j = 0; j < 5; ++j) {
                    const int sy = mirror(y + i - 2, gt.height);
                    const int sx = mirror(x + j - 2, gt.width);
                    total += (wm[i][j] / wsum) * std::abs((gt.at(sx, sy) ? 1.0 : 0.0) - pv);
                }
            }
        }
    }
    return total / static_cast<double>(nubn);
}

// ---- connected components (8-connectivity) ----

inline int count_components(const BinaryMask& mask) {
    std::vector<std::uint8_t> seen(mask.size(), 0);
    std::vector<std::pair<int, int>> stack;
    int components = 0;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y) || seen[static_cast<std::size_t>(y) * mask.width + x]) continue;
            ++components;
            stack.push_back({x, y});
            seen[static_cast<std::size_t>(y) * mask.width + x] = 1;
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
                        const std::size_t idx = static_cast<std::size_t>(ny) * mask.width + nx;
                        if (mask.bits[idx] && !seen[idx]) {
                            seen[idx] = 1;
                            stack.push_back({nx, ny});
                        }
                    }
                }
            }
        }
    }
    return components;
}

// ---- synthetic degraded document pages ----

struct SyntheticPage {
    FloatImage image;  // 8-bit-valued grayscale page
    BinaryMask gt;     // rendered stroke mask
};

// Faded strokes on a bright gradient background with Gaussian noise. Stroke
// and background means both sit above 128, so one level of un-normalized LL
// doubling saturates nearly the whole page at 255.
inline SyntheticPage make_degraded_page(std::uint64_t seed, int w = 256, int h = 256,
                                        double noise_sigma = 20.0) {
    std::mt19937_64 rng(seed);
    SyntheticPage page;
    page.image = FloatImage(w, h);
    page.gt = BinaryMask(w, h);

    std::uniform_int_distribution<int> xd(0, w - 1), yd(0, h - 1);
    std::uniform_int_distribution<int> len(w / 8, w / 2), thick(2, 4);
    for (int stroke = 0; stroke < 48; ++stroke) {
        const int x0 = xd(rng), y0 = yd(rng), l = len(rng), t = thick(rng);
        const bool horizontal = stroke % 3 != 2;
        for (int d = 0; d < l; ++d) {
            for (int s = 0; s < t; ++s) {
                const int x = horizontal ? x0 + d : x0 + s;
                const int y = horizontal ? y0 + s : y0 + d;
                if (x >= 0 && x < w && y >= 0 && y < h) page.gt.set(x, y, true);
            }
        }
    }

    std::normal_distribution<double> noise(0.0, noise_sigma);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double background = 215.0 + 20.0 * x / std::max(1, w - 1);
            const double base = page.gt.at(x, y) ? 135.0 : background;
            page.image.at(x, y) = std::clamp(std::round(base + noise(rng)), 0.0, 255.0);
        }
    }
    return page;
}

// Noise-free bimodal page whose features are full-width bars aligned to even
// rows: every downscaler separates it perfectly.
inline SyntheticPage make_separable_page(int w = 64, int h = 64) {
    SyntheticPage page;
    page.image = FloatImage(w, h, 255.0);
    page.gt = BinaryMask(w, h);
    for (int y = 16; y < 24; ++y) {
        for (int x = 0; x < w; ++x) {
            page.gt.set(x, y, true);
            page.image.at(x, y) = 0.0;
        }
    }
    for (int y = 40; y < 48; ++y) {
        for (int x = 0; x < w; ++x) {
            page.gt.set(x, y, true);
            page.image.at(x, y) = 0.0;
        }
    }
    return page;
}

}  // namespace oracles
