#include "docbin/threshold.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "docbin/error.hpp"

namespace docbin {

ThresholdMethod parse_threshold_method(const std::string& name) {
    if (name == "otsu") return ThresholdMethod::otsu;
    if (name == "niblack") return ThresholdMethod::niblack;
    if (name == "sauvola") return ThresholdMethod::sauvola;
    throw ConfigError("unknown threshold method: " + name);
}

std::string threshold_method_name(ThresholdMethod m) {
    switch (m) {
        case ThresholdMethod::otsu: return "otsu";
        case ThresholdMethod::niblack: return "niblack";
        case ThresholdMethod::sauvola: return "sauvola";
    }
    return "otsu";
}

namespace {

inline int quantize_value(double v) {
    if (!std::isfinite(v)) return v > 0.0 ? 255 : 0;  // keep the histogram index in range
    return static_cast<int>(std::lround(std::clamp(v, 0.0, 255.0)));
}

std::array<std::int64_t, 256> histogram256(const FloatImage& img) {
    std::array<std::int64_t, 256> hist{};
    for (double v : img.values) ++hist[quantize_value(v)];
    return hist;
}

}  // namespace

int otsu_threshold(const FloatImage& img) {
    if (img.empty()) {
        throw DimensionError("otsu_threshold: empty image");
    }
    const auto hist = histogram256(img);
    const std::int64_t total = static_cast<std::int64_t>(img.size());

    int nonzero_bins = 0, single_bin = 0;
    for (int i = 0; i < 256; ++i) {
        if (hist[i] > 0) {
            ++nonzero_bins;
            single_bin = i;
        }
    }
    if (nonzero_bins == 1) {
        return std::max(single_bin - 1, 0);  // degenerate: constant image
    }

    double weighted_total = 0.0;
    for (int i = 0; i < 256; ++i) weighted_total += static_cast<double>(i) * hist[i];

    int best_t = 0;
    double best_sigma = -1.0;
    std::int64_t w0 = 0;
    double sum0 = 0.0;
    for (int t = 0; t < 256; ++t) {
        w0 += hist[t];
        sum0 += static_cast<double>(t) * hist[t];
        const std::int64_t w1 = total - w0;
        if (w0 == 0 || w1 == 0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (weighted_total - sum0) / w1;
        const double sigma = static_cast<double>(w0) * static_cast<double>(w1) * (mu0 - mu1) * (mu0 - mu1);
        if (sigma > best_sigma) {
            best_sigma = sigma;
            best_t = t;
        }
    }
    return best_t;
}

BinaryMask binarize_global(const FloatImage& img) {
    BinaryMask mask(img.width, img.height);
    const int first = quantize_value(img.values.empty() ? 0.0 : img.values[0]);
    bool constant = true;
    for (double v : img.values) {
        if (quantize_value(v) != first) {
            constant = false;
            break;
        }
    }
    if (constant) {
        return mask;  // all background, including the quantized value 0
    }
    const int t = otsu_threshold(img);
    for (std::size_t i = 0; i < img.size(); ++i) {
        mask.bits[i] = quantize_value(img.values[i]) <= t ? 1 : 0;
    }
    return mask;
}

namespace {

// Integral images over the reflect-padded source; sums stay exact for
// integer-valued inputs, so thresholds match a naive reference bit-for-bit.
struct WindowSums {
    std::vector<double> sum, sum_sq;
    int width = 0, height = 0;

    WindowSums(const FloatImage& img, int pad) {
        width = img.width + 2 * pad;
        height = img.height + 2 * pad;
        sum.assign(static_cast<std::size_t>(width + 1) * (height + 1), 0.0);
        sum_sq.assign(sum.size(), 0.0);
        for (int y = 0; y < height; ++y) {
            const int sy = reflect_index(y - pad, img.height);
            for (int x = 0; x < width; ++x) {
                const double v = img.at(reflect_index(x - pad, img.width), sy);
                const std::size_t i = idx(x + 1, y + 1);
                sum[i] = v + sum[idx(x, y + 1)] + sum[idx(x + 1, y)] - sum[idx(x, y)];
                sum_sq[i] = v * v + sum_sq[idx(x, y + 1)] + sum_sq[idx(x + 1, y)] - sum_sq[idx(x, y)];
            }
        }
    }

    std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * (width + 1) + x; }

    // inclusive box [x0,x1] x [y0,y1] in padded coordinates
    double box(const std::vector<double>& t, int x0, int y0, int x1, int y1) const {
        return t[idx(x1 + 1, y1 + 1)] - t[idx(x0, y1 + 1)] - t[idx(x1 + 1, y0)] + t[idx(x0, y0)];
    }
};

}  // namespace

BinaryMask binarize_local(const FloatImage& img, const ThresholdParams& params) {
    if (params.method == ThresholdMethod::otsu) {
        throw ConfigError("binarize_local: a local method (niblack/sauvola) is required");
    }
    if (params.window < 3 || params.window % 2 == 0) {
        throw ConfigError("binarize_local: window must be odd and >= 3");
    }
    if (img.empty()) {
        throw DimensionError("binarize_local: empty image");
    }

    const int half = params.window / 2;
    const WindowSums sums(img, half);
    const double n = static_cast<double>(params.window) * params.window;

    BinaryMask mask(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            // window [x, x+2*half] in padded coordinates is centered on (x, y)
            const double s1 = sums.box(sums.sum, x, y, x + 2 * half, y + 2 * half);
            const double s2 = sums.box(sums.sum_sq, x, y, x + 2 * half, y + 2 * half);
            const double mean = s1 / n;
            const double variance = std::max(0.0, (s2 - s1 * mean) / n);
            const double stddev = std::sqrt(variance);
            const double threshold = params.method == ThresholdMethod::niblack
                                         ? mean + params.k * stddev
                                         : mean * (1.0 + params.k * (stddev / params.R - 1.0));
            mask.set(x, y, img.at(x, y) <= threshold);
        }
    }
    return mask;
}

BinaryMask binarize(const FloatImage& img, const ThresholdParams& params) {
    if (params.method == ThresholdMethod::otsu) return binarize_global(img);
    return binarize_local(img, params);
}

BinaryMask fuse_and(const BinaryMask& local, const BinaryMask& global) {
    if (local.width != global.width || local.height != global.height) {
        throw DimensionError("fuse_and: mask dimensions differ");
    }
    BinaryMask out(local.width, local.height);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.bits[i] = (local.bits[i] && global.bits[i]) ? 1 : 0;
    }
    return out;
}

}  // namespace docbin
