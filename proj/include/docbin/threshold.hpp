#pragma once

#include <string>

#include "docbin/image.hpp"

namespace docbin {

enum class ThresholdMethod { otsu, niblack, sauvola };

struct ThresholdParams {
    ThresholdMethod method = ThresholdMethod::sauvola;
    int window = 25;   // odd, >= 3
    double k = 0.5;    // niblack default -0.2
    double R = 128.0;  // sauvola dynamic range

    static ThresholdParams otsu() { return {ThresholdMethod::otsu, 25, 0.0, 128.0}; }
    static ThresholdParams niblack(int window = 25, double k = -0.2) {
        return {ThresholdMethod::niblack, window, k, 128.0};
    }
    static ThresholdParams sauvola(int window = 25, double k = 0.5, double R = 128.0) {
        return {ThresholdMethod::sauvola, window, k, R};
    }
};

ThresholdMethod parse_threshold_method(const std::string& name);
std::string threshold_method_name(ThresholdMethod m);

/// Otsu's threshold over the clamped+rounded 256-bin histogram. Ties resolve
/// to the smallest t. Constant images return max(value-1, 0), which leaves
/// every pixel above the threshold.
int otsu_threshold(const FloatImage& img);

/// Global Otsu mask: text where the quantized pixel is <= the threshold.
/// Constant images yield an all-background mask.
BinaryMask binarize_global(const FloatImage& img);

/// Niblack T = m + k*s, Sauvola T = m*(1 + k*(s/R - 1)); windowed mean m and
/// stddev s over a reflect-padded window, via integral images. Text where
/// pixel <= T.
BinaryMask binarize_local(const FloatImage& img, const ThresholdParams& params);

/// Dispatch on params.method.
BinaryMask binarize(const FloatImage& img, const ThresholdParams& params);

/// Stage-3 fusion: text where both masks are text.
BinaryMask fuse_and(const BinaryMask& local, const BinaryMask& global);

}  // namespace docbin
