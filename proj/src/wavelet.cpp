#include "docbin/wavelet.hpp"

#include <algorithm>
#include <cmath>

#include "docbin/error.hpp"

namespace docbin {

NormalizationStrategy parse_normalization(const std::string& name) {
    if (name == "minmax") return NormalizationStrategy::minmax;
    if (name == "half" || name == "half-scale") return NormalizationStrategy::half_scale;
    if (name == "zscore" || name == "zscore-rescale") return NormalizationStrategy::zscore_rescale;
    throw ConfigError("unknown normalization strategy: " + name);
}

std::string normalization_name(NormalizationStrategy s) {
    switch (s) {
        case NormalizationStrategy::minmax: return "minmax";
        case NormalizationStrategy::half_scale: return "half";
        case NormalizationStrategy::zscore_rescale: return "zscore";
    }
    return "minmax";
}

WaveletSubbands hwt_forward(const FloatImage& img) {
    if (img.width < 2 || img.height < 2) {
        throw DimensionError("hwt_forward: both dimensions must be >= 2");
    }

    const FloatImage* src = &img;
    FloatImage padded;
    if (img.width % 2 != 0 || img.height % 2 != 0) {
        const int pw = img.width + img.width % 2;
        const int ph = img.height + img.height % 2;
        padded = FloatImage(pw, ph);
        for (int y = 0; y < ph; ++y) {
            const int sy = reflect_index(y, img.height);
            for (int x = 0; x < pw; ++x) {
                padded.at(x, y) = img.at(reflect_index(x, img.width), sy);
            }
        }
        src = &padded;
    }

    const int hw = src->width / 2;
    const int hh = src->height / 2;
    WaveletSubbands sb;
    sb.source_width = img.width;
    sb.source_height = img.height;
    sb.ll = FloatImage(hw, hh);
    sb.lh = FloatImage(hw, hh);
    sb.hl = FloatImage(hw, hh);
    sb.hh = FloatImage(hw, hh);
    for (int y = 0; y < hh; ++y) {
        for (int x = 0; x < hw; ++x) {
            const double a = src->at(2 * x, 2 * y);
            const double b = src->at(2 * x + 1, 2 * y);
            const double c = src->at(2 * x, 2 * y + 1);
            const double d = src->at(2 * x + 1, 2 * y + 1);
            sb.ll.at(x, y) = (a + b + c + d) / 2.0;
            sb.lh.at(x, y) = (a - b + c - d) / 2.0;
            sb.hl.at(x, y) = (a + b - c - d) / 2.0;
            sb.hh.at(x, y) = (a - b - c + d) / 2.0;
        }
    }
    return sb;
}

FloatImage hwt_inverse(const WaveletSubbands& sb) {
    const int hw = sb.ll.width;
    const int hh = sb.ll.height;
    auto same_dims = [&](const FloatImage& b) { return b.width == hw && b.height == hh; };
    if (!same_dims(sb.lh) || !same_dims(sb.hl) || !same_dims(sb.hh)) {
        throw DimensionError("hwt_inverse: sub-band dimensions differ");
    }
    const int out_w = sb.source_width > 0 ? sb.source_width : 2 * hw;
    const int out_h = sb.source_height > 0 ? sb.source_height : 2 * hh;
    if (out_w > 2 * hw || out_w < 2 * hw - 1 || out_h > 2 * hh || out_h < 2 * hh - 1) {
        throw DimensionError("hwt_inverse: source dims inconsistent with sub-band dims");
    }

    FloatImage out(out_w, out_h);
    for (int y = 0; y < hh; ++y) {
        for (int x = 0; x < hw; ++x) {
            const double ll = sb.ll.at(x, y);
            const double lh = sb.lh.at(x, y);
            const double hl = sb.hl.at(x, y);
            const double hhv = sb.hh.at(x, y);
            const double a = (ll + lh + hl + hhv) / 2.0;
            const double b = (ll - lh + hl - hhv) / 2.0;
            const double c = (ll + lh - hl - hhv) / 2.0;
            const double d = (ll - lh - hl + hhv) / 2.0;
            const int x0 = 2 * x, y0 = 2 * y;
            out.at(x0, y0) = a;
            if (x0 + 1 < out_w) out.at(x0 + 1, y0) = b;
            if (y0 + 1 < out_h) out.at(x0, y0 + 1) = c;
            if (x0 + 1 < out_w && y0 + 1 < out_h) out.at(x0 + 1, y0 + 1) = d;
        }
    }
    return out;
}

FloatImage normalize_subband(const FloatImage& band, const NormalizationSpec& spec) {
    if (band.empty()) {
        throw DimensionError("normalize_subband: empty band");
    }
    if (spec.out_lo >= spec.out_hi) {
        throw ConfigError("normalize_subband: out_lo must be < out_hi");
    }
    FloatImage out(band.width, band.height);
    const double mid = (spec.out_lo + spec.out_hi) / 2.0;

    switch (spec.strategy) {
        case NormalizationStrategy::half_scale: {
            for (std::size_t i = 0; i < band.size(); ++i) out.values[i] = band.values[i] / 2.0;
            break;
        }
        case NormalizationStrategy::minmax: {
            const auto [lo_it, hi_it] = std::minmax_element(band.values.begin(), band.values.end());
            const double lo = *lo_it, hi = *hi_it;
            if (lo == hi) {
                std::fill(out.values.begin(), out.values.end(), mid);
            } else {
                const double scale = (spec.out_hi - spec.out_lo) / (hi - lo);
                for (std::size_t i = 0; i < band.size(); ++i) {
                    out.values[i] = spec.out_lo + (band.values[i] - lo) * scale;
                }
            }
            break;
        }
        case NormalizationStrategy::zscore_rescale: {
            double mean = 0.0;
            for (double v : band.values) mean += v;
            mean /= static_cast<double>(band.size());
            double var = 0.0;
            for (double v : band.values) var += (v - mean) * (v - mean);
            var /= static_cast<double>(band.size());
            const double sigma = std::sqrt(var);
            if (sigma == 0.0) {
                std::fill(out.values.begin(), out.values.end(), mid);
            } else {
                for (std::size_t i = 0; i < band.size(); ++i) {
                    const double z = std::clamp((band.values[i] - mean) / sigma, -3.0, 3.0);
                    out.values[i] = spec.out_lo + (z + 3.0) / 6.0 * (spec.out_hi - spec.out_lo);
                }
            }
            break;
        }
    }
    return out;
}

FloatImage mfe_extract(const FloatImage& patch, const NormalizationSpec& spec) {
    return normalize_subband(hwt_forward(patch).ll, spec);
}

FloatImage ll_upsample(const FloatImage& enhanced_ll) {
    FloatImage out(enhanced_ll.width * 2, enhanced_ll.height * 2);
    for (int y = 0; y < enhanced_ll.height; ++y) {
        for (int x = 0; x < enhanced_ll.width; ++x) {
            const double v = enhanced_ll.at(x, y) / 2.0;
            out.at(2 * x, 2 * y) = v;
            out.at(2 * x + 1, 2 * y) = v;
            out.at(2 * x, 2 * y + 1) = v;
            out.at(2 * x + 1, 2 * y + 1) = v;
        }
    }
    return out;
}

}  // namespace docbin
