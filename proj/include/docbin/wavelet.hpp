#pragma once

#include <string>

#include "docbin/image.hpp"

namespace docbin {

/// One level of the orthonormal 2-D Haar transform. For every source 2x2
/// block (a b; c d):
///   ll = (a+b+c+d)/2   lh = (a-b+c-d)/2
///   hl = (a+b-c-d)/2   hh = (a-b-c+d)/2
/// Energy is preserved and the quadruple inverts exactly.
struct WaveletSubbands {
    FloatImage ll, lh, hl, hh;
    // Pre-padding dims; odd inputs are reflect-padded by one row/column.
    int source_width = 0;
    int source_height = 0;
    bool padded() const { return source_width != 2 * ll.width || source_height != 2 * ll.height; }
};

enum class NormalizationStrategy { minmax, half_scale, zscore_rescale };

struct NormalizationSpec {
    NormalizationStrategy strategy = NormalizationStrategy::minmax;
    double out_lo = 0.0;
    double out_hi = 255.0;
};

NormalizationStrategy parse_normalization(const std::string& name);
std::string normalization_name(NormalizationStrategy s);

WaveletSubbands hwt_forward(const FloatImage& img);
FloatImage hwt_inverse(const WaveletSubbands& sb);

/// minmax: affine [min,max] -> [out_lo,out_hi]; half-scale: values/2;
/// zscore-rescale: (v-mu)/sigma clipped to +-3 then mapped to [out_lo,out_hi].
/// Constant bands map to the output midpoint (minmax/zscore).
FloatImage normalize_subband(const FloatImage& band, const NormalizationSpec& spec);

/// The MFE step: normalized LL sub-band at half resolution.
FloatImage mfe_extract(const FloatImage& patch, const NormalizationSpec& spec);

/// Inverse HWT with zeroed detail bands: doubles both dimensions,
/// every LL value v becomes a 2x2 block of v/2.
FloatImage ll_upsample(const FloatImage& enhanced_ll);

}  // namespace docbin
