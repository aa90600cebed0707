#pragma once

#include <string>

#include "docbin/image.hpp"

namespace docbin {

enum class ResizeKind { nearest, bilinear, bicubic, area, lanczos };

/// Kernel conventions: half-pixel center mapping src = (dst+0.5)*scale - 0.5,
/// Keys bicubic with a = -0.75, 4-lobe Lanczos with normalized taps, area as
/// the box average of the covered source region. Borders replicate.
struct ResizeMethod {
    ResizeKind kind = ResizeKind::bilinear;
    double bicubic_a = -0.75;
    int lanczos_taps = 4;
};

ResizeKind parse_resize_kind(const std::string& name);
std::string resize_kind_name(ResizeKind kind);

/// Bicubic/Lanczos may overshoot the input range; output is not clamped.
FloatImage resize(const FloatImage& img, const ResizeMethod& method, int out_w, int out_h);

/// Nearest-neighbor on booleans; identity when dims are unchanged.
BinaryMask resize_mask(const BinaryMask& mask, int out_w, int out_h);

}  // namespace docbin
