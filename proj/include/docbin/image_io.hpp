#pragma once

#include <filesystem>

#include "docbin/image.hpp"

namespace docbin {

/// Decode an 8-bit PNG/BMP/TIFF. Grayscale-with-alpha drops the alpha plane;
/// 16-bit inputs raise FormatError.
RasterImage load_image(const std::filesystem::path& path);

/// Encode as 8-bit PNG (grayscale or RGB).
void save_image(const RasterImage& img, const std::filesystem::path& path);

/// DIBCO mask convention on disk: text = 0, background = 255, 8-bit gray PNG.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

/// Load an on-disk mask; pixels below `text_below` are text.
BinaryMask load_mask(const std::filesystem::path& path, double text_below = 128.0);

}  // namespace docbin
