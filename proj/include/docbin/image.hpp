#pragma once

#include <cstdint>
#include <vector>

namespace docbin {

/// 8-bit image as decoded from disk. Interleaved RGB when channels == 3.
struct RasterImage {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;  // row-major

    std::uint8_t at(int x, int y, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t& at(int x, int y, int c = 0) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

/// Single-channel real-valued image; the working type of every numeric stage.
struct FloatImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // row-major

    FloatImage() = default;
    FloatImage(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
};

/// Boolean text/background map; 1 = text (foreground).
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // row-major, 0/1

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

    bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    std::size_t size() const { return bits.size(); }

    std::size_t count_text() const {
        std::size_t n = 0;
        for (auto b : bits) n += b;
        return n;
    }
};

/// The four single-channel planes a color page is split into.
struct ChannelSet {
    FloatImage red, green, blue, gray;
};

/// Non-overlapping tiling of an image, reflect-padded on the right/bottom.
struct PatchGrid {
    int patch_size = 0;
    int rows = 0;
    int cols = 0;
    int pad_right = 0;
    int pad_bottom = 0;
    std::vector<FloatImage> patches;  // row-major

    int source_width() const { return cols * patch_size - pad_right; }
    int source_height() const { return rows * patch_size - pad_bottom; }
    const FloatImage& patch(int row, int col) const { return patches[static_cast<std::size_t>(row) * cols + col]; }
};

/// Mirror index into [0, n): abc|cba style without repeating the edge sample.
int reflect_index(int i, int n);

/// BT.601 luma; single-channel inputs are copied unchanged.
FloatImage to_grayscale(const RasterImage& img);

/// One FloatImage per raw plane plus the BT.601 gray plane.
/// Grayscale inputs yield four identical planes.
ChannelSet split_channels(const RasterImage& img);

FloatImage extract_plane(const RasterImage& img, int channel);

/// Cut into patch_size x patch_size tiles, reflect-padding right/bottom.
/// patch_size must be even and >= 2; images smaller than 2x2 are rejected.
PatchGrid tile_patches(const FloatImage& img, int patch_size);

/// Exact inverse of tile_patches: place tiles, crop the padding.
FloatImage stitch_patches(const PatchGrid& grid);

// 90-degree-step geometry helpers used by the augmentation recipes.
FloatImage rotate90(const FloatImage& img, int quarter_turns);
BinaryMask rotate90(const BinaryMask& mask, int quarter_turns);
FloatImage flip_horizontal(const FloatImage& img);
FloatImage flip_vertical(const FloatImage& img);
BinaryMask flip_horizontal(const BinaryMask& mask);
BinaryMask flip_vertical(const BinaryMask& mask);

/// Round and clamp to [0,255], yielding a single-channel 8-bit image.
RasterImage quantize_u8(const FloatImage& img);

FloatImage mask_to_image(const BinaryMask& mask, double text_value = 0.0, double background_value = 255.0);
BinaryMask image_to_mask(const FloatImage& img, double text_below = 128.0);

}  // namespace docbin
