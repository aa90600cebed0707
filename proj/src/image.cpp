#include "docbin/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "docbin/error.hpp"

namespace docbin {

int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

FloatImage to_grayscale(const RasterImage& img) {
    if (img.channels != 1 && img.channels != 3) {
        throw FormatError("to_grayscale: expected 1 or 3 channels, got " + std::to_string(img.channels));
    }
    FloatImage out(img.width, img.height);
    if (img.channels == 1) {
        for (std::size_t i = 0; i < img.pixels.size(); ++i) out.values[i] = img.pixels[i];
        return out;
    }
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            out.at(x, y) = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
        }
    }
    return out;
}

FloatImage extract_plane(const RasterImage& img, int channel) {
    FloatImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            out.at(x, y) = img.at(x, y, channel);
        }
    }
    return out;
}

ChannelSet split_channels(const RasterImage& img) {
    ChannelSet set;
    if (img.channels == 1) {
        set.gray = to_grayscale(img);
        set.red = set.gray;
        set.green = set.gray;
        set.blue = set.gray;
        return set;
    }
    set.red = extract_plane(img, 0);
    set.green = extract_plane(img, 1);
    set.blue = extract_plane(img, 2);
    set.gray = to_grayscale(img);
    return set;
}

namespace {

FloatImage reflect_pad(const FloatImage& img, int pad_right, int pad_bottom) {
    FloatImage out(img.width + pad_right, img.height + pad_bottom);
    for (int y = 0; y < out.height; ++y) {
        const int sy = reflect_index(y, img.height);
        for (int x = 0; x < out.width; ++x) {
            out.at(x, y) = img.at(reflect_index(x, img.width), sy);
        }
    }
    return out;
}

}  // namespace

PatchGrid tile_patches(const FloatImage& img, int patch_size) {
    if (patch_size < 2 || patch_size % 2 != 0) {
        throw ConfigError("tile_patches: patch size must be even and >= 2");
    }
    if (img.width < 2 || img.height < 2) {
        throw DimensionError("tile_patches: image must be at least 2x2");
    }
    PatchGrid grid;
    grid.patch_size = patch_size;
    grid.cols = (img.width + patch_size - 1) / patch_size;
    grid.rows = (img.height + patch_size - 1) / patch_size;
    grid.pad_right = grid.cols * patch_size - img.width;
    grid.pad_bottom = grid.rows * patch_size - img.height;

    const FloatImage padded = reflect_pad(img, grid.pad_right, grid.pad_bottom);
    grid.patches.reserve(static_cast<std::size_t>(grid.rows) * grid.cols);
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            FloatImage patch(patch_size, patch_size);
            for (int y = 0; y < patch_size; ++y) {
                for (int x = 0; x < patch_size; ++x) {
                    patch.at(x, y) = padded.at(c * patch_size + x, r * patch_size + y);
                }
            }
            grid.patches.push_back(std::move(patch));
        }
    }
    return grid;
}

FloatImage stitch_patches(const PatchGrid& grid) {
    if (grid.patches.size() != static_cast<std::size_t>(grid.rows) * grid.cols) {
        throw DimensionError("stitch_patches: patch count does not match grid shape");
    }
    for (const auto& p : grid.patches) {
        if (p.width != grid.patch_size || p.height != grid.patch_size) {
            throw DimensionError("stitch_patches: patch dimensions do not match patch size");
        }
    }
    const int out_w = grid.source_width();
    const int out_h = grid.source_height();
    if (out_w < 1 || out_h < 1) {
        throw DimensionError("stitch_patches: padding exceeds grid extent");
    }
    FloatImage out(out_w, out_h);
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            const FloatImage& patch = grid.patch(r, c);
            const int x0 = c * grid.patch_size;
            const int y0 = r * grid.patch_size;
            const int xmax = std::min(grid.patch_size, out_w - x0);
            const int ymax = std::min(grid.patch_size, out_h - y0);
            for (int y = 0; y < ymax; ++y) {
                for (int x = 0; x < xmax; ++x) {
                    out.at(x0 + x, y0 + y) = patch.at(x, y);
                }
            }
        }
    }
    return out;
}

namespace {

template <typename Img, typename Get, typename Set>
void rotate_into(const Img& src, Img& dst, int quarter_turns, Get get, Set set) {
    // counter-clockwise quarter turns
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            int nx = x, ny = y;
            switch (quarter_turns) {
                case 1: nx = y; ny = src.width - 1 - x; break;
                case 2: nx = src.width - 1 - x; ny = src.height - 1 - y; break;
                case 3: nx = src.height - 1 - y; ny = x; break;
                default: break;
            }
            set(dst, nx, ny, get(src, x, y));
        }
    }
}

}  // namespace

FloatImage rotate90(const FloatImage& img, int quarter_turns) {
    quarter_turns = ((quarter_turns % 4) + 4) % 4;
    const bool swap = quarter_turns % 2 == 1;
    FloatImage out(swap ? img.height : img.width, swap ? img.width : img.height);
    rotate_into(img, out, quarter_turns,
                [](const FloatImage& s, int x, int y) { return s.at(x, y); },
                [](FloatImage& d, int x, int y, double v) { d.at(x, y) = v; });
    return out;
}

BinaryMask rotate90(const BinaryMask& mask, int quarter_turns) {
    quarter_turns = ((quarter_turns % 4) + 4) % 4;
    const bool swap = quarter_turns % 2 == 1;
    BinaryMask out(swap ? mask.height : mask.width, swap ? mask.width : mask.height);
    rotate_into(mask, out, quarter_turns,
                [](const BinaryMask& s, int x, int y) { return s.at(x, y); },
                [](BinaryMask& d, int x, int y, bool v) { d.set(x, y, v); });
    return out;
}

FloatImage flip_horizontal(const FloatImage& img) {
    FloatImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) out.at(img.width - 1 - x, y) = img.at(x, y);
    return out;
}

FloatImage flip_vertical(const FloatImage& img) {
    FloatImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) out.at(x, img.height - 1 - y) = img.at(x, y);
    return out;
}

BinaryMask flip_horizontal(const BinaryMask& mask) {
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) out.set(mask.width - 1 - x, y, mask.at(x, y));
    return out;
}

BinaryMask flip_vertical(const BinaryMask& mask) {
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) out.set(x, mask.height - 1 - y, mask.at(x, y));
    return out;
}

RasterImage quantize_u8(const FloatImage& img) {
    RasterImage out;
    out.width = img.width;
    out.height = img.height;
    out.channels = 1;
    out.pixels.resize(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = img.values[i];
        out.pixels[i] = std::isfinite(v)
                            ? static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)))
                            : (v > 0.0 ? 255 : 0);
    }
    return out;
}

FloatImage mask_to_image(const BinaryMask& mask, double text_value, double background_value) {
    FloatImage out(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        out.values[i] = mask.bits[i] ? text_value : background_value;
    }
    return out;
}

BinaryMask image_to_mask(const FloatImage& img, double text_below) {
    BinaryMask out(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i) {
        out.bits[i] = img.values[i] < text_below ? 1 : 0;
    }
    return out;
}

}  // namespace docbin
