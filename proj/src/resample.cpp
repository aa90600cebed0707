#include "docbin/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "docbin/error.hpp"

namespace docbin {

ResizeKind parse_resize_kind(const std::string& name) {
    if (name == "nearest") return ResizeKind::nearest;
    if (name == "bilinear") return ResizeKind::bilinear;
    if (name == "bicubic") return ResizeKind::bicubic;
    if (name == "area") return ResizeKind::area;
    if (name == "lanczos") return ResizeKind::lanczos;
    throw ConfigError("unknown resize method: " + name);
}

std::string resize_kind_name(ResizeKind kind) {
    switch (kind) {
        case ResizeKind::nearest: return "nearest";
        case ResizeKind::bilinear: return "bilinear";
        case ResizeKind::bicubic: return "bicubic";
        case ResizeKind::area: return "area";
        case ResizeKind::lanczos: return "lanczos";
    }
    return "bilinear";
}

namespace {

double keys_cubic(double x, double a) {
    x = std::abs(x);
    if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
}

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

double lanczos_kernel(double x, int a) {
    if (std::abs(x) >= a) return 0.0;
    return sinc(x) * sinc(x / a);
}

struct TapSet {
    int first = 0;                 // unclamped index of the first tap
    std::vector<double> weights;   // one weight per tap
};

// Per-axis tap tables; the vertical pass reuses the same construction.
std::vector<TapSet> make_taps(int src_n, int dst_n, const ResizeMethod& m) {
    const double scale = static_cast<double>(src_n) / dst_n;
    std::vector<TapSet> taps(dst_n);
    for (int d = 0; d < dst_n; ++d) {
        const double src = (d + 0.5) * scale - 0.5;
        TapSet& t = taps[d];
        switch (m.kind) {
            case ResizeKind::nearest: {
                t.first = static_cast<int>(std::floor(src + 0.5));
                t.weights = {1.0};
                break;
            }
            case ResizeKind::bilinear: {
                const int i0 = static_cast<int>(std::floor(src));
                const double f = src - i0;
                t.first = i0;
                t.weights = {1.0 - f, f};
                break;
            }
            case ResizeKind::bicubic: {
                const int i0 = static_cast<int>(std::floor(src));
                const double f = src - i0;
                t.first = i0 - 1;
                t.weights = {keys_cubic(1.0 + f, m.bicubic_a), keys_cubic(f, m.bicubic_a),
                             keys_cubic(1.0 - f, m.bicubic_a), keys_cubic(2.0 - f, m.bicubic_a)};
                break;
            }
            case ResizeKind::lanczos: {
                const int a = m.lanczos_taps;
                const int i0 = static_cast<int>(std::floor(src));
                t.first = i0 - a + 1;
                t.weights.resize(static_cast<std::size_t>(2) * a);
                double sum = 0.0;
                for (int i = 0; i < 2 * a; ++i) {
                    t.weights[i] = lanczos_kernel(src - (t.first + i), a);
                    sum += t.weights[i];
                }
                for (double& w : t.weights) w /= sum;
                break;
            }
            case ResizeKind::area: {
                const double x0 = d * scale;
                const double x1 = (d + 1) * scale;
                const int i0 = std::clamp(static_cast<int>(std::floor(x0)), 0, src_n - 1);
                const int i1 = std::clamp(static_cast<int>(std::ceil(x1)) - 1, i0, src_n - 1);
                t.first = i0;
                t.weights.resize(i1 - i0 + 1);
                const double span = x1 - x0;
                for (int i = i0; i <= i1; ++i) {
                    const double overlap = std::min<double>(x1, i + 1) - std::max<double>(x0, i);
                    t.weights[i - i0] = std::max(overlap, 0.0) / span;
                }
                break;
            }
        }
    }
    return taps;
}

}  // namespace

FloatImage resize(const FloatImage& img, const ResizeMethod& method, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) {
        throw DimensionError("resize: target dimensions must be >= 1");
    }
    if (img.width < 1 || img.height < 1) {
        throw DimensionError("resize: empty source image");
    }
    if (method.bicubic_a >= 0.0) {
        throw ConfigError("resize: bicubic_a must be negative");
    }
    if (method.lanczos_taps < 2) {
        throw ConfigError("resize: lanczos_taps must be >= 2");
    }

    const auto htaps = make_taps(img.width, out_w, method);
    const auto vtaps = make_taps(img.height, out_h, method);

    // horizontal pass
    FloatImage mid(out_w, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < out_w; ++x) {
            const TapSet& t = htaps[x];
            double acc = 0.0;
            for (std::size_t i = 0; i < t.weights.size(); ++i) {
                const int sx = std::clamp(t.first + static_cast<int>(i), 0, img.width - 1);
                acc += t.weights[i] * img.at(sx, y);
            }
            mid.at(x, y) = acc;
        }
    }

    // vertical pass
    FloatImage out(out_w, out_h);
    for (int y = 0; y < out_h; ++y) {
        const TapSet& t = vtaps[y];
        for (int x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (std::size_t i = 0; i < t.weights.size(); ++i) {
                const int sy = std::clamp(t.first + static_cast<int>(i), 0, img.height - 1);
                acc += t.weights[i] * mid.at(x, sy);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

BinaryMask resize_mask(const BinaryMask& mask, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) {
        throw DimensionError("resize_mask: target dimensions must be >= 1");
    }
    if (mask.width < 1 || mask.height < 1) {
        throw DimensionError("resize_mask: empty source mask");
    }
    if (out_w == mask.width && out_h == mask.height) {
        return mask;
    }
    BinaryMask out(out_w, out_h);
    const double sx = static_cast<double>(mask.width) / out_w;
    const double sy = static_cast<double>(mask.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        const int src_y = std::clamp(static_cast<int>(std::floor((y + 0.5) * sy)), 0, mask.height - 1);
        for (int x = 0; x < out_w; ++x) {
            const int src_x = std::clamp(static_cast<int>(std::floor((x + 0.5) * sx)), 0, mask.width - 1);
            out.set(x, y, mask.at(src_x, src_y));
        }
    }
    return out;
}

}  // namespace docbin
