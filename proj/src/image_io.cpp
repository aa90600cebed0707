#include "docbin/image_io.hpp"

#include <algorithm>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "docbin/error.hpp"

namespace docbin {

namespace {

// The decoder expands gray+alpha PNGs to BGRA, so the IHDR color type is the
// only way to tell them apart from real color images. Type 4 = gray+alpha.
bool is_gray_alpha_png(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    unsigned char header[26] = {};
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    static const unsigned char kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (!in || !std::equal(std::begin(kSignature), std::end(kSignature), header)) return false;
    return header[25] == 4;
}

}  // namespace

RasterImage load_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw IoError("load_image: no such file: " + path.string());
    }
    cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (mat.empty()) {
        throw IoError("load_image: cannot decode " + path.string());
    }
    if (mat.depth() != CV_8U) {
        throw FormatError("load_image: only 8-bit images are supported: " + path.string());
    }

    const int in_channels = mat.channels();
    if (in_channels != 1 && in_channels != 2 && in_channels != 3 && in_channels != 4) {
        throw FormatError("load_image: unsupported channel count: " + path.string());
    }
    const bool force_gray = in_channels == 2 || (in_channels == 4 && is_gray_alpha_png(path));

    RasterImage out;
    out.width = mat.cols;
    out.height = mat.rows;
    out.channels = (in_channels >= 3 && !force_gray) ? 3 : 1;
    out.pixels.resize(static_cast<std::size_t>(out.width) * out.height * out.channels);

    for (int y = 0; y < out.height; ++y) {
        const std::uint8_t* row = mat.ptr<std::uint8_t>(y);
        for (int x = 0; x < out.width; ++x) {
            const std::uint8_t* px = row + static_cast<std::size_t>(x) * in_channels;
            std::uint8_t* dst = out.pixels.data() + (static_cast<std::size_t>(y) * out.width + x) * out.channels;
            if (out.channels == 1) {
                dst[0] = px[0];  // alpha dropped; expanded planes all carry the gray value
            } else {
                dst[0] = px[2];  // imread delivers BGR(A)
                dst[1] = px[1];
                dst[2] = px[0];
            }
        }
    }
    return out;
}

void save_image(const RasterImage& img, const std::filesystem::path& path) {
    if (img.channels != 1 && img.channels != 3) {
        throw FormatError("save_image: only 1- or 3-channel images are supported");
    }
    cv::Mat mat(img.height, img.width, img.channels == 1 ? CV_8UC1 : CV_8UC3);
    for (int y = 0; y < img.height; ++y) {
        std::uint8_t* row = mat.ptr<std::uint8_t>(y);
        for (int x = 0; x < img.width; ++x) {
            const std::uint8_t* src = img.pixels.data() + (static_cast<std::size_t>(y) * img.width + x) * img.channels;
            std::uint8_t* dst = row + static_cast<std::size_t>(x) * img.channels;
            if (img.channels == 1) {
                dst[0] = src[0];
            } else {
                dst[0] = src[2];  // imwrite expects BGR
                dst[1] = src[1];
                dst[2] = src[0];
            }
        }
    }
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    if (!cv::imwrite(path.string(), mat)) {
        throw IoError("save_image: cannot write " + path.string());
    }
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
    RasterImage img;
    img.width = mask.width;
    img.height = mask.height;
    img.channels = 1;
    img.pixels.resize(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        img.pixels[i] = mask.bits[i] ? 0 : 255;
    }
    save_image(img, path);
}

BinaryMask load_mask(const std::filesystem::path& path, double text_below) {
    return image_to_mask(to_grayscale(load_image(path)), text_below);
}

}  // namespace docbin
