#include "docbin/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "docbin/error.hpp"
#include "docbin/image_io.hpp"
#include "docbin/resample.hpp"

namespace docbin {

namespace fs = std::filesystem;

namespace {

bool supported_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".bmp" || ext == ".tif" || ext == ".tiff";
}

std::vector<fs::path> list_images(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && supported_extension(entry.path())) {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

DatasetManifest ingest_manifest(const fs::path& root) {
    const fs::path inputs_dir = root / "inputs";
    const fs::path gt_dir = root / "gt";
    if (!fs::is_directory(inputs_dir) || !fs::is_directory(gt_dir)) {
        throw IoError("ingest_manifest: expected inputs/ and gt/ under " + root.string());
    }

    std::map<std::string, fs::path> gt_by_stem;
    for (const auto& p : list_images(gt_dir)) {
        gt_by_stem.emplace(p.stem().string(), p);
    }

    DatasetManifest manifest;
    manifest.name = root.filename().string();
    std::set<std::string> seen;
    for (const auto& input : list_images(inputs_dir)) {
        const std::string stem = input.stem().string();
        if (!seen.insert(stem).second) {
            throw ConfigError("ingest_manifest: duplicate page id: " + stem);
        }
        const auto gt_it = gt_by_stem.find(stem);
        if (gt_it == gt_by_stem.end()) {
            throw MissingGtError("ingest_manifest: no ground truth for page: " + stem);
        }
        const RasterImage in_img = load_image(input);
        const RasterImage gt_img = load_image(gt_it->second);
        if (in_img.width != gt_img.width || in_img.height != gt_img.height) {
            throw DimensionError("ingest_manifest: dimensions differ for page: " + stem);
        }
        manifest.pairs.push_back({stem, input, gt_it->second, in_img.width, in_img.height});
    }
    std::sort(manifest.pairs.begin(), manifest.pairs.end(),
              [](const PagePair& a, const PagePair& b) { return a.id < b.id; });
    return manifest;
}

FoldSpec make_folds(const DatasetManifest& manifest, int k, std::uint64_t seed) {
    const int n = static_cast<int>(manifest.pairs.size());
    if (k < 2 || k > n) {
        throw ConfigError("make_folds: k must be in [2, page count]");
    }
    std::vector<std::string> ids;
    ids.reserve(n);
    for (const auto& p : manifest.pairs) ids.push_back(p.id);

    FoldSpec spec;
    spec.k = k;
    if (k == n) {
        for (int i = 0; i < n; ++i) spec.assignment[ids[i]] = i;  // leave-one-out
        return spec;
    }
    // Fisher-Yates with explicit draws so the assignment is stable across
    // standard-library implementations.
    std::mt19937_64 rng(seed);
    for (int i = n - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
        std::swap(ids[i], ids[j]);
    }
    for (int i = 0; i < n; ++i) spec.assignment[ids[i]] = i % k;
    return spec;
}

FoldSpec load_folds(const DatasetManifest& manifest, const fs::path& split_file) {
    std::ifstream in(split_file);
    if (!in) {
        throw IoError("load_folds: cannot open " + split_file.string());
    }
    std::set<std::string> known;
    for (const auto& p : manifest.pairs) known.insert(p.id);

    FoldSpec spec;
    std::string line;
    int max_fold = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ConfigError("load_folds: expected `page_id,fold` lines");
        }
        const std::string id = line.substr(0, comma);
        const int fold = std::stoi(line.substr(comma + 1));
        if (!known.count(id)) {
            throw ConfigError("load_folds: unknown page id: " + id);
        }
        if (spec.assignment.count(id)) {
            throw ConfigError("load_folds: page assigned twice: " + id);
        }
        spec.assignment[id] = fold;
        max_fold = std::max(max_fold, fold);
    }
    if (spec.assignment.size() != known.size()) {
        throw ConfigError("load_folds: split file does not cover every page");
    }
    spec.k = max_fold + 1;
    return spec;
}

namespace {

struct LoadedPage {
    std::vector<FloatImage> channels;  // 1 or 3 raw planes
    BinaryMask gt;
};

LoadedPage load_page(const PagePair& pair) {
    LoadedPage page;
    const RasterImage img = load_image(pair.input);
    if (img.channels == 3) {
        for (int c = 0; c < 3; ++c) page.channels.push_back(extract_plane(img, c));
    } else {
        page.channels.push_back(to_grayscale(img));
    }
    page.gt = load_mask(pair.gt);
    return page;
}

RasterImage combine_channels(const std::vector<FloatImage>& channels) {
    RasterImage out;
    out.width = channels[0].width;
    out.height = channels[0].height;
    out.channels = static_cast<int>(channels.size());
    out.pixels.resize(static_cast<std::size_t>(out.width) * out.height * out.channels);
    for (std::size_t c = 0; c < channels.size(); ++c) {
        const RasterImage q = quantize_u8(channels[c]);
        for (std::size_t i = 0; i < q.pixels.size(); ++i) {
            out.pixels[i * out.channels + c] = q.pixels[i];
        }
    }
    return out;
}

// GT tiles reuse the input tiling geometry; reflect padding keeps masks binary.
BinaryMask mask_patch_like(const PatchGrid& grid, const BinaryMask& gt, int row, int col) {
    BinaryMask out(grid.patch_size, grid.patch_size);
    for (int y = 0; y < grid.patch_size; ++y) {
        const int sy = reflect_index(row * grid.patch_size + y, gt.height);
        for (int x = 0; x < grid.patch_size; ++x) {
            const int sx = reflect_index(col * grid.patch_size + x, gt.width);
            out.set(x, y, gt.at(sx, sy));
        }
    }
    return out;
}

}  // namespace

std::size_t augment_patch_set(const DatasetManifest& manifest, const AugmentConfig& cfg,
                              const fs::path& out) {
    fs::create_directories(out / "inputs");
    fs::create_directories(out / "gt");
    std::ofstream sidecar(out / "patches.csv");
    if (!sidecar) {
        throw IoError("augment_patch_set: cannot write sidecar under " + out.string());
    }
    sidecar << "source-page,scale,rotation,row,col,input-path,gt-path\n";

    std::vector<int> rotations{0};
    if (cfg.include_patch_rotation) rotations.push_back(cfg.patch_rotation_deg);

    const ResizeMethod bilinear{ResizeKind::bilinear};
    std::size_t count = 0;
    for (const auto& pair : manifest.pairs) {
        const LoadedPage page = load_page(pair);
        for (double scale : cfg.scales) {
            const int sw = std::max<int>(2, static_cast<int>(std::lround(pair.width * scale)));
            const int sh = std::max<int>(2, static_cast<int>(std::lround(pair.height * scale)));
            std::vector<FloatImage> scaled;
            for (const auto& ch : page.channels) scaled.push_back(resize(ch, bilinear, sw, sh));
            BinaryMask scaled_gt = resize_mask(page.gt, sw, sh);

            for (int rot : rotations) {
                const int turns = ((rot / 90) % 4 + 4) % 4;
                std::vector<FloatImage> rotated;
                for (const auto& ch : scaled) rotated.push_back(rotate90(ch, turns));
                const BinaryMask rotated_gt = rotate90(scaled_gt, turns);

                std::vector<PatchGrid> grids;
                for (const auto& ch : rotated) grids.push_back(tile_patches(ch, cfg.patch_size));
                const PatchGrid& layout = grids[0];

                for (int r = 0; r < layout.rows; ++r) {
                    for (int c = 0; c < layout.cols; ++c) {
                        std::vector<FloatImage> patch_channels;
                        for (const auto& g : grids) patch_channels.push_back(g.patch(r, c));
                        const BinaryMask gt_patch = mask_patch_like(layout, rotated_gt, r, c);

                        std::ostringstream stem;
                        stem << pair.id << "_s" << scale << "_r" << rot << "_" << r << "_" << c << ".png";
                        const fs::path input_path = out / "inputs" / stem.str();
                        const fs::path gt_path = out / "gt" / stem.str();
                        save_image(combine_channels(patch_channels), input_path);
                        save_mask(gt_patch, gt_path);
                        sidecar << pair.id << ',' << scale << ',' << rot << ',' << r << ',' << c << ','
                                << input_path.string() << ',' << gt_path.string() << '\n';
                        ++count;
                    }
                }
            }
        }
    }
    return count;
}

std::size_t augment_global_set(const DatasetManifest& manifest, const AugmentConfig& cfg,
                               const fs::path& out) {
    fs::create_directories(out / "inputs");
    fs::create_directories(out / "gt");

    const ResizeMethod nearest{ResizeKind::nearest};
    std::size_t count = 0;
    for (const auto& pair : manifest.pairs) {
        const LoadedPage page = load_page(pair);
        std::vector<FloatImage> base;
        for (const auto& ch : page.channels) {
            base.push_back(resize(ch, nearest, cfg.global_size, cfg.global_size));
        }
        const BinaryMask base_gt = resize_mask(page.gt, cfg.global_size, cfg.global_size);

        struct Variant {
            const char* tag;
            FloatImage (*img_op)(const FloatImage&);
            BinaryMask (*mask_op)(const BinaryMask&);
        };
        static const Variant variants[] = {
            {"id", [](const FloatImage& i) { return i; }, [](const BinaryMask& m) { return m; }},
            {"hflip", [](const FloatImage& i) { return flip_horizontal(i); },
             [](const BinaryMask& m) { return flip_horizontal(m); }},
            {"vflip", [](const FloatImage& i) { return flip_vertical(i); },
             [](const BinaryMask& m) { return flip_vertical(m); }},
            {"rot90", [](const FloatImage& i) { return rotate90(i, 1); },
             [](const BinaryMask& m) { return rotate90(m, 1); }},
            {"rot180", [](const FloatImage& i) { return rotate90(i, 2); },
             [](const BinaryMask& m) { return rotate90(m, 2); }},
            {"rot270", [](const FloatImage& i) { return rotate90(i, 3); },
             [](const BinaryMask& m) { return rotate90(m, 3); }},
        };

        for (const auto& v : variants) {
            std::vector<FloatImage> channels;
            for (const auto& ch : base) channels.push_back(v.img_op(ch));
            const BinaryMask gt = v.mask_op(base_gt);
            const std::string stem = pair.id + "_" + v.tag + ".png";
            save_image(combine_channels(channels), out / "inputs" / stem);
            save_mask(gt, out / "gt" / stem);
            ++count;
        }
    }
    return count;
}

}  // namespace docbin
