#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "docbin/image.hpp"

namespace docbin {

struct PagePair {
    std::string id;  // shared file stem
    std::filesystem::path input;
    std::filesystem::path gt;
    int width = 0;
    int height = 0;
};

struct DatasetManifest {
    std::string name;
    std::vector<PagePair> pairs;  // sorted by id
};

struct FoldSpec {
    int k = 0;
    std::map<std::string, int> assignment;  // page id -> fold index
};

struct AugmentConfig {
    std::vector<double> scales{0.75, 1.0, 1.25, 1.5};
    bool include_patch_rotation = true;
    int patch_rotation_deg = 270;  // applied in addition to the 0-degree variant
    int patch_size = 256;
    int global_size = 512;
};

/// Pair every file under root/inputs with the same-stem file under root/gt.
/// Unpaired inputs raise MissingGtError; dimension mismatches raise
/// DimensionError naming the pair.
DatasetManifest ingest_manifest(const std::filesystem::path& root);

/// k == page count gives leave-one-out over the sorted ids; otherwise a
/// seeded shuffle into near-equal folds. Deterministic for a fixed seed.
FoldSpec make_folds(const DatasetManifest& manifest, int k, std::uint64_t seed);

/// Explicit assignment from a CSV of `page_id,fold` lines, e.g. to reproduce
/// a fixed published split.
FoldSpec load_folds(const DatasetManifest& manifest, const std::filesystem::path& split_file);

/// Scale (bilinear inputs, nearest GT), rotate, and tile each page into
/// patch_size^2 pairs; writes patches plus a patches.csv sidecar. Returns the
/// number of patch pairs.
std::size_t augment_patch_set(const DatasetManifest& manifest, const AugmentConfig& cfg,
                              const std::filesystem::path& out);

/// Resize every page to global_size^2 (nearest) and emit identity, both
/// flips, and the three quarter-turn rotations: 6 variants per page.
std::size_t augment_global_set(const DatasetManifest& manifest, const AugmentConfig& cfg,
                               const std::filesystem::path& out);

}  // namespace docbin
