#include "docbin/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#if __has_include(<sys/wait.h>)
#include <sys/wait.h>
#endif

#include "docbin/error.hpp"
#include "docbin/image_io.hpp"

namespace docbin {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

BackendSpec parse_backend(const json& j) {
    BackendSpec spec;
    const std::string kind = j.value("kind", "identity");
    if (kind == "identity") {
        spec.kind = BackendKind::identity;
    } else if (kind == "classic") {
        spec.kind = BackendKind::classic;
        ThresholdParams p;
        p.method = parse_threshold_method(j.value("method", "otsu"));
        if (p.method == ThresholdMethod::niblack) p = ThresholdParams::niblack();
        if (p.method == ThresholdMethod::sauvola) p = ThresholdParams::sauvola();
        p.window = j.value("window", p.window);
        p.k = j.value("k", p.k);
        p.R = j.value("R", p.R);
        spec.params = p;
    } else if (kind == "external") {
        spec.kind = BackendKind::external_command;
        if (!j.contains("command")) {
            throw ConfigError("external backend requires a command template");
        }
        spec.command_template = j.at("command").get<std::string>();
        if (spec.command_template.find("{in}") == std::string::npos ||
            spec.command_template.find("{out}") == std::string::npos) {
            throw ConfigError("external backend command must contain {in} and {out}");
        }
    } else {
        throw ConfigError("unknown backend kind: " + kind);
    }
    return spec;
}

}  // namespace

PipelineConfig load_pipeline_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("load_pipeline_config: cannot open " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("load_pipeline_config: " + std::string(e.what()));
    }

    PipelineConfig cfg;
    cfg.patch_size = j.value("patch_size", cfg.patch_size);
    cfg.global_size = j.value("global_size", cfg.global_size);
    if (j.contains("mfe")) {
        const json& m = j.at("mfe");
        cfg.mfe_enabled = m.value("enabled", cfg.mfe_enabled);
        cfg.norm.strategy = parse_normalization(m.value("norm", "minmax"));
        cfg.norm.out_lo = m.value("out_lo", cfg.norm.out_lo);
        cfg.norm.out_hi = m.value("out_hi", cfg.norm.out_hi);
    }
    if (j.contains("stage2")) {
        const json& s = j.at("stage2");
        if (s.is_array()) {
            if (s.size() != 4) {
                throw ConfigError("stage2 array must list four backends (r, g, b, gray)");
            }
            for (int i = 0; i < 4; ++i) cfg.stage2[i] = parse_backend(s[i]);
        } else {
            const BackendSpec shared = parse_backend(s);
            cfg.stage2.fill(shared);
        }
    }
    if (j.contains("stage3_local")) cfg.stage3_local = parse_backend(j.at("stage3_local"));
    if (j.contains("stage3_global")) cfg.stage3_global = parse_backend(j.at("stage3_global"));
    if (j.contains("combine")) {
        const std::string mode = j.at("combine").get<std::string>();
        if (mode == "mean") cfg.combine = CombineMode::mean;
        else if (mode == "sum-clamped" || mode == "sum_clamped") cfg.combine = CombineMode::sum_clamped;
        else throw ConfigError("unknown combine mode: " + mode);
    }
    if (cfg.global_size < 1) {
        throw ConfigError("global_size must be positive");
    }
    return cfg;
}

namespace {

fs::path unique_work_dir() {
    static std::atomic<std::uint64_t> counter{0};
    std::random_device rd;
    std::ostringstream name;
    name << "docbin-" << std::hex << rd() << "-" << counter.fetch_add(1);
    fs::path dir = fs::temp_directory_path() / name.str();
    fs::create_directories(dir);
    return dir;
}

FloatImage run_external(const std::string& command_template, const FloatImage& input) {
    const fs::path work = unique_work_dir();
    const fs::path in_path = work / "in.png";
    const fs::path out_path = work / "out.png";
    save_image(quantize_u8(input), in_path);

    std::string cmd = command_template;
    auto substitute = [&cmd](const std::string& key, const std::string& value) {
        for (std::size_t pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key, pos)) {
            cmd.replace(pos, key.size(), value);
            pos += value.size();
        }
    };
    substitute("{in}", in_path.string());
    substitute("{out}", out_path.string());

    const int status = std::system(cmd.c_str());
    if (status != 0) {
        fs::remove_all(work);
#ifdef WIFEXITED
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : status;
#else
        const int code = status;
#endif
        throw BackendError("external backend exited with status " + std::to_string(code));
    }
    FloatImage result;
    try {
        result = to_grayscale(load_image(out_path));
    } catch (const Error& e) {
        fs::remove_all(work);
        throw BackendError(std::string("external backend produced unreadable output: ") + e.what());
    }
    fs::remove_all(work);
    if (result.width != input.width || result.height != input.height) {
        throw BackendError("external backend changed the image dimensions");
    }
    return result;
}

}  // namespace

FloatImage apply_enhancement(const BackendSpec& backend, const FloatImage& input) {
    switch (backend.kind) {
        case BackendKind::identity:
            return input;
        case BackendKind::classic:
            return mask_to_image(binarize(input, backend.params));
        case BackendKind::external_command:
            return run_external(backend.command_template, input);
    }
    throw ConfigError("apply_enhancement: unknown backend kind");
}

BinaryMask apply_binarization(const BackendSpec& backend, const FloatImage& input) {
    switch (backend.kind) {
        case BackendKind::identity:
            return image_to_mask(input);  // text below 128
        case BackendKind::classic:
            return binarize(input, backend.params);
        case BackendKind::external_command:
            return image_to_mask(run_external(backend.command_template, input));
    }
    throw ConfigError("apply_binarization: unknown backend kind");
}

Stage1Output run_stage1(const RasterImage& img, const PipelineConfig& cfg) {
    Stage1Output out;
    out.source_width = img.width;
    out.source_height = img.height;
    out.patch_size = cfg.patch_size;
    out.mfe_applied = cfg.mfe_enabled;

    const ChannelSet channels = split_channels(img);
    const FloatImage* planes[4] = {&channels.red, &channels.green, &channels.blue, &channels.gray};
    for (int c = 0; c < 4; ++c) {
        PatchGrid grid = tile_patches(*planes[c], cfg.patch_size);
        if (cfg.mfe_enabled) {
            PatchGrid reduced;
            reduced.patch_size = cfg.patch_size / 2;
            reduced.rows = grid.rows;
            reduced.cols = grid.cols;
            reduced.pad_right = 0;  // padding was folded in before the transform
            reduced.pad_bottom = 0;
            reduced.patches.reserve(grid.patches.size());
            for (const auto& patch : grid.patches) {
                reduced.patches.push_back(mfe_extract(patch, cfg.norm));
            }
            out.channels[c] = std::move(reduced);
        } else {
            out.channels[c] = std::move(grid);
        }
    }
    return out;
}

FloatImage run_stage2(const Stage1Output& stage1, const PipelineConfig& cfg) {
    std::array<FloatImage, 4> enhanced_channels;
    for (int c = 0; c < 4; ++c) {
        const PatchGrid& grid = stage1.channels[c];
        PatchGrid full;
        full.patch_size = stage1.patch_size;
        full.rows = grid.rows;
        full.cols = grid.cols;
        full.pad_right = grid.cols * stage1.patch_size - stage1.source_width;
        full.pad_bottom = grid.rows * stage1.patch_size - stage1.source_height;
        full.patches.reserve(grid.patches.size());
        for (const auto& patch : grid.patches) {
            FloatImage enhanced = apply_enhancement(cfg.stage2[c], patch);
            if (enhanced.width != patch.width || enhanced.height != patch.height) {
                throw BackendError("run_stage2: backend changed the patch dimensions");
            }
            if (stage1.mfe_applied) enhanced = ll_upsample(enhanced);
            full.patches.push_back(std::move(enhanced));
        }
        enhanced_channels[c] = stitch_patches(full);
    }

    FloatImage out(stage1.source_width, stage1.source_height);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double acc = 0.0;
        for (const auto& ch : enhanced_channels) acc += ch.values[i];
        if (cfg.combine == CombineMode::mean) acc /= 4.0;
        out.values[i] = std::clamp(acc, 0.0, 255.0);
    }
    return out;
}

BinaryMask stage3_local_mask(const FloatImage& enhanced, const PipelineConfig& cfg) {
    return apply_binarization(cfg.stage3_local, enhanced);
}

BinaryMask stage3_global_mask(const RasterImage& original, const PipelineConfig& cfg) {
    const FloatImage gray = to_grayscale(original);
    const FloatImage small = resize(gray, ResizeMethod{ResizeKind::nearest}, cfg.global_size, cfg.global_size);
    const BinaryMask mask = apply_binarization(cfg.stage3_global, small);
    return resize_mask(mask, original.width, original.height);
}

StageMasks run_stage3(const FloatImage& enhanced, const RasterImage& original, const PipelineConfig& cfg) {
    if (enhanced.width != original.width || enhanced.height != original.height) {
        throw DimensionError("run_stage3: enhanced image must match the original dimensions");
    }
    StageMasks masks;
    masks.local = stage3_local_mask(enhanced, cfg);
    masks.global = stage3_global_mask(original, cfg);
    masks.fused = fuse_and(masks.local, masks.global);
    return masks;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

PipelineResult run_pipeline(const DatasetManifest& manifest, const PipelineConfig& cfg,
                            const fs::path& out_dir) {
    fs::create_directories(out_dir);
    PipelineResult result;

    for (const auto& pair : manifest.pairs) {
        try {
            const RasterImage original = load_image(pair.input);

            const auto page_start = std::chrono::steady_clock::now();

            auto t = std::chrono::steady_clock::now();
            const Stage1Output stage1 = run_stage1(original, cfg);
            result.timing.stage1 += seconds_since(t);

            t = std::chrono::steady_clock::now();
            const FloatImage enhanced = run_stage2(stage1, cfg);
            result.timing.stage2 += seconds_since(t);

            t = std::chrono::steady_clock::now();
            const BinaryMask local = stage3_local_mask(enhanced, cfg);
            result.timing.stage3_local += seconds_since(t);

            t = std::chrono::steady_clock::now();
            const BinaryMask global = stage3_global_mask(original, cfg);
            result.timing.stage3_global += seconds_since(t);

            t = std::chrono::steady_clock::now();
            const BinaryMask fused = fuse_and(local, global);
            result.timing.fuse += seconds_since(t);

            result.timing.total += seconds_since(page_start);

            save_mask(fused, out_dir / (pair.id + ".png"));
            const BinaryMask gt = load_mask(pair.gt);
            result.pages.push_back({pair.id, evaluate_masks(fused, gt)});
        } catch (const Error& e) {
            result.failures.push_back({pair.id, e.what()});
        }
    }

    if (!result.pages.empty()) {
        MetricsReport mean;
        double drd_sum = 0.0, asm_sum = 0.0;
        std::size_t drd_n = 0, asm_n = 0;
        for (const auto& page : result.pages) {
            mean.fm += page.metrics.fm;
            mean.pfm += page.metrics.pfm;
            mean.psnr += page.metrics.psnr;
            mean.psnr_infinite = mean.psnr_infinite || page.metrics.psnr_infinite;
            if (page.metrics.drd) {
                drd_sum += *page.metrics.drd;
                ++drd_n;
            }
            if (page.metrics.asm_score) {
                asm_sum += *page.metrics.asm_score;
                ++asm_n;
            }
        }
        const double n = static_cast<double>(result.pages.size());
        mean.fm /= n;
        mean.pfm /= n;
        mean.psnr /= n;
        if (drd_n > 0) mean.drd = drd_sum / static_cast<double>(drd_n);
        if (asm_n > 0) mean.asm_score = asm_sum / static_cast<double>(asm_n);
        result.mean = mean;
    }
    return result;
}

std::vector<CompareMethodSpec> table3_methods() {
    return {
        {"Bicubic", CompareKind::resampler, ResizeMethod{ResizeKind::bicubic}},
        {"Bilinear", CompareKind::resampler, ResizeMethod{ResizeKind::bilinear}},
        {"Area", CompareKind::resampler, ResizeMethod{ResizeKind::area}},
        {"Nearest", CompareKind::resampler, ResizeMethod{ResizeKind::nearest}},
        {"Lanczos", CompareKind::resampler, ResizeMethod{ResizeKind::lanczos}},
        {"HWT", CompareKind::hwt_raw, {}},
        {"Ours", CompareKind::hwt_norm, {}},
    };
}

ResizerTable compare_resizers(const std::vector<DatasetManifest>& datasets,
                              const std::vector<CompareMethodSpec>& methods,
                              const NormalizationSpec& norm, bool quantize) {
    ResizerTable table;
    for (const auto& m : methods) table.methods.push_back(m.label);
    table.psnr_db.assign(methods.size(), {});
    table.mean_values.assign(methods.size(), 0.0);

    for (const auto& dataset : datasets) {
        table.datasets.push_back(dataset.name);
        std::vector<double> sums(methods.size(), 0.0);
        std::size_t pages = 0;

        for (const auto& pair : dataset.pairs) {
            const FloatImage gray = to_grayscale(load_image(pair.input));
            const BinaryMask gt = load_mask(pair.gt);
            const WaveletSubbands sb = hwt_forward(gray);
            const int tw = sb.ll.width;
            const int th = sb.ll.height;
            const BinaryMask gt_half = resize_mask(gt, tw, th);

            for (std::size_t mi = 0; mi < methods.size(); ++mi) {
                FloatImage reduced;
                switch (methods[mi].kind) {
                    case CompareKind::resampler:
                        reduced = resize(gray, methods[mi].method, tw, th);
                        break;
                    case CompareKind::hwt_raw:
                        reduced = sb.ll;
                        break;
                    case CompareKind::hwt_norm:
                        reduced = normalize_subband(sb.ll, norm);
                        break;
                }
                BinaryMask pred;
                if (quantize) {
                    pred = binarize_global(reduced);
                } else {
                    const int t = otsu_threshold(reduced);
                    pred = BinaryMask(reduced.width, reduced.height);
                    for (std::size_t i = 0; i < reduced.size(); ++i) {
                        pred.bits[i] = reduced.values[i] <= t ? 1 : 0;
                    }
                }
                double value;
                try {
                    value = psnr(pred, gt_half);
                } catch (const InfinitePsnr&) {
                    value = std::numeric_limits<double>::infinity();
                }
                sums[mi] += value;
            }
            ++pages;
        }
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            table.psnr_db[mi].push_back(pages > 0 ? sums[mi] / static_cast<double>(pages)
                                                  : std::numeric_limits<double>::quiet_NaN());
        }
    }

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        double acc = 0.0;
        for (double v : table.psnr_db[mi]) acc += v;
        table.mean_values[mi] = table.datasets.empty()
                                    ? std::numeric_limits<double>::quiet_NaN()
                                    : acc / static_cast<double>(table.datasets.size());
    }
    return table;
}

namespace {

std::string format_db(double v) {
    if (std::isinf(v)) return "inf";
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

}  // namespace

void write_resizer_csv(const ResizerTable& table, const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) {
        throw IoError("write_resizer_csv: cannot write " + path.string());
    }
    out << "Method";
    for (const auto& ds : table.datasets) out << ',' << ds;
    out << ",Mean Values\n";
    for (std::size_t mi = 0; mi < table.methods.size(); ++mi) {
        out << table.methods[mi];
        for (double v : table.psnr_db[mi]) out << ',' << format_db(v);
        out << ',' << format_db(table.mean_values[mi]) << '\n';
    }
}

namespace {

std::string metric_cell(double v, bool is_inf, const char* suffix = "") {
    if (is_inf) return "inf";
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v << suffix;
    return os.str();
}

std::string optional_cell(const std::optional<double>& v) {
    if (!v) return "-";
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << *v;
    return os.str();
}

void append_row(std::ostringstream& os, const std::string& id, const MetricsReport& m,
                ReportFormat fmt) {
    const std::string psnr_cell = metric_cell(m.psnr, m.psnr_infinite, fmt == ReportFormat::aligned_text ? "dB" : "");
    if (fmt == ReportFormat::csv) {
        os << id << ',' << metric_cell(m.fm, false) << ',' << metric_cell(m.pfm, false) << ','
           << psnr_cell << ',' << (m.drd ? metric_cell(*m.drd, false) : "") << ','
           << (m.asm_score ? metric_cell(*m.asm_score, false) : "") << '\n';
    } else {
        os << std::left << std::setw(20) << id << std::right << std::setw(8)
           << metric_cell(m.fm, false) << std::setw(8) << metric_cell(m.pfm, false) << std::setw(11)
           << psnr_cell << std::setw(8) << optional_cell(m.drd) << std::setw(8)
           << optional_cell(m.asm_score) << '\n';
    }
}

}  // namespace

std::string format_report(const std::vector<PageReport>& pages,
                          const std::optional<MetricsReport>& mean, const StageTiming& timing,
                          ReportFormat fmt) {
    std::ostringstream os;
    if (fmt == ReportFormat::csv) {
        os << "file,fm,pfm,psnr_db,drd,asm\n";
        for (const auto& page : pages) append_row(os, page.id, page.metrics, fmt);
        if (mean) append_row(os, "mean", *mean, fmt);
    } else {
        os << std::left << std::setw(20) << "File" << std::right << std::setw(8) << "FM"
           << std::setw(8) << "p-FM" << std::setw(11) << "PSNR" << std::setw(8) << "DRD"
           << std::setw(8) << "ASM" << '\n';
        for (const auto& page : pages) append_row(os, page.id, page.metrics, fmt);
        if (mean) append_row(os, "mean", *mean, fmt);
        os << '\n';
        os << std::fixed << std::setprecision(3) << "stage1: " << timing.stage1
           << "s  stage2: " << timing.stage2 << "s  stage3-local: " << timing.stage3_local
           << "s  stage3-global: " << timing.stage3_global << "s  fuse: " << timing.fuse
           << "s  total: " << timing.total << "s\n";
    }
    return os.str();
}

void emit_report(const std::vector<PageReport>& pages, const std::optional<MetricsReport>& mean,
                 const StageTiming& timing, ReportFormat fmt, const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) {
        throw IoError("emit_report: cannot write " + path.string());
    }
    out << format_report(pages, mean, timing, fmt);
}

std::pair<std::vector<PageReport>, std::optional<MetricsReport>> read_report_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("read_report_csv: cannot open " + path.string());
    }
    std::vector<PageReport> pages;
    std::optional<MetricsReport> mean;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("file,", 0) == 0) continue;
        }
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        cells.resize(6);
        MetricsReport m;
        m.fm = std::stod(cells[1]);
        m.pfm = std::stod(cells[2]);
        if (cells[3] == "inf") {
            m.psnr = std::numeric_limits<double>::infinity();
            m.psnr_infinite = true;
        } else {
            m.psnr = std::stod(cells[3]);
        }
        if (!cells[4].empty()) m.drd = std::stod(cells[4]);
        if (!cells[5].empty()) m.asm_score = std::stod(cells[5]);
        if (cells[0] == "mean") mean = m;
        else pages.push_back({cells[0], m});
    }
    return {pages, mean};
}

}  // namespace docbin
