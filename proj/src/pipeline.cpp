#include "vqad/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "vqad/errors.hpp"
#include "vqad/parallel.hpp"
#include "vqad/png_io.hpp"

namespace vqad {

namespace fs = std::filesystem;

TileMaps compute_tile_maps(const Model& model, const AmNormalizer& norm, const ImageTile& tile,
                           const PipelineOptions& opts) {
    auto [recon, q] = model.reconstruct(tile);
    TileMaps out;
    out.sm = ssim_map(tile, recon, opts.ssim);
    const MapF am_latent = alignment_field(q, norm);
    out.am = upsample_alignment(am_latent, model.config().downsample_factor,
                                opts.resolved_radius(model.config().downsample_factor));
    out.recon = std::move(recon);
    return out;
}

TileDetection detect_tile(const Model& model, const AmNormalizer& norm, const ImageTile& tile,
                          float lambda_sm, float lambda_am, const PipelineOptions& opts) {
    TileDetection out;
    out.maps = compute_tile_maps(model, norm, tile, opts);
    out.amap =
        hysteresis_select(out.maps.sm, out.maps.am, lambda_sm, lambda_am, opts.connectivity);
    out.boxes = extract_boxes(out.amap, out.maps.sm, opts.min_area, opts.connectivity);
    return out;
}

std::vector<ImageTile> load_split_tiles(const Manifest& m, const std::string& base_dir,
                                        const std::string& split) {
    const auto records = m.split_records(split);
    std::vector<ImageTile> tiles(records.size());
    parallel_for(static_cast<int>(records.size()), [&](int i) {
        tiles[static_cast<std::size_t>(i)] =
            read_tile_png((fs::path(base_dir) / records[static_cast<std::size_t>(i)]->path)
                              .string());
    });
    return tiles;
}

std::vector<std::vector<BoxI>> collect_split_boxes(const Manifest& m, const std::string& split) {
    std::vector<std::vector<BoxI>> out;
    for (const auto* r : m.split_records(split)) out.push_back(r->boxes);
    return out;
}

namespace {

void set_pixel(ImageTile& t, int y, int x, float r, float g, float b) {
    if (y < 0 || y >= t.h || x < 0 || x >= t.w) return;
    t.at(0, y, x) = r;
    t.at(1, y, x) = g;
    t.at(2, y, x) = b;
}

void draw_rect(ImageTile& t, const BoxI& box, float r, float g, float b) {
    const int x1 = box.x + box.w - 1, y1 = box.y + box.h - 1;
    for (int x = box.x; x <= x1; ++x) {
        set_pixel(t, box.y, x, r, g, b);
        set_pixel(t, y1, x, r, g, b);
    }
    for (int y = box.y; y <= y1; ++y) {
        set_pixel(t, y, box.x, r, g, b);
        set_pixel(t, y, x1, r, g, b);
    }
}

}  // namespace

ImageTile render_overlay(const ImageTile& tile, const std::vector<BoxI>& truth,
                         const std::vector<DetectionBox>& predicted) {
    ImageTile out(3, tile.h, tile.w);
    for (int y = 0; y < tile.h; ++y)
        for (int x = 0; x < tile.w; ++x)
            for (int c = 0; c < 3; ++c) out.at(c, y, x) = tile.at(tile.c == 3 ? c : 0, y, x);
    for (const BoxI& b : truth) draw_rect(out, b, 0.0f, 1.0f, 0.0f);
    for (const DetectionBox& b : predicted) draw_rect(out, b.geom(), 1.0f, 0.0f, 0.0f);
    return out;
}

DetectionFile detect_split(const Model& model, const AmNormalizer& norm, const Manifest& m,
                           const std::string& base_dir, const std::string& split,
                           float lambda_sm, float lambda_am, const PipelineOptions& opts,
                           const std::string& dump_dir) {
    const auto records = m.split_records(split);
    if (!dump_dir.empty()) {
        std::error_code ec;
        fs::create_directories(dump_dir, ec);
        if (ec || !fs::is_directory(dump_dir))
            throw IoError("cannot create dump directory: " + dump_dir);
    }

    DetectionFile out;
    out.records.resize(records.size());
    parallel_for(static_cast<int>(records.size()), [&](int i) {
        const ManifestRecord& rec = *records[static_cast<std::size_t>(i)];
        const ImageTile tile = read_tile_png((fs::path(base_dir) / rec.path).string());
        TileDetection det = detect_tile(model, norm, tile, lambda_sm, lambda_am, opts);
        out.records[static_cast<std::size_t>(i)] = {rec.path, det.boxes};
        if (!dump_dir.empty()) {
            const std::string stem = fs::path(rec.path).stem().string();
            const fs::path base = fs::path(dump_dir) / stem;
            write_tile_png(base.string() + "_recon.png", det.maps.recon);
            write_map_png16(base.string() + "_sm.png", det.maps.sm);
            write_map_png16(base.string() + "_am.png", det.maps.am);
            write_mask_png1(base.string() + "_amap.png", det.amap);
            write_tile_png(base.string() + "_overlay.png",
                           render_overlay(tile, rec.boxes, det.boxes));
        }
    });
    return out;
}

SweepResult sweep_thresholds(const Model& model, const AmNormalizer& norm,
                             const std::vector<ImageTile>& tiles,
                             const std::vector<std::vector<BoxI>>& gt,
                             const std::vector<float>& grid_sm,
                             const std::vector<float>& grid_am, const PipelineOptions& opts,
                             const SweepOptions& sweep_opts) {
    if (tiles.empty()) throw ConfigError("sweep: empty validation set");
    if (tiles.size() != gt.size()) throw ShapeError("sweep: tiles/ground-truth size mismatch");
    if (grid_sm.empty() || grid_am.empty()) throw ConfigError("sweep: empty threshold grid");

    std::vector<TileEval> evals(tiles.size());
    parallel_for(static_cast<int>(tiles.size()), [&](int i) {
        TileMaps maps = compute_tile_maps(model, norm, tiles[static_cast<std::size_t>(i)], opts);
        evals[static_cast<std::size_t>(i)] = {std::move(maps.sm), std::move(maps.am),
                                              gt[static_cast<std::size_t>(i)]};
    });
    SweepOptions so = sweep_opts;
    so.min_area = opts.min_area;
    so.connectivity = opts.connectivity;
    return sweep_over_maps(evals, grid_sm, grid_am, so);
}

std::vector<float> parse_grid_spec(const std::string& spec) {
    float a = 0, b = 0;
    long n = 0;
    char tail = 0;
    if (std::sscanf(spec.c_str(), "%f:%f:%ld%c", &a, &b, &n, &tail) != 3)
        throw ConfigError("grid spec must be a:b:n, got '" + spec + "'");
    if (n < 1) throw ConfigError("grid spec needs n >= 1: '" + spec + "'");
    if (b < a) throw ConfigError("grid spec needs a <= b: '" + spec + "'");
    std::vector<float> grid;
    grid.reserve(static_cast<std::size_t>(n));
    if (n == 1) {
        grid.push_back(a);
        return grid;
    }
    const double step = (static_cast<double>(b) - a) / static_cast<double>(n - 1);
    for (long i = 0; i < n; ++i)
        grid.push_back(static_cast<float>(static_cast<double>(a) + step * static_cast<double>(i)));
    return grid;
}

}  // namespace vqad
