#pragma once

#include <string>
#include <vector>

#include "vqad/detecteval.hpp"
#include "vqad/manifest.hpp"
#include "vqad/maps.hpp"
#include "vqad/model.hpp"
#include "vqad/trainer.hpp"

namespace vqad {

struct PipelineOptions {
    SsimParams ssim{};
    Connectivity connectivity = Connectivity::eight;
    int min_area = 4;
    int selem_radius = -1;  // -1: ceil(downsample_factor / 2)

    int resolved_radius(int downsample_factor) const {
        return selem_radius >= 0 ? selem_radius : default_selem_radius(downsample_factor);
    }
};

struct TileMaps {
    ImageTile recon;
    MapF sm;
    MapF am;  // image scale, dilated
};

// reconstruct -> ssim -> alignment -> upsample; the per-tile part shared by
// detection and threshold sweeps.
TileMaps compute_tile_maps(const Model& model, const AmNormalizer& norm, const ImageTile& tile,
                           const PipelineOptions& opts = {});

struct TileDetection {
    TileMaps maps;
    BinaryMask amap;
    std::vector<DetectionBox> boxes;
};

TileDetection detect_tile(const Model& model, const AmNormalizer& norm, const ImageTile& tile,
                          float lambda_sm, float lambda_am, const PipelineOptions& opts = {});

// Dataset access relative to the manifest's directory.
std::vector<ImageTile> load_split_tiles(const Manifest& m, const std::string& base_dir,
                                        const std::string& split);
std::vector<std::vector<BoxI>> collect_split_boxes(const Manifest& m, const std::string& split);

// Runs detection over one split in manifest order. When dump_dir is nonempty
// writes per tile: reconstruction, 16-bit sm/am maps, the 1-bit binary map
// and a truth (green) versus predicted (red) overlay.
DetectionFile detect_split(const Model& model, const AmNormalizer& norm, const Manifest& m,
                           const std::string& base_dir, const std::string& split,
                           float lambda_sm, float lambda_am, const PipelineOptions& opts = {},
                           const std::string& dump_dir = {});

// Threshold selection on tiles with ground truth.
SweepResult sweep_thresholds(const Model& model, const AmNormalizer& norm,
                             const std::vector<ImageTile>& tiles,
                             const std::vector<std::vector<BoxI>>& gt,
                             const std::vector<float>& grid_sm,
                             const std::vector<float>& grid_am,
                             const PipelineOptions& opts = {},
                             const SweepOptions& sweep_opts = {});

ImageTile render_overlay(const ImageTile& tile, const std::vector<BoxI>& truth,
                         const std::vector<DetectionBox>& predicted);

// "a:b:n" -> n evenly spaced values on [a, b] inclusive; n >= 1, a <= b.
std::vector<float> parse_grid_spec(const std::string& spec);

}  // namespace vqad
