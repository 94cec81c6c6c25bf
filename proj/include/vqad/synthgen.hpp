#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vqad/manifest.hpp"
#include "vqad/tensor.hpp"

namespace vqad {

// Procedural sea-surface tiles: band-limited value noise with optional glare
// streaks and foam speckle as in-distribution nuisances, plus injected
// animal-like blobs for the anomalous splits.
struct SceneParams {
    int tile_side = 64;
    float wave_scale = 16.0f;      // lattice spacing of the first noise octave, px
    float glare_prob = 0.3f;
    float foam_prob = 0.3f;
    float glare_strength = 0.45f;  // additive peak of a glare streak
    float foam_density = 0.01f;    // expected speckles per pixel
    int animal_count_min = 1;
    int animal_count_max = 3;
    int animal_size_min = 6;       // blob extent range, px
    int animal_size_max = 14;
    float animal_contrast = -0.35f;  // signed blend; negative = darker than sea
    std::uint64_t seed = 0;
};

void validate(const SceneParams& p);

enum class SplitTag : std::uint64_t { none = 0, train = 1, val = 2, test = 3 };

ImageTile gen_normal(const SceneParams& p, std::uint64_t index,
                     SplitTag split = SplitTag::none);

struct LabeledTile {
    ImageTile tile;
    std::vector<BoxI> boxes;             // tight bounds of the blob supports
    std::vector<BinaryMask> supports;    // full-tile masks, one per blob
};

LabeledTile gen_anomalous(const SceneParams& p, std::uint64_t index,
                          SplitTag split = SplitTag::none);

struct SplitCounts {
    int train = 0, val = 0, test = 0;
};

// Writes PNG tiles plus manifest.json into out_dir and returns the manifest.
// Train tiles are always normal; val/test lead with exactly
// llround(fraction * count) anomalous tiles.
Manifest gen_dataset(const SceneParams& p, const SplitCounts& counts, double anomalous_fraction,
                     const std::string& out_dir);

}  // namespace vqad
