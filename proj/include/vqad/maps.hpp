#pragma once

#include "vqad/model.hpp"
#include "vqad/tensor.hpp"
#include "vqad/trainer.hpp"

namespace vqad {

struct SsimParams {
    int window_side = 11;
    float gaussian_sigma = 1.5f;
    float dynamic_range = 1.0f;  // L; tiles are unit interval
    // Stabilizers (0.01*L)^2 and (0.03*L)^2.
    float c1 = 1e-4f;
    float c2 = 9e-4f;

    static SsimParams for_dynamic_range(float range);
};

void validate(const SsimParams& p);

// Per-pixel structural dissimilarity of two equally shaped tiles:
// SM = clamp((1 - SSIM)/2, 0, 1), local Gaussian window statistics, channel
// mean, reflected borders. 0 means structurally identical.
MapF ssim_map(const ImageTile& x, const ImageTile& y, const SsimParams& p = {});

// Residual-to-score normalization: a(i,j) = r(i,j) / norm.scale.
MapF alignment_field(const Quantization<float>& q, const AmNormalizer& norm);

// Grayscale dilation with a disk structuring element; radius 0 is identity.
MapF dilate_gray(const MapF& m, int radius);

// Nearest-neighbor upsampling by `factor` followed by disk dilation, moving a
// latent-resolution map to image resolution.
MapF upsample_alignment(const MapF& am_latent, int factor, int selem_radius);

inline int default_selem_radius(int downsample_factor) {
    return (downsample_factor + 1) / 2;  // ceil(f/2)
}

// Baseline pixelwise fusion: min-max normalize both maps (constant maps
// normalize to zero) and multiply.
MapF fuse_pixelwise(const MapF& sm, const MapF& am);

}  // namespace vqad
