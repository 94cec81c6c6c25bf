#pragma once

#include <cstdint>
#include <vector>

#include "vqad/tensor.hpp"

namespace vqad {

enum class Connectivity : int { four = 4, eight = 8 };

// Inclusive threshold: pixel is foreground iff value >= lambda.
BinaryMask binarize(const MapF& map, float lambda);

struct Component {
    int id = 0;  // 1-based; assigned in raster order of the first pixel
    long area = 0;
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    std::vector<int> pixels;  // flat y*w + x indices, in discovery order
};

struct ComponentSet {
    Grid<std::int32_t> labels;  // 0 = background
    std::vector<Component> comps;
    int count() const { return static_cast<int>(comps.size()); }
};

ComponentSet label_components(const BinaryMask& mask, Connectivity conn);

// Double thresholding: segment sm at lambda_sm and am at lambda_am, then keep
// exactly the sm components whose pixel set meets the am mask. The result is
// always a subset of binarize(sm, lambda_sm).
BinaryMask hysteresis_select(const MapF& sm, const MapF& am, float lambda_sm, float lambda_am,
                             Connectivity conn = Connectivity::eight);

}  // namespace vqad
