#pragma once

#include <cstdint>
#include <string>

#include "vqad/tensor.hpp"

namespace vqad {

// Reads any 8/16-bit gray/palette/RGB(A) PNG as an RGB unit-interval tile.
ImageTile read_tile_png(const std::string& path);

// 8-bit PNG; the tile must have 1 or 3 channels.
void write_tile_png(const std::string& path, const ImageTile& tile);

// 16-bit grayscale; values clamped to [0,1] and scaled by 65535.
void write_map_png16(const std::string& path, const MapF& map);

// 1-bit grayscale.
void write_mask_png1(const std::string& path, const BinaryMask& mask);

}  // namespace vqad
