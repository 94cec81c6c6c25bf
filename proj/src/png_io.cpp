#include "vqad/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "vqad/errors.hpp"

namespace vqad {

namespace {

struct FileHandle {
    FILE* fp = nullptr;
    explicit FileHandle(const std::string& path, const char* mode) : fp(fopen(path.c_str(), mode)) {}
    ~FileHandle() {
        if (fp) fclose(fp);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
};

std::uint8_t to_u8(float v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

void write_png(const std::string& path, int h, int w, int color_type, int bit_depth,
               const std::vector<png_bytep>& rows, bool packed_bits, bool swap16) {
    FileHandle file(path, "wb");
    if (!file.fp) throw IoError("cannot write png: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng writer allocation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png write failed: " + path);
    }
    png_init_io(png, file.fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bit_depth,
                 color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (packed_bits) png_set_packing(png);
    if (swap16) png_set_swap(png);
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

ImageTile read_tile_png(const std::string& path) {
    FileHandle file(path, "rb");
    if (!file.fp) throw IoError("cannot open png: " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng reader allocation failed");
    }
    std::vector<std::uint8_t> raw;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ArtifactError("invalid png: " + path);
    }
    png_init_io(png, file.fp);
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_strip_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const int h = static_cast<int>(png_get_image_height(png, info));
    const int w = static_cast<int>(png_get_image_width(png, info));
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    raw.resize(static_cast<std::size_t>(h) * rowbytes);
    rows.resize(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) rows[static_cast<std::size_t>(y)] = raw.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    ImageTile tile(3, h, w);
    const float inv = 1.0f / 255.0f;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                tile.at(c, y, x) =
                    static_cast<float>(raw[static_cast<std::size_t>(y) * rowbytes + 3 * x + c]) *
                    inv;
    return tile;
}

void write_tile_png(const std::string& path, const ImageTile& tile) {
    if (tile.c != 1 && tile.c != 3) throw ShapeError("png tile must have 1 or 3 channels");
    const int h = tile.h, w = tile.w, c = tile.c;
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(h) * w * c);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int ci = 0; ci < c; ++ci)
                raw[(static_cast<std::size_t>(y) * w + x) * c + ci] = to_u8(tile.at(ci, y, x));
    std::vector<png_bytep> rows(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y)
        rows[static_cast<std::size_t>(y)] = raw.data() + static_cast<std::size_t>(y) * w * c;
    write_png(path, h, w, c == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, 8, rows, false,
              false);
}

void write_map_png16(const std::string& path, const MapF& map) {
    const int h = map.h, w = map.w;
    std::vector<std::uint16_t> raw(static_cast<std::size_t>(h) * w);
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = static_cast<std::uint16_t>(
            std::lround(std::clamp(map.v[i], 0.0f, 1.0f) * 65535.0f));
    std::vector<png_bytep> rows(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y)
        rows[static_cast<std::size_t>(y)] =
            reinterpret_cast<png_bytep>(raw.data() + static_cast<std::size_t>(y) * w);
    write_png(path, h, w, PNG_COLOR_TYPE_GRAY, 16, rows, false, true);
}

void write_mask_png1(const std::string& path, const BinaryMask& mask) {
    const int h = mask.h, w = mask.w;
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(h) * w);
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = mask.v[i] ? 1 : 0;
    std::vector<png_bytep> rows(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y)
        rows[static_cast<std::size_t>(y)] = raw.data() + static_cast<std::size_t>(y) * w;
    write_png(path, h, w, PNG_COLOR_TYPE_GRAY, 1, rows, true, false);
}

}  // namespace vqad
