#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vqad/errors.hpp"

namespace vqad {

// Dense channel-major (CHW) tensor. Image tiles use it with c = channels and
// unit-interval values; latent fields use c = code dimension.
template <typename T>
struct Tensor {
    int c = 0, h = 0, w = 0;
    std::vector<T> v;

    Tensor() = default;
    Tensor(int c_, int h_, int w_)
        : c(c_), h(h_), w(w_), v(static_cast<std::size_t>(c_) * h_ * w_, T(0)) {}

    std::size_t size() const { return v.size(); }
    std::size_t plane() const { return static_cast<std::size_t>(h) * w; }

    T& at(int ci, int y, int x) { return v[(static_cast<std::size_t>(ci) * h + y) * w + x]; }
    const T& at(int ci, int y, int x) const {
        return v[(static_cast<std::size_t>(ci) * h + y) * w + x];
    }

    T* data() { return v.data(); }
    const T* data() const { return v.data(); }

    bool same_shape(const Tensor& o) const { return c == o.c && h == o.h && w == o.w; }
};

// 2-D grid; used for anomaly maps (float), masks (uint8) and labels (int).
template <typename T>
struct Grid {
    int h = 0, w = 0;
    std::vector<T> v;

    Grid() = default;
    Grid(int h_, int w_, T fill = T(0))
        : h(h_), w(w_), v(static_cast<std::size_t>(h_) * w_, fill) {}

    std::size_t size() const { return v.size(); }

    T& at(int y, int x) { return v[static_cast<std::size_t>(y) * w + x]; }
    const T& at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }

    bool same_shape(const Grid& o) const { return h == o.h && w == o.w; }
    bool operator==(const Grid& o) const { return h == o.h && w == o.w && v == o.v; }
};

using ImageTile = Tensor<float>;
using MapF = Grid<float>;
using BinaryMask = Grid<std::uint8_t>;

inline void require_same_shape(const MapF& a, const MapF& b, const char* what) {
    if (!a.same_shape(b)) throw ShapeError(std::string(what) + ": map shapes differ");
}

}  // namespace vqad
