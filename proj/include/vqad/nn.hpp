#pragma once

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "vqad/tensor.hpp"

namespace vqad::nn {

// Geometry of a strided, zero-padded convolution. The same record describes a
// transposed convolution: `cin`/`cout` are always the layer's own input and
// output channel counts, and the transposed weight layout is the one of the
// mirrored ordinary convolution (cin x cout*k*k).
struct ConvGeom {
    int cin = 0, cout = 0, k = 3, stride = 1, pad = 0;

    int out_dim(int in) const { return (in + 2 * pad - k) / stride + 1; }
    int up_dim(int in) const { return (in - 1) * stride - 2 * pad + k; }
    std::size_t weight_count() const {
        return static_cast<std::size_t>(cin) * cout * k * k;
    }
};

template <typename T>
using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapM = Eigen::Map<MatRM<T>>;
template <typename T>
using CMapM = Eigen::Map<const MatRM<T>>;

// col is (cin*k*k) x (oh*ow), row-major, zero-filled where the window leaves
// the image.
template <typename T>
void im2col(const Tensor<T>& x, int k, int stride, int pad, int oh, int ow,
            std::vector<T>& col) {
    const std::size_t p = static_cast<std::size_t>(oh) * ow;
    col.assign(static_cast<std::size_t>(x.c) * k * k * p, T(0));
    for (int ci = 0; ci < x.c; ++ci) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                T* dst = col.data() + (static_cast<std::size_t>((ci * k + ky) * k + kx)) * p;
                for (int oy = 0; oy < oh; ++oy, dst += ow) {
                    const int iy = oy * stride - pad + ky;
                    if (iy < 0 || iy >= x.h) continue;
                    const T* src = &x.at(ci, iy, 0);
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * stride - pad + kx;
                        if (ix >= 0 && ix < x.w) dst[ox] = src[ix];
                    }
                }
            }
        }
    }
}

// Adjoint of im2col: scatter-adds the column matrix back into an image.
template <typename T>
void col2im_add(const std::vector<T>& col, int k, int stride, int pad, int oh, int ow,
                Tensor<T>& x) {
    const std::size_t p = static_cast<std::size_t>(oh) * ow;
    for (int ci = 0; ci < x.c; ++ci) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                const T* src = col.data() + (static_cast<std::size_t>((ci * k + ky) * k + kx)) * p;
                for (int oy = 0; oy < oh; ++oy, src += ow) {
                    const int iy = oy * stride - pad + ky;
                    if (iy < 0 || iy >= x.h) continue;
                    T* dst = &x.at(ci, iy, 0);
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * stride - pad + kx;
                        if (ix >= 0 && ix < x.w) dst[ix] += src[ox];
                    }
                }
            }
        }
    }
}

// y = w * im2col(x) + b, with w laid out (cout) x (cin*k*k).
template <typename T>
Tensor<T> conv2d_forward(const ConvGeom& g, const T* w, const T* b, const Tensor<T>& x,
                         std::vector<T>& col) {
    const int oh = g.out_dim(x.h), ow = g.out_dim(x.w);
    im2col(x, g.k, g.stride, g.pad, oh, ow, col);
    const std::size_t kk = static_cast<std::size_t>(g.cin) * g.k * g.k;
    const std::size_t p = static_cast<std::size_t>(oh) * ow;
    Tensor<T> y(g.cout, oh, ow);
    MapM<T> ym(y.data(), g.cout, static_cast<Eigen::Index>(p));
    CMapM<T> wm(w, g.cout, static_cast<Eigen::Index>(kk));
    CMapM<T> cm(col.data(), static_cast<Eigen::Index>(kk), static_cast<Eigen::Index>(p));
    ym.noalias() = wm * cm;
    for (int co = 0; co < g.cout; ++co) ym.row(co).array() += b[co];
    return y;
}

// Accumulates dw/db; returns d(input) when need_dx is set.
template <typename T>
Tensor<T> conv2d_backward(const ConvGeom& g, const T* w, const Tensor<T>& x,
                          const Tensor<T>& dy, T* dw, T* db, bool need_dx,
                          std::vector<T>& col, std::vector<T>& col2) {
    const int oh = dy.h, ow = dy.w;
    const std::size_t kk = static_cast<std::size_t>(g.cin) * g.k * g.k;
    const std::size_t p = static_cast<std::size_t>(oh) * ow;
    im2col(x, g.k, g.stride, g.pad, oh, ow, col);
    CMapM<T> dym(dy.data(), g.cout, static_cast<Eigen::Index>(p));
    CMapM<T> cm(col.data(), static_cast<Eigen::Index>(kk), static_cast<Eigen::Index>(p));
    MapM<T> dwm(dw, g.cout, static_cast<Eigen::Index>(kk));
    dwm.noalias() += dym * cm.transpose();
    for (int co = 0; co < g.cout; ++co) db[co] += dym.row(co).sum();

    Tensor<T> dx;
    if (need_dx) {
        dx = Tensor<T>(g.cin, x.h, x.w);
        col2.assign(kk * p, T(0));
        MapM<T> dcm(col2.data(), static_cast<Eigen::Index>(kk), static_cast<Eigen::Index>(p));
        CMapM<T> wm(w, g.cout, static_cast<Eigen::Index>(kk));
        dcm.noalias() = wm.transpose() * dym;
        col2im_add(col2, g.k, g.stride, g.pad, oh, ow, dx);
    }
    return dx;
}

// Transposed convolution: y = col2im(w^T * u) + b. Upsamples u by g.stride.
template <typename T>
Tensor<T> tconv2d_forward(const ConvGeom& g, const T* w, const T* b, const Tensor<T>& u,
                          std::vector<T>& col) {
    const int yh = g.up_dim(u.h), yw = g.up_dim(u.w);
    const std::size_t kk = static_cast<std::size_t>(g.cout) * g.k * g.k;
    const std::size_t p = static_cast<std::size_t>(u.h) * u.w;
    col.assign(kk * p, T(0));
    CMapM<T> wm(w, g.cin, static_cast<Eigen::Index>(kk));
    CMapM<T> um(u.data(), g.cin, static_cast<Eigen::Index>(p));
    MapM<T> cm(col.data(), static_cast<Eigen::Index>(kk), static_cast<Eigen::Index>(p));
    cm.noalias() = wm.transpose() * um;
    Tensor<T> y(g.cout, yh, yw);
    col2im_add(col, g.k, g.stride, g.pad, u.h, u.w, y);
    for (int co = 0; co < g.cout; ++co) {
        T* plane = y.data() + co * y.plane();
        const T bias = b[co];
        for (std::size_t i = 0; i < y.plane(); ++i) plane[i] += bias;
    }
    return y;
}

template <typename T>
Tensor<T> tconv2d_backward(const ConvGeom& g, const T* w, const Tensor<T>& u,
                           const Tensor<T>& dy, T* dw, T* db, bool need_du,
                           std::vector<T>& col) {
    const std::size_t kk = static_cast<std::size_t>(g.cout) * g.k * g.k;
    const std::size_t p = static_cast<std::size_t>(u.h) * u.w;
    im2col(dy, g.k, g.stride, g.pad, u.h, u.w, col);
    CMapM<T> cm(col.data(), static_cast<Eigen::Index>(kk), static_cast<Eigen::Index>(p));
    CMapM<T> um(u.data(), g.cin, static_cast<Eigen::Index>(p));
    MapM<T> dwm(dw, g.cin, static_cast<Eigen::Index>(kk));
    dwm.noalias() += um * cm.transpose();
    for (int co = 0; co < g.cout; ++co) {
        const T* plane = dy.data() + co * dy.plane();
        T acc = 0;
        for (std::size_t i = 0; i < dy.plane(); ++i) acc += plane[i];
        db[co] += acc;
    }

    Tensor<T> du;
    if (need_du) {
        du = Tensor<T>(g.cin, u.h, u.w);
        MapM<T> dum(du.data(), g.cin, static_cast<Eigen::Index>(p));
        CMapM<T> wm(w, g.cin, static_cast<Eigen::Index>(kk));
        dum.noalias() = wm * cm;
    }
    return du;
}

template <typename T>
void relu_inplace(Tensor<T>& t) {
    for (auto& x : t.v)
        if (x < T(0)) x = T(0);
}

// dy is masked using the post-activation values (y > 0 iff pre > 0).
template <typename T>
void relu_backward_inplace(const Tensor<T>& y, Tensor<T>& dy) {
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y.v[i] <= T(0)) dy.v[i] = T(0);
}

template <typename T>
void sigmoid_inplace(Tensor<T>& t) {
    for (auto& x : t.v) x = T(1) / (T(1) + std::exp(-x));
}

template <typename T>
void sigmoid_backward_inplace(const Tensor<T>& y, Tensor<T>& dy) {
    for (std::size_t i = 0; i < y.size(); ++i) dy.v[i] *= y.v[i] * (T(1) - y.v[i]);
}

}  // namespace vqad::nn
