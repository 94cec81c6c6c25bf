#include "vqad/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "vqad/errors.hpp"

namespace vqad {

SsimParams SsimParams::for_dynamic_range(float range) {
    SsimParams p;
    p.dynamic_range = range;
    p.c1 = (0.01f * range) * (0.01f * range);
    p.c2 = (0.03f * range) * (0.03f * range);
    return p;
}

void validate(const SsimParams& p) {
    if (p.window_side < 3 || p.window_side % 2 == 0)
        throw ConfigError("ssim window side must be odd and >= 3");
    if (!(p.gaussian_sigma > 0)) throw ConfigError("ssim sigma must be > 0");
    if (!(p.dynamic_range > 0)) throw ConfigError("ssim dynamic range must be > 0");
    if (!(p.c1 > 0) || !(p.c2 > 0)) throw ConfigError("ssim stabilizers must be > 0");
}

namespace {

std::vector<float> gaussian_kernel(int side, float sigma) {
    std::vector<float> k(static_cast<std::size_t>(side));
    const int half = side / 2;
    double sum = 0;
    for (int i = 0; i < side; ++i) {
        const double d = i - half;
        k[static_cast<std::size_t>(i)] =
            static_cast<float>(std::exp(-d * d / (2.0 * sigma * sigma)));
        sum += k[static_cast<std::size_t>(i)];
    }
    for (auto& v : k) v = static_cast<float>(v / sum);
    return k;
}

// Mirror without repeating the edge sample (…, 2, 1 | 0, 1, 2, …).
int reflect_index(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * (n - 1) - i;
    }
    return i;
}

// Separable filtering of a plane with reflected borders.
void filter_plane(const float* src, int h, int w, const std::vector<float>& kernel,
                  std::vector<float>& tmp, float* dst) {
    const int half = static_cast<int>(kernel.size()) / 2;
    tmp.resize(static_cast<std::size_t>(h) * w);
    for (int y = 0; y < h; ++y) {
        const float* row = src + static_cast<std::size_t>(y) * w;
        float* trow = tmp.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            float acc = 0;
            for (int t = -half; t <= half; ++t)
                acc += kernel[static_cast<std::size_t>(t + half)] * row[reflect_index(x + t, w)];
            trow[x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        float* drow = dst + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            float acc = 0;
            for (int t = -half; t <= half; ++t)
                acc += kernel[static_cast<std::size_t>(t + half)] *
                       tmp[static_cast<std::size_t>(reflect_index(y + t, h)) * w + x];
            drow[x] = acc;
        }
    }
}

}  // namespace

MapF ssim_map(const ImageTile& x, const ImageTile& y, const SsimParams& p) {
    if (!x.same_shape(y)) throw ShapeError("ssim_map: tile shapes differ");
    validate(p);
    const int h = x.h, w = x.w;
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    const auto kernel = gaussian_kernel(p.window_side, p.gaussian_sigma);

    std::vector<float> tmp, prod(plane);
    std::vector<float> mx(plane), my(plane), mxx(plane), myy(plane), mxy(plane);
    MapF acc(h, w, 0.0f);

    for (int ci = 0; ci < x.c; ++ci) {
        const float* xp = x.data() + ci * plane;
        const float* yp = y.data() + ci * plane;
        filter_plane(xp, h, w, kernel, tmp, mx.data());
        filter_plane(yp, h, w, kernel, tmp, my.data());
        for (std::size_t i = 0; i < plane; ++i) prod[i] = xp[i] * xp[i];
        filter_plane(prod.data(), h, w, kernel, tmp, mxx.data());
        for (std::size_t i = 0; i < plane; ++i) prod[i] = yp[i] * yp[i];
        filter_plane(prod.data(), h, w, kernel, tmp, myy.data());
        for (std::size_t i = 0; i < plane; ++i) prod[i] = xp[i] * yp[i];
        filter_plane(prod.data(), h, w, kernel, tmp, mxy.data());

        for (std::size_t i = 0; i < plane; ++i) {
            const float vx = mxx[i] - mx[i] * mx[i];
            const float vy = myy[i] - my[i] * my[i];
            const float cxy = mxy[i] - mx[i] * my[i];
            const float num = (2.0f * mx[i] * my[i] + p.c1) * (2.0f * cxy + p.c2);
            const float den = (mx[i] * mx[i] + my[i] * my[i] + p.c1) * (vx + vy + p.c2);
            acc.v[i] += num / den;
        }
    }

    const float inv_c = 1.0f / static_cast<float>(x.c);
    for (auto& v : acc.v) v = std::clamp((1.0f - v * inv_c) * 0.5f, 0.0f, 1.0f);
    return acc;
}

MapF alignment_field(const Quantization<float>& q, const AmNormalizer& norm) {
    if (!(norm.scale > 0)) throw ConfigError("alignment normalizer scale must be > 0");
    MapF out(q.h, q.w);
    const float inv = 1.0f / norm.scale;
    for (std::size_t i = 0; i < out.size(); ++i) out.v[i] = q.residuals.v[i] * inv;
    return out;
}

MapF dilate_gray(const MapF& m, int radius) {
    if (radius < 0) throw ConfigError("dilation radius must be >= 0");
    if (radius == 0) return m;
    std::vector<std::pair<int, int>> disk;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dy * dy + dx * dx <= radius * radius) disk.emplace_back(dy, dx);

    MapF out(m.h, m.w);
    for (int y = 0; y < m.h; ++y) {
        for (int x = 0; x < m.w; ++x) {
            float best = -std::numeric_limits<float>::infinity();
            for (const auto& [dy, dx] : disk) {
                const int sy = y + dy, sx = x + dx;
                if (sy < 0 || sy >= m.h || sx < 0 || sx >= m.w) continue;
                best = std::max(best, m.at(sy, sx));
            }
            out.at(y, x) = best;
        }
    }
    return out;
}

MapF upsample_alignment(const MapF& am_latent, int factor, int selem_radius) {
    if (factor <= 0) throw ConfigError("upsampling factor must be > 0");
    MapF up(am_latent.h * factor, am_latent.w * factor);
    for (int y = 0; y < up.h; ++y)
        for (int x = 0; x < up.w; ++x) up.at(y, x) = am_latent.at(y / factor, x / factor);
    return dilate_gray(up, selem_radius);
}

namespace {

void minmax_normalize(MapF& m) {
    const auto [lo, hi] = std::minmax_element(m.v.begin(), m.v.end());
    if (!(*hi > *lo)) {
        std::fill(m.v.begin(), m.v.end(), 0.0f);
        return;
    }
    const float inv = 1.0f / (*hi - *lo);
    const float base = *lo;
    for (auto& v : m.v) v = (v - base) * inv;
}

}  // namespace

MapF fuse_pixelwise(const MapF& sm, const MapF& am) {
    require_same_shape(sm, am, "fuse_pixelwise");
    MapF a = sm, b = am;
    minmax_normalize(a);
    minmax_normalize(b);
    for (std::size_t i = 0; i < a.size(); ++i) a.v[i] *= b.v[i];
    return a;
}

}  // namespace vqad
