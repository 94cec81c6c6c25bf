#include "vqad/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "vqad/errors.hpp"
#include "vqad/parallel.hpp"
#include "vqad/png_io.hpp"
#include "vqad/rng.hpp"

namespace vqad {

namespace fs = std::filesystem;

void validate(const SceneParams& p) {
    if (p.tile_side < 8) throw ConfigError("tile_side must be >= 8");
    if (!(p.wave_scale > 0)) throw ConfigError("wave_scale must be > 0");
    auto prob_ok = [](float v) { return v >= 0.0f && v <= 1.0f; };
    if (!prob_ok(p.glare_prob) || !prob_ok(p.foam_prob))
        throw ConfigError("probabilities must lie in [0, 1]");
    if (p.animal_count_min < 0 || p.animal_count_min > p.animal_count_max)
        throw ConfigError("animal count range invalid");
    if (p.animal_size_min < 1 || p.animal_size_min > p.animal_size_max ||
        p.animal_size_max > p.tile_side / 2)
        throw ConfigError("animal size range must lie in (0, tile_side/2]");
    if (!(p.foam_density >= 0)) throw ConfigError("foam_density must be >= 0");
}

namespace {

constexpr std::uint64_t kBaseStream = 0xA1;
constexpr std::uint64_t kGlareStream = 0xA2;
constexpr std::uint64_t kFoamStream = 0xA3;
constexpr std::uint64_t kBlobStream = 0xA4;

std::uint64_t tile_seed(const SceneParams& p, SplitTag split, std::uint64_t index) {
    return hash_mix(p.seed, static_cast<std::uint64_t>(split), index);
}

float smoothstep01(float t) { return t * t * (3.0f - 2.0f * t); }

// One value-noise octave: random lattice, smoothstep-bilinear interpolation.
void add_noise_octave(Grid<float>& gray, float spacing, float amplitude, Rng& rng) {
    const int gw = static_cast<int>(gray.w / spacing) + 2;
    const int gh = static_cast<int>(gray.h / spacing) + 2;
    std::vector<float> lattice(static_cast<std::size_t>(gw) * gh);
    for (auto& v : lattice) v = static_cast<float>(rng.uniform(-1.0, 1.0));

    const float inv = 1.0f / spacing;
    for (int y = 0; y < gray.h; ++y) {
        const float fy = y * inv;
        const int iy = static_cast<int>(fy);
        const float ty = smoothstep01(fy - iy);
        for (int x = 0; x < gray.w; ++x) {
            const float fx = x * inv;
            const int ix = static_cast<int>(fx);
            const float tx = smoothstep01(fx - ix);
            const float v00 = lattice[static_cast<std::size_t>(iy) * gw + ix];
            const float v01 = lattice[static_cast<std::size_t>(iy) * gw + ix + 1];
            const float v10 = lattice[static_cast<std::size_t>(iy + 1) * gw + ix];
            const float v11 = lattice[static_cast<std::size_t>(iy + 1) * gw + ix + 1];
            const float top = v00 + (v01 - v00) * tx;
            const float bot = v10 + (v11 - v10) * tx;
            gray.at(y, x) += amplitude * (top + (bot - top) * ty);
        }
    }
}

ImageTile render_sea(const SceneParams& p, std::uint64_t seed) {
    const int side = p.tile_side;
    Grid<float> gray(side, side, 0.5f);
    Rng base(hash_mix(seed, kBaseStream));
    add_noise_octave(gray, std::max(2.0f, p.wave_scale), 0.12f, base);
    add_noise_octave(gray, std::max(2.0f, p.wave_scale * 0.5f), 0.06f, base);

    // Slightly blue-tinted sea; offsets keep values strictly inside (0, 1).
    ImageTile tile(3, side, side);
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            const float g = gray.at(y, x);
            tile.at(0, y, x) = g - 0.04f;
            tile.at(1, y, x) = g + 0.01f;
            tile.at(2, y, x) = g + 0.05f;
        }
    }

    Rng glare(hash_mix(seed, kGlareStream));
    if (glare.uniform() < p.glare_prob && p.glare_strength > 0) {
        const float px = static_cast<float>(glare.uniform(0.0, side - 1.0));
        const float py = static_cast<float>(glare.uniform(0.0, side - 1.0));
        const float phi = static_cast<float>(glare.uniform(0.0, 3.14159265358979323846));
        const float nx = -std::sin(phi), ny = std::cos(phi);
        const float sigma = static_cast<float>(glare.uniform(1.5, 3.0));
        const float inv2s2 = 1.0f / (2.0f * sigma * sigma);
        for (int y = 0; y < side; ++y) {
            for (int x = 0; x < side; ++x) {
                const float d = (x - px) * nx + (y - py) * ny;
                const float add = p.glare_strength * std::exp(-d * d * inv2s2);
                if (add < 1e-4f) continue;
                for (int c = 0; c < 3; ++c)
                    tile.at(c, y, x) = std::min(1.0f, tile.at(c, y, x) + add);
            }
        }
    }

    Rng foam(hash_mix(seed, kFoamStream));
    if (foam.uniform() < p.foam_prob && p.foam_density > 0) {
        const int count = std::max(
            1, static_cast<int>(std::lround(p.foam_density * side * side)));
        for (int i = 0; i < count; ++i) {
            const int cx = static_cast<int>(foam.bounded(static_cast<std::uint64_t>(side)));
            const int cy = static_cast<int>(foam.bounded(static_cast<std::uint64_t>(side)));
            const int r = 1 + static_cast<int>(foam.bounded(2));
            const float bright = static_cast<float>(foam.uniform(0.25, 0.5));
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const int y = cy + dy, x = cx + dx;
                    if (y < 0 || y >= side || x < 0 || x >= side) continue;
                    const float fall =
                        1.0f - static_cast<float>(dy * dy + dx * dx) / static_cast<float>(r * r + 1);
                    if (fall <= 0) continue;
                    for (int c = 0; c < 3; ++c)
                        tile.at(c, y, x) = std::min(1.0f, tile.at(c, y, x) + bright * fall);
                }
            }
        }
    }
    return tile;
}

struct BlobRaster {
    BinaryMask support;   // rho <= 1
    Grid<float> weight;   // soft-edged blend field
    BoxI box;             // tight bounds of the support
    bool ok = false;
};

BlobRaster raster_blob(int side, double cx, double cy, double ax, double ay, double theta) {
    BlobRaster out;
    out.support = BinaryMask(side, side, 0);
    out.weight = Grid<float>(side, side, 0.0f);
    const double edge = 1.0 + 1.5 / std::sqrt(ax * ay);  // ~1.5 px soft band
    const double c = std::cos(theta), s = std::sin(theta);
    int min_x = side, min_y = side, max_x = -1, max_y = -1;
    const int reach = static_cast<int>(std::ceil(std::max(ax, ay) * edge)) + 1;
    const int y0 = std::max(0, static_cast<int>(cy) - reach);
    const int y1 = std::min(side - 1, static_cast<int>(cy) + reach);
    const int x0 = std::max(0, static_cast<int>(cx) - reach);
    const int x1 = std::min(side - 1, static_cast<int>(cx) + reach);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - cx, dy = y - cy;
            const double u = (dx * c + dy * s) / ax;
            const double v = (-dx * s + dy * c) / ay;
            const double rho = std::sqrt(u * u + v * v);
            if (rho >= edge) continue;
            float wgt;
            if (rho <= 1.0) {
                wgt = 1.0f;
                out.support.at(y, x) = 1;
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
            } else {
                wgt = smoothstep01(static_cast<float>((edge - rho) / (edge - 1.0)));
            }
            out.weight.at(y, x) = wgt;
        }
    }
    if (max_x < 0) return out;
    out.box = {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
    out.ok = true;
    return out;
}

bool boxes_overlap(const BoxI& a, const BoxI& b, int margin) {
    return a.x < b.x + b.w + margin && b.x < a.x + a.w + margin && a.y < b.y + b.h + margin &&
           b.y < a.y + a.h + margin;
}

}  // namespace

ImageTile gen_normal(const SceneParams& p, std::uint64_t index, SplitTag split) {
    validate(p);
    return render_sea(p, tile_seed(p, split, index));
}

LabeledTile gen_anomalous(const SceneParams& p, std::uint64_t index, SplitTag split) {
    validate(p);
    const std::uint64_t seed = tile_seed(p, split, index);
    LabeledTile out;
    out.tile = render_sea(p, seed);

    Rng rng(hash_mix(seed, kBlobStream));
    const int k = p.animal_count_min +
                  static_cast<int>(rng.bounded(
                      static_cast<std::uint64_t>(p.animal_count_max - p.animal_count_min + 1)));
    const int side = p.tile_side;
    for (int j = 0; j < k; ++j) {
        // The first blob always blends at full contrast; later ones may fade
        // as if deeper under the surface.
        const double depth = j == 0 ? 1.0 : rng.uniform(0.55, 1.0);
        for (int attempt = 0; attempt < 100; ++attempt) {
            const double ew = rng.uniform(p.animal_size_min, p.animal_size_max);
            const double eh = rng.uniform(p.animal_size_min, p.animal_size_max);
            const double ax = ew / 2.0, ay = eh / 2.0;
            const double theta = rng.uniform(0.0, 3.14159265358979323846);
            const double margin = std::max(ax, ay) + 3.0;
            if (2.0 * margin >= side - 1) break;
            const double cx = rng.uniform(margin, side - 1 - margin);
            const double cy = rng.uniform(margin, side - 1 - margin);

            BlobRaster blob = raster_blob(side, cx, cy, ax, ay, theta);
            if (!blob.ok) continue;
            bool clash = false;
            for (const BoxI& b : out.boxes)
                if (boxes_overlap(blob.box, b, 2)) {
                    clash = true;
                    break;
                }
            if (clash) continue;

            const float blend = p.animal_contrast * static_cast<float>(depth);
            for (int y = blob.box.y - 2; y < blob.box.y + blob.box.h + 2; ++y) {
                if (y < 0 || y >= side) continue;
                for (int x = blob.box.x - 2; x < blob.box.x + blob.box.w + 2; ++x) {
                    if (x < 0 || x >= side) continue;
                    const float wgt = blob.weight.at(y, x);
                    if (wgt == 0.0f) continue;
                    for (int c = 0; c < 3; ++c)
                        out.tile.at(c, y, x) =
                            std::clamp(out.tile.at(c, y, x) + blend * wgt, 0.0f, 1.0f);
                }
            }
            out.boxes.push_back(blob.box);
            out.supports.push_back(std::move(blob.support));
            break;  // next blob; exhausting the retries drops it
        }
    }
    return out;
}

Manifest gen_dataset(const SceneParams& p, const SplitCounts& counts, double anomalous_fraction,
                     const std::string& out_dir) {
    validate(p);
    if (counts.train < 0 || counts.val < 0 || counts.test < 0)
        throw ConfigError("split counts must be >= 0");
    if (anomalous_fraction < 0.0 || anomalous_fraction > 1.0)
        throw ConfigError("anomalous_fraction must lie in [0, 1]");

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw IoError("cannot create output directory: " + out_dir);

    struct Item {
        std::string name;
        SplitTag tag;
        std::string split;
        std::uint64_t index;
        bool anomalous;
    };
    std::vector<Item> items;
    char buf[64];
    for (int i = 0; i < counts.train; ++i) {
        std::snprintf(buf, sizeof(buf), "train_%05d.png", i);
        items.push_back({buf, SplitTag::train, "train", static_cast<std::uint64_t>(i), false});
    }
    auto add_mixed = [&](const char* split, SplitTag tag, int n) {
        const int n_anom = static_cast<int>(std::llround(anomalous_fraction * n));
        for (int i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof(buf), "%s_%05d.png", split, i);
            items.push_back({buf, tag, split, static_cast<std::uint64_t>(i), i < n_anom});
        }
    };
    add_mixed("val", SplitTag::val, counts.val);
    add_mixed("test", SplitTag::test, counts.test);

    Manifest m;
    m.records.resize(items.size());
    parallel_for(static_cast<int>(items.size()), [&](int i) {
        const Item& it = items[static_cast<std::size_t>(i)];
        ManifestRecord& rec = m.records[static_cast<std::size_t>(i)];
        rec.path = it.name;
        rec.split = it.split;
        const std::string path = (fs::path(out_dir) / it.name).string();
        if (it.anomalous) {
            LabeledTile lt = gen_anomalous(p, it.index, it.tag);
            rec.boxes = lt.boxes;
            write_tile_png(path, lt.tile);
        } else {
            write_tile_png(path, gen_normal(p, it.index, it.tag));
        }
    });

    save_manifest(m, (fs::path(out_dir) / "manifest.json").string());
    return m;
}

}  // namespace vqad
