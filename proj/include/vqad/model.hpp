#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "vqad/errors.hpp"
#include "vqad/nn.hpp"
#include "vqad/rng.hpp"
#include "vqad/tensor.hpp"

namespace vqad {

struct ModelConfig {
    int in_channels = 3;
    int base_width = 32;
    int latent_dim = 32;
    int codebook_size = 256;
    int downsample_factor = 8;  // 2, 4 or 8
    float commitment_beta = 0.25f;
    std::uint64_t seed = 0;
};

inline void validate_config(const ModelConfig& c) {
    if (c.downsample_factor != 2 && c.downsample_factor != 4 && c.downsample_factor != 8)
        throw ConfigError("downsample_factor must be 2, 4 or 8");
    if (c.codebook_size < 2) throw ConfigError("codebook_size must be >= 2");
    if (c.latent_dim < 1) throw ConfigError("latent_dim must be >= 1");
    if (c.commitment_beta < 0) throw ConfigError("commitment_beta must be >= 0");
    if (c.in_channels < 1) throw ConfigError("in_channels must be >= 1");
    if (c.base_width < 1) throw ConfigError("base_width must be >= 1");
}

template <typename T>
struct Codebook {
    int size = 0, dim = 0;
    std::vector<T> v;  // size x dim, row-major

    Codebook() = default;
    Codebook(int size_, int dim_)
        : size(size_), dim(dim_), v(static_cast<std::size_t>(size_) * dim_, T(0)) {}

    T* row(int m) { return v.data() + static_cast<std::size_t>(m) * dim; }
    const T* row(int m) const { return v.data() + static_cast<std::size_t>(m) * dim; }
};

template <typename T>
struct Quantization {
    int h = 0, w = 0, dim = 0;
    Grid<int> indices;   // 0-based codebook rows
    Tensor<T> quantized; // (dim, h, w); rows are exact codebook copies
    Grid<T> residuals;   // per-cell L2 distance to the chosen code
};

template <typename T>
struct LossTerms {
    T reconstruction{}, codebook{}, commitment{}, total{};
};

struct TensorInfo {
    std::string name;
    std::vector<int> shape;
    std::size_t offset = 0;  // element offset into the flat parameter buffer
    std::size_t count = 0;
};

// Nearest code per cell; ties go to the smallest index. Distances are plain
// float accumulations in ascending coordinate order so that an exhaustive
// rescan reproduces them bit for bit.
template <typename T>
Quantization<T> quantize_cells(const Tensor<T>& z_e, const T* codebook, int m_codes) {
    const int d = z_e.c, h = z_e.h, w = z_e.w;
    Quantization<T> q;
    q.h = h;
    q.w = w;
    q.dim = d;
    q.indices = Grid<int>(h, w);
    q.residuals = Grid<T>(h, w);
    q.quantized = Tensor<T>(d, h, w);
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    std::vector<T> cell(d);
    for (std::size_t p = 0; p < plane; ++p) {
        for (int k = 0; k < d; ++k) cell[k] = z_e.v[k * plane + p];
        int best = 0;
        T best_d2 = std::numeric_limits<T>::max();
        for (int m = 0; m < m_codes; ++m) {
            const T* e = codebook + static_cast<std::size_t>(m) * d;
            T acc = 0;
            for (int k = 0; k < d; ++k) {
                const T diff = cell[k] - e[k];
                acc += diff * diff;
            }
            if (acc < best_d2) {
                best_d2 = acc;
                best = m;
            }
        }
        q.indices.v[p] = best;
        q.residuals.v[p] = std::sqrt(best_d2);
        const T* e = codebook + static_cast<std::size_t>(best) * d;
        for (int k = 0; k < d; ++k) q.quantized.v[k * plane + p] = e[k];
    }
    return q;
}

template <typename T>
Quantization<T> quantize(const Tensor<T>& z_e, const Codebook<T>& cb) {
    if (z_e.c != cb.dim) throw ShapeError("latent dim does not match codebook dim");
    return quantize_cells(z_e, cb.v.data(), cb.size);
}

// Loss values only (no gradients): mean squared reconstruction error plus the
// codebook and commitment terms, both means over latent cells of the squared
// cell distance. The two latent terms coincide as values and differ only in
// which side the gradient stops at.
template <typename T>
LossTerms<T> vqvae_loss(const Tensor<T>& tile, const Tensor<T>& recon, const Tensor<T>& z_e,
                        const Quantization<T>& q, T beta) {
    if (!tile.same_shape(recon)) throw ShapeError("tile/recon shape mismatch");
    if (!z_e.same_shape(q.quantized)) throw ShapeError("latent/quantized shape mismatch");
    double rec = 0;
    for (std::size_t i = 0; i < tile.size(); ++i) {
        const double diff = static_cast<double>(recon.v[i]) - static_cast<double>(tile.v[i]);
        rec += diff * diff;
    }
    rec /= static_cast<double>(tile.size());
    double lat = 0;
    for (std::size_t i = 0; i < z_e.size(); ++i) {
        const double diff = static_cast<double>(z_e.v[i]) - static_cast<double>(q.quantized.v[i]);
        lat += diff * diff;
    }
    lat /= static_cast<double>(q.indices.size());  // mean over cells of squared L2 norms
    LossTerms<T> out;
    out.reconstruction = static_cast<T>(rec);
    out.codebook = static_cast<T>(lat);
    out.commitment = static_cast<T>(lat);
    out.total = out.reconstruction + out.codebook + beta * out.commitment;
    return out;
}

// VQ-VAE with log2(f) stride-2 conv blocks per side, a learned codebook and a
// sigmoid output. All parameters live in one flat buffer described by a
// tensor directory, which the optimizer and the checkpoint format share.
template <typename T>
class VqVae {
  public:
    explicit VqVae(const ModelConfig& cfg) : cfg_(cfg) {
        validate_config(cfg);
        build_layout();
        init_params();
    }

    const ModelConfig& config() const { return cfg_; }
    std::vector<T>& params() { return params_; }
    const std::vector<T>& params() const { return params_; }
    const std::vector<TensorInfo>& directory() const { return dir_; }
    std::size_t param_count() const { return params_.size(); }

    const T* codebook_data() const { return params_.data() + cb_off_; }
    Codebook<T> codebook() const {
        Codebook<T> cb(cfg_.codebook_size, cfg_.latent_dim);
        std::copy(codebook_data(), codebook_data() + cb.v.size(), cb.v.begin());
        return cb;
    }

    Tensor<T> encode(const Tensor<T>& tile) const {
        check_tile(tile);
        std::vector<T> col;
        Tensor<T> act = tile;
        for (std::size_t l = 0; l < enc_.size(); ++l) {
            act = nn::conv2d_forward(enc_[l], pw(enc_w_[l]), pw(enc_b_[l]), act, col);
            if (l + 1 < enc_.size()) nn::relu_inplace(act);
        }
        return act;
    }

    Quantization<T> quantize_latent(const Tensor<T>& z_e) const {
        if (z_e.c != cfg_.latent_dim) throw ShapeError("latent dim mismatch");
        return quantize_cells(z_e, codebook_data(), cfg_.codebook_size);
    }

    Tensor<T> decode(const Quantization<T>& q) const {
        if (q.dim != cfg_.latent_dim) throw ShapeError("quantization dim mismatch");
        return decode_field(q.quantized);
    }

    std::pair<Tensor<T>, Quantization<T>> reconstruct(const Tensor<T>& tile) const {
        Quantization<T> q = quantize_latent(encode(tile));
        Tensor<T> recon = decode_field(q.quantized);
        return {std::move(recon), std::move(q)};
    }

    // Forward activations retained for the backward pass.
    struct Trace {
        Tensor<T> input;
        std::vector<Tensor<T>> enc_acts;  // post-activation output of each encoder layer
        Quantization<T> q;
        std::vector<Tensor<T>> dec_acts;  // post-activation output of each decoder layer
        LossTerms<T> loss;
    };

    LossTerms<T> forward_loss(const Tensor<T>& tile, Trace& tr) const {
        check_tile(tile);
        std::vector<T> col;
        tr.input = tile;
        tr.enc_acts.clear();
        tr.dec_acts.clear();
        Tensor<T> act = tile;
        for (std::size_t l = 0; l < enc_.size(); ++l) {
            act = nn::conv2d_forward(enc_[l], pw(enc_w_[l]), pw(enc_b_[l]), act, col);
            if (l + 1 < enc_.size()) nn::relu_inplace(act);
            tr.enc_acts.push_back(act);
        }
        tr.q = quantize_cells(act, codebook_data(), cfg_.codebook_size);
        act = tr.q.quantized;  // straight-through: decoder sees z_q
        for (std::size_t l = 0; l < dec_.size(); ++l) {
            act = nn::tconv2d_forward(dec_[l], pw(dec_w_[l]), pw(dec_b_[l]), act, col);
            if (l + 1 < dec_.size())
                nn::relu_inplace(act);
            else
                nn::sigmoid_inplace(act);
            tr.dec_acts.push_back(act);
        }
        tr.loss = vqvae_loss(tile, tr.dec_acts.back(), tr.enc_acts.back(), tr.q,
                             static_cast<T>(cfg_.commitment_beta));
        return tr.loss;
    }

    // Adds the gradient of the total loss into grad (size param_count()).
    // The reconstruction gradient is copied through the quantizer onto z_e;
    // the codebook receives gradient from the codebook term only.
    void backward(const Trace& tr, std::vector<T>& grad) const {
        if (grad.size() != params_.size()) throw ShapeError("gradient buffer size mismatch");
        std::vector<T> col, col2;
        const Tensor<T>& z_e = tr.enc_acts.back();
        const Tensor<T>& recon = tr.dec_acts.back();
        const std::size_t n_pix = tr.input.size();
        const std::size_t n_cells = tr.q.indices.size();

        Tensor<T> d(recon.c, recon.h, recon.w);
        const T rec_scale = T(2) / static_cast<T>(n_pix);
        for (std::size_t i = 0; i < d.size(); ++i)
            d.v[i] = rec_scale * (recon.v[i] - tr.input.v[i]);
        nn::sigmoid_backward_inplace(recon, d);

        for (int l = static_cast<int>(dec_.size()) - 1; l >= 0; --l) {
            const Tensor<T>& in =
                (l == 0) ? tr.q.quantized : tr.dec_acts[static_cast<std::size_t>(l) - 1];
            d = nn::tconv2d_backward(dec_[static_cast<std::size_t>(l)], pw(dec_w_[l]), in, d,
                                     gw(grad, dec_w_[l]), gw(grad, dec_b_[l]), true, col);
            if (l > 0) nn::relu_backward_inplace(in, d);
        }

        // d now holds the reconstruction gradient at z_q; add the commitment
        // pull toward the codes, then push through the encoder.
        const T com_scale =
            T(2) * static_cast<T>(cfg_.commitment_beta) / static_cast<T>(n_cells);
        for (std::size_t i = 0; i < d.size(); ++i)
            d.v[i] += com_scale * (z_e.v[i] - tr.q.quantized.v[i]);

        // Codebook gradient from the codebook term.
        const T cb_scale = T(2) / static_cast<T>(n_cells);
        const std::size_t plane = static_cast<std::size_t>(tr.q.h) * tr.q.w;
        T* dcb = grad.data() + cb_off_;
        for (std::size_t p = 0; p < plane; ++p) {
            T* row = dcb + static_cast<std::size_t>(tr.q.indices.v[p]) * cfg_.latent_dim;
            for (int k = 0; k < cfg_.latent_dim; ++k)
                row[k] += cb_scale * (tr.q.quantized.v[k * plane + p] - z_e.v[k * plane + p]);
        }

        for (int l = static_cast<int>(enc_.size()) - 1; l >= 0; --l) {
            const Tensor<T>& in =
                (l == 0) ? tr.input : tr.enc_acts[static_cast<std::size_t>(l) - 1];
            if (static_cast<std::size_t>(l) + 1 < enc_.size())
                nn::relu_backward_inplace(tr.enc_acts[static_cast<std::size_t>(l)], d);
            d = nn::conv2d_backward(enc_[static_cast<std::size_t>(l)], pw(enc_w_[l]), in, d,
                                    gw(grad, enc_w_[l]), gw(grad, enc_b_[l]), l > 0, col, col2);
        }
    }

    int latent_side(int image_side) const { return image_side / cfg_.downsample_factor; }

  private:
    static int depth_for(int factor) { return factor == 2 ? 1 : factor == 4 ? 2 : 3; }

    const T* pw(std::size_t off) const { return params_.data() + off; }
    static T* gw(std::vector<T>& grad, std::size_t off) { return grad.data() + off; }

    void check_tile(const Tensor<T>& tile) const {
        if (tile.c != cfg_.in_channels) throw ShapeError("tile channel count mismatch");
        if (tile.h <= 0 || tile.w <= 0) throw ShapeError("empty tile");
        if (tile.h % cfg_.downsample_factor != 0 || tile.w % cfg_.downsample_factor != 0)
            throw ShapeError("tile side not divisible by the downsample factor");
    }

    Tensor<T> decode_field(const Tensor<T>& z_q) const {
        std::vector<T> col;
        Tensor<T> act = z_q;
        for (std::size_t l = 0; l < dec_.size(); ++l) {
            act = nn::tconv2d_forward(dec_[l], pw(dec_w_[l]), pw(dec_b_[l]), act, col);
            if (l + 1 < dec_.size())
                nn::relu_inplace(act);
            else
                nn::sigmoid_inplace(act);
        }
        return act;
    }

    void build_layout() {
        const int depth = depth_for(cfg_.downsample_factor);
        std::vector<int> widths;  // channel counts between blocks, encoder order
        widths.push_back(cfg_.in_channels);
        for (int i = 0; i < depth - 1; ++i) widths.push_back(cfg_.base_width << i);
        widths.push_back(cfg_.latent_dim);

        std::size_t off = 0;
        auto add_tensor = [&](const std::string& name, std::vector<int> shape) {
            std::size_t count = 1;
            for (int s : shape) count *= static_cast<std::size_t>(s);
            dir_.push_back({name, std::move(shape), off, count});
            off += count;
            return dir_.back().offset;
        };

        for (int l = 0; l < depth; ++l) {
            nn::ConvGeom g{widths[l], widths[l + 1], 4, 2, 1};
            enc_.push_back(g);
            enc_w_.push_back(add_tensor("enc" + std::to_string(l) + ".weight",
                                        {g.cout, g.cin * g.k * g.k}));
            enc_b_.push_back(add_tensor("enc" + std::to_string(l) + ".bias", {g.cout}));
        }
        for (int l = 0; l < depth; ++l) {
            nn::ConvGeom g{widths[depth - l], widths[depth - l - 1], 4, 2, 1};
            dec_.push_back(g);
            dec_w_.push_back(add_tensor("dec" + std::to_string(l) + ".weight",
                                        {g.cin, g.cout * g.k * g.k}));
            dec_b_.push_back(add_tensor("dec" + std::to_string(l) + ".bias", {g.cout}));
        }
        cb_off_ = add_tensor("codebook", {cfg_.codebook_size, cfg_.latent_dim});
        params_.assign(off, T(0));
    }

    void init_params() {
        Rng rng(cfg_.seed);
        for (std::size_t l = 0; l < enc_.size(); ++l) {
            const T bound = static_cast<T>(
                std::sqrt(6.0 / (static_cast<double>(enc_[l].cin) * enc_[l].k * enc_[l].k)));
            fill_uniform(enc_w_[l], enc_[l].weight_count(), bound, rng);
        }
        for (std::size_t l = 0; l < dec_.size(); ++l) {
            const T bound = static_cast<T>(
                std::sqrt(6.0 / (static_cast<double>(dec_[l].cin) * dec_[l].k * dec_[l].k)));
            fill_uniform(dec_w_[l], dec_[l].weight_count(), bound, rng);
        }
        const T cb_bound = T(1) / static_cast<T>(cfg_.codebook_size);
        const std::size_t cb_count =
            static_cast<std::size_t>(cfg_.codebook_size) * cfg_.latent_dim;
        fill_uniform(cb_off_, cb_count, cb_bound, rng);
        dedup_codebook(rng, cb_bound);
    }

    void fill_uniform(std::size_t off, std::size_t count, T bound, Rng& rng) {
        for (std::size_t i = 0; i < count; ++i)
            params_[off + i] = static_cast<T>(rng.uniform(-static_cast<double>(bound),
                                                          static_cast<double>(bound)));
    }

    // Redraw any codebook row that collides bit-for-bit with an earlier one.
    void dedup_codebook(Rng& rng, T bound) {
        const int m = cfg_.codebook_size, d = cfg_.latent_dim;
        auto row = [&](int i) { return params_.data() + cb_off_ + static_cast<std::size_t>(i) * d; };
        for (int i = 1; i < m; ++i) {
            for (bool collided = true; collided;) {
                collided = false;
                for (int j = 0; j < i && !collided; ++j)
                    collided = std::equal(row(i), row(i) + d, row(j));
                if (collided)
                    for (int k = 0; k < d; ++k)
                        row(i)[k] = static_cast<T>(rng.uniform(-static_cast<double>(bound),
                                                               static_cast<double>(bound)));
            }
        }
    }

    ModelConfig cfg_;
    std::vector<nn::ConvGeom> enc_, dec_;
    std::vector<std::size_t> enc_w_, enc_b_, dec_w_, dec_b_;
    std::size_t cb_off_ = 0;
    std::vector<T> params_;
    std::vector<TensorInfo> dir_;
};

using Model = VqVae<float>;

}  // namespace vqad
