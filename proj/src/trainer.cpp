#include "vqad/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "vqad/errors.hpp"
#include "vqad/parallel.hpp"
#include "vqad/rng.hpp"

namespace vqad {

namespace {

void validate_train_inputs(const std::vector<ImageTile>& tiles, const TrainConfig& cfg) {
    if (tiles.empty()) throw DataError("training dataset is empty");
    if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
    if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(cfg.learning_rate > 0)) throw ConfigError("learning_rate must be > 0");
    for (const auto& t : tiles)
        if (!t.same_shape(tiles.front())) throw ShapeError("training tiles differ in shape");
}

struct Adam {
    std::vector<float> m, v;
    double beta1_t = 1.0, beta2_t = 1.0;
    static constexpr float beta1 = 0.9f, beta2 = 0.999f, eps = 1e-8f;

    explicit Adam(std::size_t n) : m(n, 0.0f), v(n, 0.0f) {}

    void step(std::vector<float>& params, const std::vector<float>& grad, float lr) {
        beta1_t *= beta1;
        beta2_t *= beta2;
        const float c1 = static_cast<float>(1.0 / (1.0 - beta1_t));
        const float c2 = static_cast<float>(1.0 / (1.0 - beta2_t));
        for (std::size_t i = 0; i < params.size(); ++i) {
            const float g = grad[i];
            m[i] = beta1 * m[i] + (1.0f - beta1) * g;
            v[i] = beta2 * v[i] + (1.0f - beta2) * g * g;
            params[i] -= lr * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
        }
    }
};

}  // namespace

TrainResult train(const std::vector<ImageTile>& normal_tiles, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg) {
    validate_train_inputs(normal_tiles, train_cfg);
    Model model(model_cfg);
    Adam opt(model.param_count());

    const int n = static_cast<int>(normal_tiles.size());
    const int batches = (n + train_cfg.batch_size - 1) / train_cfg.batch_size;

    std::vector<int> order(normal_tiles.size());
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(hash_mix(train_cfg.seed, 0x53484652ull));  // shuffle stream tag

    TrainingLog log;
    log.reserve(static_cast<std::size_t>(train_cfg.epochs) * batches);

    std::vector<std::vector<float>> item_grads;
    std::vector<LossTerms<float>> item_loss;
    std::vector<float> grad(model.param_count(), 0.0f);

    int step = 0;
    for (int epoch = 0; epoch < train_cfg.epochs; ++epoch) {
        shuffle(order, shuffle_rng);
        for (int b = 0; b < n; b += train_cfg.batch_size) {
            const int nb = std::min(train_cfg.batch_size, n - b);
            if (static_cast<int>(item_grads.size()) < nb) {
                item_grads.resize(nb);
                item_loss.resize(nb);
            }
            parallel_for(nb, [&](int i) {
                auto& g = item_grads[static_cast<std::size_t>(i)];
                g.assign(model.param_count(), 0.0f);
                typename Model::Trace tr;
                item_loss[static_cast<std::size_t>(i)] =
                    model.forward_loss(normal_tiles[static_cast<std::size_t>(order[b + i])], tr);
                model.backward(tr, g);
            });

            // Fixed-order reduction keeps the run bit-reproducible regardless
            // of the worker count.
            std::fill(grad.begin(), grad.end(), 0.0f);
            const float inv = 1.0f / static_cast<float>(nb);
            for (int i = 0; i < nb; ++i) {
                const auto& g = item_grads[static_cast<std::size_t>(i)];
                for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += g[j];
            }
            for (auto& g : grad) g *= inv;

            LossTerms<float> mean{};
            for (int i = 0; i < nb; ++i) {
                mean.reconstruction += item_loss[static_cast<std::size_t>(i)].reconstruction;
                mean.codebook += item_loss[static_cast<std::size_t>(i)].codebook;
                mean.commitment += item_loss[static_cast<std::size_t>(i)].commitment;
                mean.total += item_loss[static_cast<std::size_t>(i)].total;
            }
            mean.reconstruction *= inv;
            mean.codebook *= inv;
            mean.commitment *= inv;
            mean.total *= inv;

            opt.step(model.params(), grad, train_cfg.learning_rate);
            ++step;
            log.push_back({step, mean.reconstruction, mean.codebook, mean.commitment, mean.total});
        }
    }
    return {std::move(model), std::move(log)};
}

double percentile_linear(std::vector<float> values, double q) {
    if (values.empty()) throw DataError("percentile of an empty population");
    if (!(q > 0.0) || q > 100.0) throw ConfigError("percentile must be in (0, 100]");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n == 1) return values[0];
    const double rank = q / 100.0 * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = rank - static_cast<double>(lo);
    return static_cast<double>(values[lo]) * (1.0 - frac) + static_cast<double>(values[hi]) * frac;
}

float normalizer_scale_from_residuals(const std::vector<float>& residuals, double q) {
    if (residuals.empty()) throw DataError("calibration residual population is empty");
    double scale = percentile_linear(residuals, q);
    if (scale <= 0.0) scale = *std::max_element(residuals.begin(), residuals.end());
    if (scale <= 0.0) scale = 1.0;
    return static_cast<float>(scale);
}

AmNormalizer calibrate_am(const Model& model, const std::vector<ImageTile>& normal_tiles,
                          double percentile_q) {
    if (normal_tiles.empty()) throw DataError("calibration dataset is empty");
    if (!(percentile_q > 0.0) || percentile_q > 100.0)
        throw ConfigError("calibration percentile must be in (0, 100]");

    std::vector<std::vector<float>> per_tile(normal_tiles.size());
    parallel_for(static_cast<int>(normal_tiles.size()), [&](int i) {
        auto q = model.quantize_latent(model.encode(normal_tiles[static_cast<std::size_t>(i)]));
        per_tile[static_cast<std::size_t>(i)] = std::move(q.residuals.v);
    });
    std::vector<float> all;
    for (const auto& r : per_tile) all.insert(all.end(), r.begin(), r.end());
    return {normalizer_scale_from_residuals(all, percentile_q),
            static_cast<float>(percentile_q)};
}

void write_training_log_csv(const std::string& path, const TrainingLog& log) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write training log: " + path);
    out << "step,rec,cb,com,total\n";
    for (const auto& row : log)
        out << row.step << ',' << row.reconstruction << ',' << row.codebook << ','
            << row.commitment << ',' << row.total << '\n';
    if (!out) throw IoError("failed writing training log: " + path);
}

}  // namespace vqad
