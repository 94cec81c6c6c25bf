#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vqad/model.hpp"
#include "vqad/tensor.hpp"

namespace vqad {

struct TrainConfig {
    int epochs = 12;
    int batch_size = 32;
    float learning_rate = 2e-4f;
    std::uint64_t seed = 0;
    std::string checkpoint_path;  // consumed by the CLI layer
    int log_every = 50;           // progress print cadence; the log itself keeps every step
};

struct TrainStepLog {
    int step = 0;
    float reconstruction = 0, codebook = 0, commitment = 0, total = 0;
};

using TrainingLog = std::vector<TrainStepLog>;

struct TrainResult {
    Model model;
    TrainingLog log;
};

// Normal-only training: the API takes tiles and nothing else, so no anomaly
// annotation can reach the optimizer. Deterministic for a fixed seed and
// dataset order on a given platform.
TrainResult train(const std::vector<ImageTile>& normal_tiles, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg);

// Normalization of raw quantization residuals into comparable alignment
// scores: scale is a high percentile of the residuals seen on normal data.
struct AmNormalizer {
    float scale = 1.0f;
    float percentile_q = 99.0f;
};

// Percentile with linear interpolation between order statistics
// (rank = q/100 * (n-1)); q in (0, 100].
double percentile_linear(std::vector<float> values, double q);

// Percentile-with-fallback rule applied to a residual population: the q-th
// percentile; if that is 0, the maximum; if everything is 0, 1.0.
float normalizer_scale_from_residuals(const std::vector<float>& residuals, double q);

AmNormalizer calibrate_am(const Model& model, const std::vector<ImageTile>& normal_tiles,
                          double percentile_q);

void write_training_log_csv(const std::string& path, const TrainingLog& log);

}  // namespace vqad
