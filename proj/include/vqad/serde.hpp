#pragma once

#include <json.hpp>

#include "vqad/model.hpp"
#include "vqad/synthgen.hpp"
#include "vqad/trainer.hpp"

namespace vqad {

inline void to_json(nlohmann::json& j, const ModelConfig& c) {
    j = {{"in_channels", c.in_channels},
         {"base_width", c.base_width},
         {"latent_dim", c.latent_dim},
         {"codebook_size", c.codebook_size},
         {"downsample_factor", c.downsample_factor},
         {"commitment_beta", c.commitment_beta},
         {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, ModelConfig& c) {
    c.in_channels = j.value("in_channels", c.in_channels);
    c.base_width = j.value("base_width", c.base_width);
    c.latent_dim = j.value("latent_dim", c.latent_dim);
    c.codebook_size = j.value("codebook_size", c.codebook_size);
    c.downsample_factor = j.value("downsample_factor", c.downsample_factor);
    c.commitment_beta = j.value("commitment_beta", c.commitment_beta);
    c.seed = j.value("seed", c.seed);
}

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
    j = {{"epochs", c.epochs},
         {"batch_size", c.batch_size},
         {"learning_rate", c.learning_rate},
         {"seed", c.seed},
         {"log_every", c.log_every}};
}

inline void from_json(const nlohmann::json& j, TrainConfig& c) {
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.seed = j.value("seed", c.seed);
    c.log_every = j.value("log_every", c.log_every);
}

inline void to_json(nlohmann::json& j, const AmNormalizer& n) {
    j = {{"scale", n.scale}, {"percentile_q", n.percentile_q}};
}

inline void from_json(const nlohmann::json& j, AmNormalizer& n) {
    n.scale = j.at("scale").get<float>();
    n.percentile_q = j.value("percentile_q", n.percentile_q);
}

inline void to_json(nlohmann::json& j, const SceneParams& p) {
    j = {{"tile_side", p.tile_side},
         {"wave_scale", p.wave_scale},
         {"glare_prob", p.glare_prob},
         {"foam_prob", p.foam_prob},
         {"glare_strength", p.glare_strength},
         {"foam_density", p.foam_density},
         {"animal_count_min", p.animal_count_min},
         {"animal_count_max", p.animal_count_max},
         {"animal_size_min", p.animal_size_min},
         {"animal_size_max", p.animal_size_max},
         {"animal_contrast", p.animal_contrast},
         {"seed", p.seed}};
}

inline void from_json(const nlohmann::json& j, SceneParams& p) {
    p.tile_side = j.value("tile_side", p.tile_side);
    p.wave_scale = j.value("wave_scale", p.wave_scale);
    p.glare_prob = j.value("glare_prob", p.glare_prob);
    p.foam_prob = j.value("foam_prob", p.foam_prob);
    p.glare_strength = j.value("glare_strength", p.glare_strength);
    p.foam_density = j.value("foam_density", p.foam_density);
    p.animal_count_min = j.value("animal_count_min", p.animal_count_min);
    p.animal_count_max = j.value("animal_count_max", p.animal_count_max);
    p.animal_size_min = j.value("animal_size_min", p.animal_size_min);
    p.animal_size_max = j.value("animal_size_max", p.animal_size_max);
    p.animal_contrast = j.value("animal_contrast", p.animal_contrast);
    p.seed = j.value("seed", p.seed);
}

}  // namespace vqad
