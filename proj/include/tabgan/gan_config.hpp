#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "tabgan/errors.hpp"

namespace tabgan {

// Training hyperparameters. The slope, loss, optimizer and learning-rate
// values are fixed by the experiment setup; the rest are project defaults and
// all of them can be overridden.
struct GanConfig {
    std::size_t noise_dim = 128;
    std::size_t gen_hidden = 256;
    std::size_t disc_hidden = 256;
    double gen_slope = 0.8;
    double disc_slope = 0.1;
    double lr = 0.0001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t batch_size = 512;
    std::size_t epochs = 50;
    std::size_t disc_steps_per_gen_step = 1;
    std::uint64_t seed = 1;

    void validate() const {
        if (noise_dim < 1 || gen_hidden < 1 || disc_hidden < 1 || batch_size < 1 || epochs < 1 ||
            disc_steps_per_gen_step < 1) {
            throw ConfigError("GanConfig: all counts must be >= 1");
        }
        if (lr <= 0.0) throw ConfigError("GanConfig: lr must be positive");
        if (gen_slope <= 0.0 || gen_slope > 1.0 || disc_slope <= 0.0 || disc_slope > 1.0) {
            throw ConfigError("GanConfig: slopes must be in (0, 1]");
        }
    }
};

inline nlohmann::json gan_config_to_json(const GanConfig& c) {
    return {{"noise_dim", c.noise_dim},
            {"gen_hidden", c.gen_hidden},
            {"disc_hidden", c.disc_hidden},
            {"gen_slope", c.gen_slope},
            {"disc_slope", c.disc_slope},
            {"lr", c.lr},
            {"beta1", c.beta1},
            {"beta2", c.beta2},
            {"epsilon", c.epsilon},
            {"batch_size", c.batch_size},
            {"epochs", c.epochs},
            {"disc_steps_per_gen_step", c.disc_steps_per_gen_step},
            {"seed", c.seed}};
}

// Applies the keys of `j` onto `base`; unknown keys are rejected.
inline GanConfig gan_config_from_json(const nlohmann::json& j, GanConfig base = {}) {
    if (!j.is_object()) throw ConfigError("GanConfig JSON: expected an object");
    for (const auto& [key, value] : j.items()) {
        if (key == "noise_dim") base.noise_dim = value.get<std::size_t>();
        else if (key == "gen_hidden") base.gen_hidden = value.get<std::size_t>();
        else if (key == "disc_hidden") base.disc_hidden = value.get<std::size_t>();
        else if (key == "gen_slope") base.gen_slope = value.get<double>();
        else if (key == "disc_slope") base.disc_slope = value.get<double>();
        else if (key == "lr") base.lr = value.get<double>();
        else if (key == "beta1") base.beta1 = value.get<double>();
        else if (key == "beta2") base.beta2 = value.get<double>();
        else if (key == "epsilon") base.epsilon = value.get<double>();
        else if (key == "batch_size") base.batch_size = value.get<std::size_t>();
        else if (key == "epochs") base.epochs = value.get<std::size_t>();
        else if (key == "disc_steps_per_gen_step") base.disc_steps_per_gen_step = value.get<std::size_t>();
        else if (key == "seed") base.seed = value.get<std::uint64_t>();
        else throw ConfigError("GanConfig JSON: unknown key '" + key + "'");
    }
    base.validate();
    return base;
}

}  // namespace tabgan
