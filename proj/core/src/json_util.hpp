#pragma once

// nlohmann/json adapters for the configuration structs. Private to core.

#include "liit/dense_net.hpp"
#include "liit/error.hpp"
#include "liit/evaluation.hpp"
#include "liit/lad.hpp"
#include "liit/sampler.hpp"
#include "liit/trainer.hpp"

#include <json.hpp>

namespace liit {

inline void to_json(nlohmann::json& j, const NetConfig& c) {
    j = nlohmann::json{{"input_dim", c.input_dim},     {"hidden1", c.hidden1},
                       {"hidden2", c.hidden2},         {"output_dim", c.output_dim},
                       {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
                       {"max_epochs", c.max_epochs},   {"patience", c.patience},
                       {"loss_floor", c.loss_floor},   {"seed", c.seed},
                       {"adam_beta1", c.adam_beta1},   {"adam_beta2", c.adam_beta2},
                       {"adam_epsilon", c.adam_epsilon}};
}

inline void to_json(nlohmann::ordered_json& j, const NetConfig& c) {
    nlohmann::json tmp;
    to_json(tmp, c);
    j = nlohmann::ordered_json::parse(tmp.dump());
}

/// Missing keys keep their defaults.
inline void from_json(const nlohmann::json& j, NetConfig& c) {
    c.input_dim = j.value("input_dim", c.input_dim);
    c.hidden1 = j.value("hidden1", c.hidden1);
    c.hidden2 = j.value("hidden2", c.hidden2);
    c.output_dim = j.value("output_dim", c.output_dim);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.patience = j.value("patience", c.patience);
    c.loss_floor = j.value("loss_floor", c.loss_floor);
    c.seed = j.value("seed", c.seed);
    c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
    c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
    c.adam_epsilon = j.value("adam_epsilon", c.adam_epsilon);
}

inline void to_json(nlohmann::json& j, const LadConfig& c) {
    j = nlohmann::json{{"n_iter", c.n_iter},
                       {"initial_threshold", c.initial_threshold},
                       {"quantile_level", c.quantile_level},
                       {"variance_floor", c.variance_floor},
                       {"divisor", to_string(c.divisor)},
                       {"scope", to_string(c.scope)}};
}

inline void from_json(const nlohmann::json& j, LadConfig& c) {
    c.n_iter = j.value("n_iter", c.n_iter);
    c.initial_threshold = j.value("initial_threshold", c.initial_threshold);
    c.quantile_level = j.value("quantile_level", c.quantile_level);
    c.variance_floor = j.value("variance_floor", c.variance_floor);
    if (j.contains("divisor")) c.divisor = parse_divisor(j.at("divisor").get<std::string>());
    if (j.contains("scope")) c.scope = parse_scope(j.at("scope").get<std::string>());
}

inline void to_json(nlohmann::json& j, const LiitConfig& c) {
    j = nlohmann::json{{"iterations", c.iterations},
                       {"epochs_per_iteration", c.epochs_per_iteration},
                       {"full_model_max_epochs", c.full_model_max_epochs},
                       {"c_size", c.sampler.c_size},
                       {"c_size_fraction", c.c_size_fraction},
                       {"strategy", to_string(c.strategy)},
                       {"seed", c.sampler.seed},
                       {"lad", c.lad},
                       {"net", c.net}};
}

inline void from_json(const nlohmann::json& j, LiitConfig& c) {
    c.iterations = j.value("iterations", c.iterations);
    c.epochs_per_iteration = j.value("epochs_per_iteration", c.epochs_per_iteration);
    c.full_model_max_epochs = j.value("full_model_max_epochs", c.full_model_max_epochs);
    c.sampler.c_size = j.value("c_size", c.sampler.c_size);
    c.c_size_fraction = j.value("c_size_fraction", c.c_size_fraction);
    if (j.contains("strategy")) c.strategy = parse_strategy(j.at("strategy").get<std::string>());
    c.sampler.seed = j.value("seed", c.sampler.seed);
    if (j.contains("lad")) j.at("lad").get_to(c.lad);
    if (j.contains("net")) j.at("net").get_to(c.net);
}

}  // namespace liit
