#pragma once

// Run configuration file:
//
//   {
//     "train":   {"d": 32, "num_layers": 2, "heads": 2, "k_max": 3, "max_span": 3, "beta": 0.5,
//                 "interaction": "learned" | "passthrough",
//                 "attention": "learned" | "zero_query",
//                 "learning_rate": 0.001, "epochs": 25, "seed": 7,
//                 "lambda": {"count": 1, "action": 1, "location": 1, "object": 1}},
//     "grammar": {"actions": [...], "objects": [...], "locations": [...], "connectors": [...],
//                 "k_weights": [...], "p_omit_location": 0.4, "p_omit_object": 0.15, "seed": 7},
//     "paths":   {"pretrained_embeddings": "vectors.txt"}
//   }
//
// Every section and key is optional; missing values keep their defaults.
// Unknown keys and wrongly typed values are rejected.

#include <string>
#include <string_view>

#include <json.hpp>

#include "slfnet/synth.hpp"
#include "slfnet/training.hpp"

namespace slfnet {

struct RunConfig {
  TrainConfig train;
  GrammarConfig grammar = GrammarConfig::defaults();
  std::string pretrained_embeddings;  // empty: random initialization
};

// Throws DataError naming the offending key.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::string& path);

TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json train_config_to_json(const TrainConfig& config);
GrammarConfig grammar_config_from_json(const nlohmann::json& j);

const char* interaction_mode_name(InteractionMode mode) noexcept;
const char* attention_mode_name(AttentionMode mode) noexcept;

}  // namespace slfnet
