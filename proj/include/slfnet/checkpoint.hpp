#pragma once

// Checkpoint file (JSON):
//   {"format_version": 1,
//    "config": {...train section...},
//    "vocabulary": ["<unk>", ...],
//    "parameters": {"<name>": {"shape": [r, c], "values": [row-major, %.17g]}, ...}}

#include <string>
#include <string_view>

#include "slfnet/model.hpp"
#include "slfnet/training.hpp"

namespace slfnet {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  TrainConfig config;
  SlfModel model;
};

std::string serialize_checkpoint(const TrainConfig& config, const SlfModel& model);
void save_checkpoint(const std::string& path, const TrainConfig& config, const SlfModel& model);

// Rebuilds the parameter layout from the stored config and fills it. Throws
// DataError on a version mismatch, or a missing, unknown or misshapen parameter
// (naming it).
Checkpoint parse_checkpoint(std::string_view text);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace slfnet
