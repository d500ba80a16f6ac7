#pragma once

#include "eqf/neural/models.hpp"

#include <json.hpp>

#include <filesystem>
#include <vector>

namespace eqf::nn {

// File layout: "EQFCKPT1", u64 header length, JSON header bytes, u64 parameter count, then the
// parameters as IEEE-754 float64. All integers and floats are little-endian.
struct Checkpoint {
    nlohmann::json header;
    std::vector<double> parameters;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

Checkpoint to_checkpoint(LstmWindowModel& model);
Checkpoint to_checkpoint(Cnn3dModel& model);
LstmWindowModel lstm_from_checkpoint(const Checkpoint& ckpt);
Cnn3dModel cnn_from_checkpoint(const Checkpoint& ckpt);

}  // namespace eqf::nn
