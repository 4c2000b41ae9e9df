#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "wyckoff/neural_core.hpp"
#include "wyckoff/pattern_synth.hpp"

namespace wyckoff::nn {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  Phase phase = Phase::TR;
  LstmModel model;
};

/// JSON document: format_version, phase, n_features, hidden, time_steps and
/// a `tensors` object mapping every parameter name to a flat row-major array.
std::string format_checkpoint(const LstmModel& m, Phase phase);

/// Throws VersionError, ShapeError (naming the tensor) or NumeralError;
/// other structural problems raise DataError. Nothing is returned unless
/// every tensor validates.
Checkpoint parse_checkpoint(std::string_view text);

void save_model(const LstmModel& m, Phase phase, const std::filesystem::path& path);
Checkpoint load_model(const std::filesystem::path& path);

}  // namespace wyckoff::nn
