// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "peekaboo/head.hpp"
#include "peekaboo/optim.hpp"

namespace peekaboo {

inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
  DecoderParams params;
  AdamState adam;
  std::int64_t iteration = 0;
  std::string config_hash;
};

struct LoadedCheckpoint {
  Checkpoint checkpoint;
  /// Non-fatal findings, e.g. a config hash that differs from the expected one.
  std::vector<std::string> warnings;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

/// JSON text with every double printed at round-trip precision.
std::string checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);

/// Throws CheckpointError on a format version or feature-dim mismatch.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path,
                                 std::optional<int> expected_dim = std::nullopt,
                                 std::optional<std::string> expected_config_hash = std::nullopt);

}  // namespace peekaboo
