// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include "peekaboo/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace peekaboo {

using nlohmann::json;

namespace {

bool looks_like_hash(const std::string& s) {
  return s.size() == 16 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& ck) {
  const auto& p = ck.params;
  const auto& a = ck.adam;
  json doc = {
      {"format_version", kCheckpointFormatVersion},
      {"feature_dim", p.dim},
      {"weights", p.weights},
      {"biases", {p.biases[0], p.biases[1]}},
      {"adam",
       {{"step", a.step},
        {"m", a.m},
        {"v", a.v},
        {"lr", a.lr},
        {"beta1", a.beta1},
        {"beta2", a.beta2},
        {"eps", a.eps}}},
      {"iteration", ck.iteration},
      {"config_hash", ck.config_hash},
  };
  return doc.dump(2) + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CheckpointError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion) {
      throw CheckpointError("unsupported checkpoint format_version " + std::to_string(version));
    }
    Checkpoint ck;
    const int dim = doc.at("feature_dim").get<int>();
    ck.params = DecoderParams::zeros(dim);
    auto weights = doc.at("weights").get<std::vector<double>>();
    auto biases = doc.at("biases").get<std::vector<double>>();
    if (weights.size() != ck.params.weights.size() || biases.size() != 2) {
      throw CheckpointError("checkpoint parameter arrays do not match feature_dim " +
                            std::to_string(dim));
    }
    ck.params.weights = std::move(weights);
    ck.params.biases = {biases[0], biases[1]};

    const auto& adam = doc.at("adam");
    ck.adam.step = adam.at("step").get<std::int64_t>();
    ck.adam.m = adam.at("m").get<std::vector<double>>();
    ck.adam.v = adam.at("v").get<std::vector<double>>();
    ck.adam.lr = adam.at("lr").get<double>();
    ck.adam.beta1 = adam.at("beta1").get<double>();
    ck.adam.beta2 = adam.at("beta2").get<double>();
    ck.adam.eps = adam.at("eps").get<double>();
    if (ck.adam.m.size() != ck.params.parameter_count() ||
        ck.adam.v.size() != ck.params.parameter_count() || ck.adam.step < 0) {
      throw CheckpointError("checkpoint optimizer state does not match the parameters");
    }
    ck.iteration = doc.at("iteration").get<std::int64_t>();
    ck.config_hash = doc.at("config_hash").get<std::string>();
    return ck;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const std::string text = checkpoint_to_json(checkpoint);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path, std::optional<int> expected_dim,
                                 std::optional<std::string> expected_config_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();

  LoadedCheckpoint out{checkpoint_from_json(buf.str()), {}};
  const Checkpoint& ck = out.checkpoint;
  if (expected_dim && ck.params.dim != *expected_dim) {
    throw CheckpointError("checkpoint feature_dim " + std::to_string(ck.params.dim) +
                          " does not match backend dim " + std::to_string(*expected_dim));
  }
  if (!looks_like_hash(ck.config_hash)) {
    out.warnings.push_back("checkpoint config_hash '" + ck.config_hash + "' is malformed");
  } else if (expected_config_hash && ck.config_hash != *expected_config_hash) {
    out.warnings.push_back("checkpoint config_hash " + ck.config_hash +
                           " differs from the current config " + *expected_config_hash);
  }
  return out;
}

}  // namespace peekaboo
