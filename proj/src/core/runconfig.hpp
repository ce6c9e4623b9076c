#pragma once

#include <filesystem>
#include <string>

#include "core/augment.hpp"
#include "core/training.hpp"

namespace mribench::cfg {

// One run configuration file covers the training protocol, the preprocessing
// constants and the model init. Two formats are accepted: a JSON object, or
// flat `key = value` lines with '#' comments.
struct RunConfig {
  train::TrainConfig train;
  aug::PreprocessConfig preprocess;
  std::string init = "pretrained";  // pretrained | random
  bool head_activation = true;      // rectifier between the two head linears
  std::string data_root;            // optional override of the prepared root

  void validate() const;
};

RunConfig parse_run_config(const std::filesystem::path& path);
RunConfig parse_run_config_text(const std::string& text,
                                const std::string& origin);

// FNV-1a over the raw file bytes; the tamper-check hash stored in run
// metadata. 16 hex digits.
std::string config_hash_hex(const std::filesystem::path& path);

}  // namespace mribench::cfg
