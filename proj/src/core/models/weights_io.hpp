#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "core/nn/tensor.hpp"

namespace mribench::zoo {

// Single-file named-tensor archive (.mrbw / .ckpt). Little-endian:
//   magic "MRBW", u32 version, u32 id_len, id bytes, u64 tensor count,
//   per tensor: u32 name_len, name, u32 rank, u32 dims[rank], f32 data[],
//   trailing u64 FNV-1a over every tensor payload.
struct TensorArchive {
  std::string model_id;
  std::map<std::string, nn::Tensor> tensors;
};

void write_tensor_archive(
    const std::filesystem::path& path, const std::string& model_id,
    const std::vector<std::pair<std::string, const nn::Tensor*>>& tensors);

TensorArchive read_tensor_archive(const std::filesystem::path& path);

}  // namespace mribench::zoo
