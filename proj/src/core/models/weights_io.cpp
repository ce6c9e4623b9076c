#include "core/models/weights_io.hpp"

#include <cstring>
#include <fstream>

#include "core/common.hpp"

namespace mribench::zoo {

namespace {

constexpr char kMagic[4] = {'M', 'R', 'B', 'W'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw_data("truncated weight file: " + path);
  }
  return v;
}

}  // namespace

void write_tensor_archive(
    const std::filesystem::path& path, const std::string& model_id,
    const std::vector<std::pair<std::string, const nn::Tensor*>>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_data("cannot open for writing: " + path.string());

  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model_id.size()));
  out.write(model_id.data(), static_cast<std::streamsize>(model_id.size()));
  put<std::uint64_t>(out, tensors.size());

  std::uint64_t digest = kFnvOffset;
  for (const auto& [name, tensor] : tensors) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(tensor->shape.size()));
    for (int d : tensor->shape) put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    out.write(reinterpret_cast<const char*>(tensor->data.data()),
              static_cast<std::streamsize>(tensor->data.size() * 4));
    digest = fnv1a64(tensor->data.data(), tensor->data.size() * 4, digest);
    digest = fnv1a64(name.data(), name.size(), digest);
  }
  put<std::uint64_t>(out, digest);
  if (!out.flush()) throw_data("failed writing " + path.string());
}

TensorArchive read_tensor_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw_data("weight file not found: " + path.string());
  }
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw_data("not a weight archive (bad magic): " + path.string());
  }
  auto version = get<std::uint32_t>(in, path.string());
  if (version != kVersion) {
    throw_data("unsupported weight archive version " +
               std::to_string(version) + " in " + path.string());
  }

  TensorArchive archive;
  auto id_len = get<std::uint32_t>(in, path.string());
  archive.model_id.resize(id_len);
  in.read(archive.model_id.data(), id_len);

  auto count = get<std::uint64_t>(in, path.string());
  std::uint64_t digest = kFnvOffset;
  for (std::uint64_t t = 0; t < count; ++t) {
    auto name_len = get<std::uint32_t>(in, path.string());
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len))
      throw_data("truncated weight file: " + path.string());
    auto rank = get<std::uint32_t>(in, path.string());
    if (rank > 8) throw_data("corrupt tensor rank in " + path.string());
    std::vector<int> shape;
    for (std::uint32_t d = 0; d < rank; ++d) {
      shape.push_back(static_cast<int>(get<std::uint32_t>(in, path.string())));
    }
    nn::Tensor tensor(shape);
    if (!in.read(reinterpret_cast<char*>(tensor.data.data()),
                 static_cast<std::streamsize>(tensor.data.size() * 4))) {
      throw_data("truncated weight file: " + path.string());
    }
    digest = fnv1a64(tensor.data.data(), tensor.data.size() * 4, digest);
    digest = fnv1a64(name.data(), name.size(), digest);
    archive.tensors.emplace(std::move(name), std::move(tensor));
  }
  auto stored = get<std::uint64_t>(in, path.string());
  if (stored != digest) {
    throw_data("weight archive checksum mismatch in " + path.string() +
               " (corrupt or tampered file)");
  }
  return archive;
}

}  // namespace mribench::zoo
