#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

// Scanning, splitting and manifest IO are pure or filesystem-bound and safe
// to call concurrently on distinct paths; a SplitManifest is immutable once
// built and safe to share across threads.

namespace mribench::data {

constexpr int kNumClasses = 4;

// Fixed alphabetical id<->name bijection.
extern const std::array<std::string, kNumClasses> kClassNames;

int class_id_from_name(const std::string& name);  // -1 if unknown
const std::string& class_name(int id);

struct ManifestEntry {
  std::string path;  // relative to the dataset root, '/'-separated
  int label = 0;

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;  // lexicographic by path
  std::array<std::int64_t, kNumClasses> class_counts{};
  std::int64_t skipped_files = 0;  // unreadable entries, warned on stderr
};

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct SplitManifest {
  std::vector<ManifestEntry> train;
  std::vector<ManifestEntry> val;
  std::vector<ManifestEntry> test;
  std::uint64_t seed = 0;
  SplitRatios ratios;

  const std::vector<ManifestEntry>& part(int which) const;  // 0/1/2

  // Equality covers the split contents; seed and ratios are provenance and
  // are not persisted in the CSV.
  bool operator==(const SplitManifest& other) const {
    return train == other.train && val == other.val && test == other.test;
  }
};

// Walks <root>/<class_name>/ for jpg/jpeg/png files. The public dataset ships
// Training/ and Testing/ trees; when present both are pooled into one
// manifest. Missing class directories are fatal.
DatasetManifest scan_dataset(const std::filesystem::path& root);

// Per-class seeded shuffle, then floor(train), floor(val), remainder to test.
// Every class needs at least 3 images.
SplitManifest stratified_split(const DatasetManifest& manifest,
                               const SplitRatios& ratios, std::uint64_t seed);

// CSV with header `path,label,split`, UTF-8, LF endings.
void save_manifest(const SplitManifest& split,
                   const std::filesystem::path& path);
SplitManifest load_manifest(const std::filesystem::path& path);

// floor/floor/remainder split sizes for one class.
struct SplitSizes {
  std::int64_t train = 0;
  std::int64_t val = 0;
  std::int64_t test = 0;
};
SplitSizes split_sizes(std::int64_t class_count, const SplitRatios& ratios);

}  // namespace mribench::data
