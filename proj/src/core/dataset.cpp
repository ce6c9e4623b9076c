#include "core/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "core/common.hpp"
#include "core/rng.hpp"

namespace mribench::data {

namespace fs = std::filesystem;

const std::array<std::string, kNumClasses> kClassNames = {
    "glioma", "meningioma", "notumor", "pituitary"};

int class_id_from_name(const std::string& name) {
  for (int i = 0; i < kNumClasses; ++i) {
    if (kClassNames[static_cast<std::size_t>(i)] == name) return i;
  }
  return -1;
}

const std::string& class_name(int id) {
  if (id < 0 || id >= kNumClasses)
    throw_runtime("class id out of range: " + std::to_string(id));
  return kClassNames[static_cast<std::size_t>(id)];
}

const std::vector<ManifestEntry>& SplitManifest::part(int which) const {
  switch (which) {
    case 0:
      return train;
    case 1:
      return val;
    case 2:
      return test;
    default:
      throw_runtime("split part index out of range");
  }
}

namespace {

bool has_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".jpg" || ext == ".jpeg" || ext == ".png";
}

std::string relative_generic(const fs::path& p, const fs::path& root) {
  return fs::relative(p, root).generic_string();
}

void scan_class_dir(const fs::path& root, const fs::path& tree, int label,
                    DatasetManifest& manifest) {
  const fs::path dir = tree / kClassNames[static_cast<std::size_t>(label)];
  if (!fs::is_directory(dir)) {
    throw_config("missing class directory: " + dir.string());
  }
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_directory()) continue;
    if (!has_image_extension(entry.path())) continue;
    std::error_code ec;
    if (!entry.is_regular_file(ec) || ec) {
      ++manifest.skipped_files;
      std::cerr << "warning: skipping unreadable file " << entry.path()
                << "\n";
      continue;
    }
    manifest.entries.push_back(
        ManifestEntry{relative_generic(entry.path(), root), label});
  }
}

}  // namespace

DatasetManifest scan_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw_config("dataset root is not a directory: " + root.string());
  }

  // Either <root>/<class>/ directly, or the public layout with Training/ and
  // Testing/ trees pooled together.
  std::vector<fs::path> trees;
  bool any_class_at_root = false;
  for (const auto& name : kClassNames) {
    if (fs::is_directory(root / name)) any_class_at_root = true;
  }
  if (any_class_at_root) {
    trees.push_back(root);
  } else {
    for (const char* sub : {"Testing", "Training"}) {
      if (fs::is_directory(root / sub)) trees.push_back(root / sub);
    }
    if (trees.empty()) {
      throw_config("no class directories found under " + root.string() +
                   " (expected <root>/<class>/ or Training/ and Testing/)");
    }
  }

  DatasetManifest manifest;
  manifest.root = root;
  for (const auto& tree : trees) {
    for (int label = 0; label < kNumClasses; ++label) {
      scan_class_dir(root, tree, label, manifest);
    }
  }

  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) {
              return a.path < b.path;
            });
  for (const auto& e : manifest.entries) {
    ++manifest.class_counts[static_cast<std::size_t>(e.label)];
  }
  for (int label = 0; label < kNumClasses; ++label) {
    if (manifest.class_counts[static_cast<std::size_t>(label)] == 0) {
      std::cerr << "warning: class '" << class_name(label)
                << "' has no images\n";
    }
  }
  return manifest;
}

SplitSizes split_sizes(std::int64_t class_count, const SplitRatios& ratios) {
  SplitSizes sizes;
  sizes.train = static_cast<std::int64_t>(
      std::floor(ratios.train * static_cast<double>(class_count)));
  sizes.val = static_cast<std::int64_t>(
      std::floor(ratios.val * static_cast<double>(class_count)));
  sizes.test = class_count - sizes.train - sizes.val;
  return sizes;
}

SplitManifest stratified_split(const DatasetManifest& manifest,
                               const SplitRatios& ratios, std::uint64_t seed) {
  if (std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw_config("split ratios must sum to 1.0");
  }
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0) {
    throw_config("split ratios must be nonnegative");
  }
  for (int c = 0; c < kNumClasses; ++c) {
    if (manifest.class_counts[static_cast<std::size_t>(c)] < 3) {
      throw_data("class '" + class_name(c) + "' has fewer than 3 images (" +
                 std::to_string(
                     manifest.class_counts[static_cast<std::size_t>(c)]) +
                 "); cannot populate train/val/test");
    }
  }

  SplitManifest split;
  split.seed = seed;
  split.ratios = ratios;
  for (int c = 0; c < kNumClasses; ++c) {
    std::vector<ManifestEntry> pool;
    for (const auto& e : manifest.entries) {
      if (e.label == c) pool.push_back(e);
    }
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(c)}));
    rng.shuffle(pool);

    SplitSizes sizes = split_sizes(static_cast<std::int64_t>(pool.size()),
                                   ratios);
    auto train_end = pool.begin() + sizes.train;
    auto val_end = train_end + sizes.val;
    split.train.insert(split.train.end(), pool.begin(), train_end);
    split.val.insert(split.val.end(), train_end, val_end);
    split.test.insert(split.test.end(), val_end, pool.end());
  }
  return split;
}

namespace {
const std::array<std::string, 3> kSplitNames = {"train", "val", "test"};
}

void save_manifest(const SplitManifest& split, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
  if (!out) throw_data("cannot open manifest for writing: " + path.string());
  out << "path,label,split\n";
  for (int which = 0; which < 3; ++which) {
    for (const auto& e : split.part(which)) {
      out << e.path << ',' << class_name(e.label) << ','
          << kSplitNames[static_cast<std::size_t>(which)] << '\n';
    }
  }
  if (!out.flush()) throw_data("failed writing manifest: " + path.string());
}

SplitManifest load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("cannot open manifest: " + path.string());

  std::string line;
  if (!std::getline(in, line) || line != "path,label,split") {
    throw_data("manifest " + path.string() +
               ": line 1: expected header 'path,label,split'");
  }

  SplitManifest split;
  std::set<std::string> seen;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fail = [&](const std::string& msg) {
      throw_data("manifest " + path.string() + ": line " +
                 std::to_string(line_no) + ": " + msg);
    };

    std::size_t c1 = line.find(',');
    std::size_t c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos ||
        line.find(',', c2 + 1) != std::string::npos) {
      fail("expected exactly 3 comma-separated fields");
    }
    std::string p = line.substr(0, c1);
    std::string label_name = line.substr(c1 + 1, c2 - c1 - 1);
    std::string split_name = line.substr(c2 + 1);

    if (p.empty()) fail("empty path");
    int label = class_id_from_name(label_name);
    if (label < 0) fail("unknown class name '" + label_name + "'");
    if (!seen.insert(p).second) {
      fail("duplicate path '" + p + "' violates split disjointness");
    }

    ManifestEntry entry{p, label};
    if (split_name == "train") {
      split.train.push_back(entry);
    } else if (split_name == "val") {
      split.val.push_back(entry);
    } else if (split_name == "test") {
      split.test.push_back(entry);
    } else {
      fail("unknown split name '" + split_name + "'");
    }
  }
  return split;
}

}  // namespace mribench::data
