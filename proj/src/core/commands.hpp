#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mribench::cmd {

// Workspace layout: manifests/ from prepare, runs/<model>-<hash8>/ from
// train. Every command resolves artifacts through these paths.
struct Workspace {
  std::filesystem::path root;

  std::filesystem::path manifests_dir() const { return root / "manifests"; }
  std::filesystem::path split_csv() const {
    return manifests_dir() / "split.csv";
  }
  std::filesystem::path summary_json() const {
    return manifests_dir() / "summary.json";
  }
  std::filesystem::path runs_dir() const { return root / "runs"; }
};

struct PrepareOutcome {
  std::filesystem::path split_csv;
  std::filesystem::path summary_json;
  std::int64_t total_images = 0;
  std::int64_t skipped_files = 0;
};

// Scan + stratified 0.8/0.1/0.1 split + manifest/summary emission.
PrepareOutcome prepare(const std::filesystem::path& dataset_root,
                       std::uint64_t seed,
                       const std::filesystem::path& workspace);

// Full training protocol for one model id; returns the run directory.
std::filesystem::path train_run(const std::filesystem::path& workspace,
                                const std::string& model_id,
                                const std::filesystem::path& config_path);

// Test-split evaluation of a finished run; returns the report.json path.
std::filesystem::path evaluate_run(const std::filesystem::path& run_dir);

// Comparison table over finished runs; renders text, writes CSV.
std::string compare_runs(const std::vector<std::filesystem::path>& run_dirs,
                         const std::filesystem::path& out_csv);

// Training-curve figure for one run; returns the SVG path.
std::filesystem::path curves_run(const std::filesystem::path& run_dir,
                                 const std::filesystem::path& out_svg = {});

}  // namespace mribench::cmd
