#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "core/metrics.hpp"
#include "core/training.hpp"

namespace mribench::report {

// Layout of one run directory, runs/<model_id>-<hash8>/. The directory is
// self-describing: run.json plus the artifacts below fully reconstruct a
// run record.
struct RunPaths {
  std::filesystem::path dir;
  std::string model_id;

  std::filesystem::path config_snapshot() const {
    return dir / "config.snapshot";
  }
  std::filesystem::path curves_csv() const { return dir / "curves.csv"; }
  std::filesystem::path curves_svg() const { return dir / "curves.svg"; }
  std::filesystem::path checkpoint() const {
    return dir / (model_id + "-best.ckpt");
  }
  std::filesystem::path checkpoint_meta() const {
    return dir / (model_id + "-best.json");
  }
  std::filesystem::path run_meta() const { return dir / "run.json"; }
  std::filesystem::path report_json() const { return dir / "report.json"; }
  std::filesystem::path lock() const { return dir / ".lock"; }
};

// Metadata persisted as run.json.
struct RunMeta {
  std::string model_id;
  std::string config_hash;
  std::string init;
  std::string data_root;
  std::string split_csv;
  std::uint64_t seed = 0;

  void save(const std::filesystem::path& path) const;
  static RunMeta load(const std::filesystem::path& path);
};

// Header: epoch,lr,train_loss,train_acc,val_loss,val_acc
void write_curves_csv(const std::filesystem::path& path,
                      const train::TrainingHistory& history);
std::vector<train::EpochRecord> read_curves_csv(
    const std::filesystem::path& path);

void write_metrics_json(const std::filesystem::path& path,
                        const std::string& model_id,
                        const metrics::MetricsReport& report,
                        const std::string& config_hash);

struct ComparisonRow {
  std::string model_id;
  double avg_loss = 0.0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

ComparisonRow load_comparison_row(const std::filesystem::path& report_json);

// Rows sorted by ascending accuracy, values at 4 decimals.
std::string render_comparison_table(std::vector<ComparisonRow> rows);
void write_comparison_csv(const std::filesystem::path& path,
                          std::vector<ComparisonRow> rows);

// Dual-axis SVG: loss on the left scale, accuracy on the right, four
// series (train/val x loss/acc) tagged with class="series".
void write_curves_svg(const std::filesystem::path& path,
                      const std::vector<train::EpochRecord>& records,
                      const std::string& title);

// Exclusive lock file. Creation fails if another process holds it.
class RunLock {
 public:
  explicit RunLock(std::filesystem::path path);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  std::filesystem::path path_;
};

}  // namespace mribench::report
