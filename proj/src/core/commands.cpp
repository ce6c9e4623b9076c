#include "core/commands.hpp"

#include <fstream>
#include <json.hpp>

#include "core/common.hpp"
#include "core/dataset.hpp"
#include "core/report.hpp"
#include "core/runconfig.hpp"
#include "core/trainer.hpp"

namespace mribench::cmd {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

void store_json(const fs::path& path, const ordered_json& obj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_data("cannot open for writing: " + path.string());
  out << obj.dump(2) << "\n";
  if (!out.flush()) throw_data("failed writing " + path.string());
}

ordered_json load_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("cannot open " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw_data("malformed JSON in " + path.string() + ": " + e.what());
  }
}

struct SplitBindings {
  train::DataBinding train;
  train::DataBinding val;
  train::DataBinding test;
};

SplitBindings bind_split(const data::SplitManifest& split,
                         const fs::path& root) {
  SplitBindings b;
  b.train = {root, split.train};
  b.val = {root, split.val};
  b.test = {root, split.test};
  return b;
}

zoo::ModelSpec spec_from_config(const std::string& model_id,
                                const cfg::RunConfig& rc) {
  zoo::ModelSpec spec = zoo::spec_for_model_id(model_id);
  spec.head_activation = rc.head_activation;
  return spec;
}

}  // namespace

PrepareOutcome prepare(const fs::path& dataset_root, std::uint64_t seed,
                       const fs::path& workspace) {
  Workspace ws{workspace};
  fs::create_directories(ws.manifests_dir());

  data::DatasetManifest manifest = data::scan_dataset(dataset_root);
  data::SplitRatios ratios;  // 0.8 / 0.1 / 0.1
  data::SplitManifest split = data::stratified_split(manifest, ratios, seed);
  data::save_manifest(split, ws.split_csv());

  ordered_json summary;
  summary["dataset_root"] = fs::absolute(dataset_root).string();
  summary["seed"] = seed;
  summary["ratios"] = {ratios.train, ratios.val, ratios.test};
  summary["total"] = manifest.entries.size();
  summary["skipped_files"] = manifest.skipped_files;
  ordered_json per_class;
  for (int c = 0; c < data::kNumClasses; ++c) {
    auto count_label = [&](const std::vector<data::ManifestEntry>& v) {
      std::int64_t n = 0;
      for (const auto& e : v)
        if (e.label == c) ++n;
      return n;
    };
    ordered_json row;
    row["total"] = manifest.class_counts[static_cast<std::size_t>(c)];
    row["train"] = count_label(split.train);
    row["val"] = count_label(split.val);
    row["test"] = count_label(split.test);
    per_class[data::class_name(c)] = row;
  }
  summary["classes"] = per_class;
  store_json(ws.summary_json(), summary);

  PrepareOutcome outcome;
  outcome.split_csv = ws.split_csv();
  outcome.summary_json = ws.summary_json();
  outcome.total_images = static_cast<std::int64_t>(manifest.entries.size());
  outcome.skipped_files = manifest.skipped_files;
  return outcome;
}

fs::path train_run(const fs::path& workspace, const std::string& model_id,
                   const fs::path& config_path) {
  Workspace ws{workspace};
  if (!fs::exists(ws.split_csv()) || !fs::exists(ws.summary_json())) {
    throw_data("no prepared manifests under " + ws.manifests_dir().string() +
               "; run `mribench prepare` first");
  }

  cfg::RunConfig rc = cfg::parse_run_config(config_path);
  zoo::ModelSpec spec = spec_from_config(model_id, rc);
  const std::string hash = cfg::config_hash_hex(config_path);

  report::RunPaths paths;
  paths.dir = ws.runs_dir() / (model_id + "-" + hash.substr(0, 8));
  paths.model_id = model_id;
  fs::create_directories(paths.dir);
  report::RunLock lock(paths.lock());

  fs::copy_file(config_path, paths.config_snapshot(),
                fs::copy_options::overwrite_existing);

  auto summary = load_json(ws.summary_json());
  fs::path data_root = rc.data_root.empty()
                           ? fs::path(summary.at("dataset_root")
                                          .get<std::string>())
                           : fs::path(rc.data_root);
  data::SplitManifest split = data::load_manifest(ws.split_csv());
  SplitBindings bindings = bind_split(split, data_root);

  auto init = rc.init == "pretrained" ? zoo::InitMode::kPretrained
                                      : zoo::InitMode::kRandom;
  auto model = zoo::build_custom(spec, init, rc.train.seed,
                                 zoo::default_weights_dir());
  train::ModelRef ref(*model);

  auto outcome = train::train_model(ref, bindings.train, bindings.val,
                                    rc.train, rc.preprocess,
                                    paths.checkpoint());

  report::write_curves_csv(paths.curves_csv(), outcome.history);

  const auto& best =
      outcome.history
          .records[static_cast<std::size_t>(outcome.history.best_epoch)];
  ordered_json ckpt_meta;
  ckpt_meta["model_id"] = model_id;
  ckpt_meta["epoch"] = best.epoch;
  ckpt_meta["val_accuracy"] = best.val_acc;
  ckpt_meta["config_hash"] = hash;
  store_json(paths.checkpoint_meta(), ckpt_meta);

  report::RunMeta meta;
  meta.model_id = model_id;
  meta.config_hash = hash;
  meta.init = rc.init;
  meta.data_root = fs::absolute(data_root).string();
  meta.split_csv = fs::absolute(ws.split_csv()).string();
  meta.seed = rc.train.seed;
  meta.save(paths.run_meta());

  return paths.dir;
}

fs::path evaluate_run(const fs::path& run_dir) {
  report::RunMeta meta = report::RunMeta::load(run_dir / "run.json");
  report::RunPaths paths;
  paths.dir = run_dir;
  paths.model_id = meta.model_id;

  // Tamper check: the stored hash must match the snapshot bytes.
  std::string snapshot_hash = cfg::config_hash_hex(paths.config_snapshot());
  if (snapshot_hash != meta.config_hash) {
    throw_data("config snapshot in " + run_dir.string() +
               " does not match the recorded hash (expected " +
               meta.config_hash + ", got " + snapshot_hash + ")");
  }

  if (!fs::exists(paths.checkpoint())) {
    throw_data("checkpoint not found: " + paths.checkpoint().string());
  }

  cfg::RunConfig rc = cfg::parse_run_config(paths.config_snapshot());
  zoo::ModelSpec spec = spec_from_config(meta.model_id, rc);
  // Architecture only; every tensor is then overwritten by the checkpoint.
  auto model = zoo::build_custom(spec, zoo::InitMode::kRandom, 0, {});
  model->load_checkpoint(paths.checkpoint());

  data::SplitManifest split = data::load_manifest(meta.split_csv);
  train::DataBinding test_data{meta.data_root, split.test};

  train::ModelRef ref(*model);
  auto report = train::evaluate_model(ref, test_data, rc.preprocess,
                                      rc.train.batch_size);
  report::write_metrics_json(paths.report_json(), meta.model_id, report,
                             meta.config_hash);
  return paths.report_json();
}

std::string compare_runs(const std::vector<fs::path>& run_dirs,
                         const fs::path& out_csv) {
  if (run_dirs.empty()) throw_config("compare needs at least one run dir");
  std::vector<report::ComparisonRow> rows;
  for (const auto& dir : run_dirs) {
    auto report_path = dir / "report.json";
    if (!fs::exists(report_path)) {
      throw_data("no report.json in " + dir.string() +
                 "; run `mribench evaluate` first");
    }
    rows.push_back(report::load_comparison_row(report_path));
  }
  if (!out_csv.empty()) {
    report::write_comparison_csv(out_csv, rows);
  }
  return report::render_comparison_table(rows);
}

fs::path curves_run(const fs::path& run_dir, const fs::path& out_svg) {
  report::RunMeta meta = report::RunMeta::load(run_dir / "run.json");
  report::RunPaths paths;
  paths.dir = run_dir;
  paths.model_id = meta.model_id;
  auto records = report::read_curves_csv(paths.curves_csv());
  fs::path target = out_svg.empty() ? paths.curves_svg() : out_svg;
  report::write_curves_svg(target, records, meta.model_id);
  return target;
}

}  // namespace mribench::cmd
