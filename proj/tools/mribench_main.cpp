// mribench command-line front end. Talks to the library exclusively through
// the C API in mribench.h.

#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "mribench.h"

namespace {

int report_failure(mrb_status status, const char* verb) {
  std::fprintf(stderr, "mribench %s: %s\n", verb, mrb_last_error());
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brain-tumor MRI classification benchmark"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("mribench ") + mrb_version());

  std::string workspace = ".";
  std::string dataset_root;
  std::uint64_t seed = 42;
  std::string model_id;
  std::string config_path;
  std::string run_dir;
  std::vector<std::string> run_dirs;
  std::string out_path;

  auto* prepare = app.add_subcommand(
      "prepare", "Scan the dataset and write the stratified split manifest");
  prepare->add_option("--root", dataset_root, "Dataset root directory")
      ->required();
  prepare->add_option("--seed", seed, "Split shuffle seed");
  prepare->add_option("--workspace", workspace, "Workspace directory");

  auto* train = app.add_subcommand(
      "train", "Train one model configuration and emit its run artifacts");
  train
      ->add_option("--model", model_id,
                   "Model id: mobilenet_v2, resnet18, efficientnet_b0, "
                   "vgg16, mobilenet_bt")
      ->required();
  train->add_option("--config", config_path, "Run config file")->required();
  train->add_option("--workspace", workspace, "Workspace directory");

  auto* evaluate = app.add_subcommand(
      "evaluate", "Evaluate a run's best checkpoint on the test split");
  evaluate->add_option("--run", run_dir, "Run directory")->required();

  auto* compare = app.add_subcommand(
      "compare", "Render the comparison table over finished runs");
  compare->add_option("runs", run_dirs, "Run directories")->required();
  compare->add_option("--out", out_path,
                      "Comparison CSV path (default comparison.csv)");

  auto* curves = app.add_subcommand(
      "curves", "Emit the loss/accuracy-vs-epoch figure for a run");
  curves->add_option("--run", run_dir, "Run directory")->required();
  curves->add_option("--out", out_path, "Output SVG path");

  CLI11_PARSE(app, argc, argv);

  if (prepare->parsed()) {
    mrb_status status =
        mrb_cmd_prepare(dataset_root.c_str(), seed, workspace.c_str());
    if (status != MRB_OK) return report_failure(status, "prepare");
    std::printf("wrote %s/manifests/split.csv and summary.json\n",
                workspace.c_str());
    return 0;
  }

  if (train->parsed()) {
    char* out_run = nullptr;
    mrb_status status = mrb_cmd_train(workspace.c_str(), model_id.c_str(),
                                      config_path.c_str(), &out_run);
    if (status != MRB_OK) return report_failure(status, "train");
    std::printf("run complete: %s\n", out_run);
    mrb_string_free(out_run);
    return 0;
  }

  if (evaluate->parsed()) {
    char* out_report = nullptr;
    mrb_status status = mrb_cmd_evaluate(run_dir.c_str(), &out_report);
    if (status != MRB_OK) return report_failure(status, "evaluate");
    std::printf("wrote %s\n", out_report);
    mrb_string_free(out_report);
    return 0;
  }

  if (compare->parsed()) {
    std::vector<const char*> dirs;
    dirs.reserve(run_dirs.size());
    for (const auto& d : run_dirs) dirs.push_back(d.c_str());
    if (out_path.empty()) out_path = "comparison.csv";
    char* table = nullptr;
    mrb_status status = mrb_cmd_compare(dirs.data(), dirs.size(),
                                        out_path.c_str(), &table);
    if (status != MRB_OK) return report_failure(status, "compare");
    std::printf("%s", table);
    std::printf("wrote %s\n", out_path.c_str());
    mrb_string_free(table);
    return 0;
  }

  if (curves->parsed()) {
    char* out_svg = nullptr;
    mrb_status status = mrb_cmd_curves(
        run_dir.c_str(), out_path.empty() ? nullptr : out_path.c_str(),
        &out_svg);
    if (status != MRB_OK) return report_failure(status, "curves");
    std::printf("wrote %s\n", out_svg);
    mrb_string_free(out_svg);
    return 0;
  }

  return 1;
}
