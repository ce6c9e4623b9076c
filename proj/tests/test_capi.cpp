// Exercises the public C surface end to end through the shared library.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <fstream>
#include <string>

#include "mribench.h"
#include "support/fixtures.hpp"
#include "support/synthetic_dataset.hpp"

using testsupport::TempDir;
using testsupport::write_file;

TEST_CASE("version and error plumbing") {
  CHECK(std::strlen(mrb_version()) > 0);

  mrb_manifest* m = nullptr;
  auto status = mrb_manifest_scan("/nonexistent/dataset", &m);
  CHECK(status == MRB_ERR_CONFIG);
  CHECK(m == nullptr);
  CHECK(std::strlen(mrb_last_error()) > 0);

  CHECK(mrb_manifest_scan(nullptr, &m) == MRB_ERR_CONFIG);
}

TEST_CASE("manifest and split handles") {
  TempDir tmp("capi_data");
  auto root = tmp.path() / "data";
  testsupport::make_solid_color_dataset(root, 12, 32);

  mrb_manifest* manifest = nullptr;
  REQUIRE(mrb_manifest_scan(root.string().c_str(), &manifest) == MRB_OK);
  CHECK(mrb_manifest_size(manifest) == 48);
  for (int c = 0; c < 4; ++c) CHECK(mrb_manifest_class_count(manifest, c) == 12);
  CHECK(mrb_manifest_skipped(manifest) == 0);

  mrb_split* split = nullptr;
  REQUIRE(mrb_split_stratified(manifest, 0.8, 0.1, 0.1, 42, &split) == MRB_OK);
  CHECK(mrb_split_size(split, 0) == 36);  // floor(0.8*12)=9 per class
  CHECK(mrb_split_size(split, 1) == 4);
  CHECK(mrb_split_size(split, 2) == 8);

  auto csv = tmp.path() / "split.csv";
  REQUIRE(mrb_split_save(split, csv.string().c_str()) == MRB_OK);

  mrb_split* loaded = nullptr;
  REQUIRE(mrb_split_load(csv.string().c_str(), &loaded) == MRB_OK);
  CHECK(mrb_split_size(loaded, 0) == 36);
  CHECK(mrb_split_size(loaded, 2) == 8);

  SUBCASE("bad ratios are a config error") {
    mrb_split* bad = nullptr;
    CHECK(mrb_split_stratified(manifest, 0.5, 0.1, 0.1, 1, &bad) ==
          MRB_ERR_CONFIG);
    CHECK(bad == nullptr);
  }

  SUBCASE("malformed csv is a data error") {
    auto bad_csv = tmp.path() / "bad.csv";
    write_file(bad_csv, "path,label,split\nx.jpg,sarcoma,train\n");
    mrb_split* bad = nullptr;
    CHECK(mrb_split_load(bad_csv.string().c_str(), &bad) == MRB_ERR_DATA);
    CHECK(std::string(mrb_last_error()).find("line 2") != std::string::npos);
  }

  mrb_split_free(loaded);
  mrb_split_free(split);
  mrb_manifest_free(manifest);
}

TEST_CASE("model handles") {
  mrb_model* model = nullptr;
  REQUIRE(mrb_model_build("mobilenet_v2", "random", 3, nullptr, &model) ==
          MRB_OK);
  uint64_t total = 0, trainable = 0;
  REQUIRE(mrb_model_param_counts(model, &total, &trainable) == MRB_OK);
  CHECK(total == 2'228'996);  // backbone + 4-way linear head
  CHECK(trainable == 5'124);
  mrb_model_free(model);

  SUBCASE("unknown id lists the valid models") {
    mrb_model* bad = nullptr;
    CHECK(mrb_model_build("alexnet", "random", 0, nullptr, &bad) ==
          MRB_ERR_CONFIG);
    CHECK(std::string(mrb_last_error()).find("mobilenet_bt") !=
          std::string::npos);
  }

  SUBCASE("missing pretrained weights are a data error with a hint") {
    mrb_model* bad = nullptr;
    CHECK(mrb_model_build("resnet18", "pretrained", 0, "/nonexistent/dir",
                          &bad) == MRB_ERR_DATA);
    CHECK(std::string(mrb_last_error()).find("export_weights") !=
          std::string::npos);
  }

  SUBCASE("bad init mode") {
    mrb_model* bad = nullptr;
    CHECK(mrb_model_build("resnet18", "xavier", 0, nullptr, &bad) ==
          MRB_ERR_CONFIG);
  }
}

TEST_CASE("command pipeline through the C API") {
  TempDir tmp("capi_cmd");
  auto root = tmp.path() / "data";
  testsupport::make_solid_color_dataset(root, 12, 48);
  auto ws = tmp.path() / "ws";
  auto cfg = tmp.path() / "run.cfg";
  write_file(cfg,
             "train.batch_size = 8\n"
             "train.max_epochs = 2\n"
             "train.seed = 3\n"
             "aug.target_size = 32\n"
             "model.init = random\n");

  REQUIRE(mrb_cmd_prepare(root.string().c_str(), 9, ws.string().c_str()) ==
          MRB_OK);
  CHECK(std::filesystem::exists(ws / "manifests" / "split.csv"));

  char* run_dir = nullptr;
  REQUIRE(mrb_cmd_train(ws.string().c_str(), "mobilenet_v2",
                        cfg.string().c_str(), &run_dir) == MRB_OK);
  REQUIRE(run_dir != nullptr);
  std::string run_dir_s = run_dir;
  mrb_string_free(run_dir);
  CHECK(std::filesystem::exists(run_dir_s + "/curves.csv"));

  char* report_path = nullptr;
  REQUIRE(mrb_cmd_evaluate(run_dir_s.c_str(), &report_path) == MRB_OK);
  std::string report_s = report_path;
  mrb_string_free(report_path);
  CHECK(std::filesystem::exists(report_s));

  const char* dirs[] = {run_dir_s.c_str()};
  char* table = nullptr;
  auto cmp_csv = tmp.path() / "cmp.csv";
  REQUIRE(mrb_cmd_compare(dirs, 1, cmp_csv.string().c_str(), &table) ==
          MRB_OK);
  CHECK(std::string(table).find("mobilenet_v2") != std::string::npos);
  CHECK(std::string(table).find("Ave. Loss") != std::string::npos);
  mrb_string_free(table);
  CHECK(std::filesystem::exists(cmp_csv));

  char* svg_path = nullptr;
  REQUIRE(mrb_cmd_curves(run_dir_s.c_str(), nullptr, &svg_path) == MRB_OK);
  std::string svg_s = svg_path;
  mrb_string_free(svg_path);
  CHECK(std::filesystem::exists(svg_s));

  SUBCASE("training failures surface as their taxonomy code") {
    char* out = nullptr;
    CHECK(mrb_cmd_train(ws.string().c_str(), "alexnet", cfg.string().c_str(),
                        &out) == MRB_ERR_CONFIG);
    CHECK(mrb_cmd_evaluate((tmp.path() / "not_a_run").string().c_str(),
                           &out) == MRB_ERR_DATA);
  }
}
