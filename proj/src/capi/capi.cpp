#include "mribench.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "core/commands.hpp"
#include "core/common.hpp"
#include "core/dataset.hpp"
#include "core/models/zoo.hpp"

using namespace mribench;

struct mrb_manifest {
  data::DatasetManifest value;
};

struct mrb_split {
  data::SplitManifest value;
};

struct mrb_model {
  std::unique_ptr<zoo::Model> value;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs fn, translating exceptions into status codes + the thread-local
// message.
template <typename Fn>
mrb_status guarded(Fn&& fn) {
  try {
    fn();
    return MRB_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<mrb_status>(e.exit_code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MRB_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return MRB_ERR_RUNTIME;
  }
}

mrb_status invalid_argument(const char* what) {
  g_last_error = std::string("invalid argument: ") + what;
  return MRB_ERR_CONFIG;
}

}  // namespace

extern "C" {

const char* mrb_version(void) { return "1.0.0"; }

const char* mrb_last_error(void) { return g_last_error.c_str(); }

void mrb_string_free(char* s) { std::free(s); }

/* ------------------------------------------------------------- dataset */

mrb_status mrb_manifest_scan(const char* dataset_root, mrb_manifest** out) {
  if (!dataset_root || !out) return invalid_argument("null pointer");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<mrb_manifest>();
    handle->value = data::scan_dataset(dataset_root);
    *out = handle.release();
  });
}

size_t mrb_manifest_size(const mrb_manifest* m) {
  return m ? m->value.entries.size() : 0;
}

size_t mrb_manifest_class_count(const mrb_manifest* m, int class_id) {
  if (!m || class_id < 0 || class_id >= data::kNumClasses) return 0;
  return static_cast<size_t>(
      m->value.class_counts[static_cast<std::size_t>(class_id)]);
}

size_t mrb_manifest_skipped(const mrb_manifest* m) {
  return m ? static_cast<size_t>(m->value.skipped_files) : 0;
}

void mrb_manifest_free(mrb_manifest* m) { delete m; }

mrb_status mrb_split_stratified(const mrb_manifest* m, double train_ratio,
                                double val_ratio, double test_ratio,
                                uint64_t seed, mrb_split** out) {
  if (!m || !out) return invalid_argument("null pointer");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<mrb_split>();
    handle->value = data::stratified_split(
        m->value, data::SplitRatios{train_ratio, val_ratio, test_ratio},
        seed);
    *out = handle.release();
  });
}

size_t mrb_split_size(const mrb_split* s, int part) {
  if (!s || part < 0 || part > 2) return 0;
  return s->value.part(part).size();
}

mrb_status mrb_split_save(const mrb_split* s, const char* csv_path) {
  if (!s || !csv_path) return invalid_argument("null pointer");
  return guarded([&] { data::save_manifest(s->value, csv_path); });
}

mrb_status mrb_split_load(const char* csv_path, mrb_split** out) {
  if (!csv_path || !out) return invalid_argument("null pointer");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<mrb_split>();
    handle->value = data::load_manifest(csv_path);
    *out = handle.release();
  });
}

void mrb_split_free(mrb_split* s) { delete s; }

/* -------------------------------------------------------------- models */

mrb_status mrb_model_build(const char* model_id, const char* init,
                           uint64_t init_seed, const char* weights_dir,
                           mrb_model** out) {
  if (!model_id || !init || !out) return invalid_argument("null pointer");
  *out = nullptr;
  return guarded([&] {
    zoo::InitMode mode;
    std::string init_s = init;
    if (init_s == "pretrained") {
      mode = zoo::InitMode::kPretrained;
    } else if (init_s == "random") {
      mode = zoo::InitMode::kRandom;
    } else {
      throw_config("init must be 'pretrained' or 'random', got '" + init_s +
                   "'");
    }
    std::filesystem::path dir = weights_dir
                                    ? std::filesystem::path(weights_dir)
                                    : zoo::default_weights_dir();
    auto handle = std::make_unique<mrb_model>();
    handle->value = zoo::build_model(model_id, mode, init_seed, dir);
    *out = handle.release();
  });
}

mrb_status mrb_model_param_counts(const mrb_model* m, uint64_t* total,
                                  uint64_t* trainable) {
  if (!m || !total || !trainable) return invalid_argument("null pointer");
  return guarded([&] {
    auto counts = zoo::count_parameters(*m->value);
    *total = static_cast<uint64_t>(counts.total);
    *trainable = static_cast<uint64_t>(counts.trainable);
  });
}

void mrb_model_free(mrb_model* m) { delete m; }

/* ------------------------------------------------------------ commands */

mrb_status mrb_cmd_prepare(const char* dataset_root, uint64_t seed,
                           const char* workspace) {
  if (!dataset_root || !workspace) return invalid_argument("null pointer");
  return guarded([&] { cmd::prepare(dataset_root, seed, workspace); });
}

mrb_status mrb_cmd_train(const char* workspace, const char* model_id,
                         const char* config_path, char** out_run_dir) {
  if (!workspace || !model_id || !config_path)
    return invalid_argument("null pointer");
  return guarded([&] {
    auto dir = cmd::train_run(workspace, model_id, config_path);
    if (out_run_dir) *out_run_dir = dup_string(dir.string());
  });
}

mrb_status mrb_cmd_evaluate(const char* run_dir, char** out_report_path) {
  if (!run_dir) return invalid_argument("null pointer");
  return guarded([&] {
    auto path = cmd::evaluate_run(run_dir);
    if (out_report_path) *out_report_path = dup_string(path.string());
  });
}

mrb_status mrb_cmd_compare(const char* const* run_dirs, size_t n_runs,
                           const char* out_csv, char** out_table) {
  if (!run_dirs || n_runs == 0) return invalid_argument("no run dirs");
  return guarded([&] {
    std::vector<std::filesystem::path> dirs;
    for (size_t i = 0; i < n_runs; ++i) {
      if (!run_dirs[i]) throw_config("null run dir at index " +
                                     std::to_string(i));
      dirs.emplace_back(run_dirs[i]);
    }
    auto table = cmd::compare_runs(
        dirs, out_csv ? std::filesystem::path(out_csv)
                      : std::filesystem::path());
    if (out_table) *out_table = dup_string(table);
  });
}

mrb_status mrb_cmd_curves(const char* run_dir, const char* out_svg,
                          char** out_svg_path) {
  if (!run_dir) return invalid_argument("null pointer");
  return guarded([&] {
    auto path = cmd::curves_run(
        run_dir, out_svg ? std::filesystem::path(out_svg)
                         : std::filesystem::path());
    if (out_svg_path) *out_svg_path = dup_string(path.string());
  });
}

}  // extern "C"
