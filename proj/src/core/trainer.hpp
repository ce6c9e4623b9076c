#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "core/augment.hpp"
#include "core/dataset.hpp"
#include "core/metrics.hpp"
#include "core/models/zoo.hpp"
#include "core/training.hpp"

namespace mribench::train {

// What the loop needs from a model. zoo::Model satisfies it through ModelRef;
// tests drive the loop with stubs.
class TrainableModel {
 public:
  virtual ~TrainableModel() = default;
  virtual nn::Tensor forward(const nn::Tensor& batch, bool train) = 0;
  virtual void backward(const nn::Tensor& grad_logits) = 0;
  virtual std::vector<nn::Parameter*> trainable_parameters() = 0;
  virtual void reseed(std::uint64_t) {}
  virtual void save_checkpoint(const std::filesystem::path& path) const = 0;
  virtual void load_checkpoint(const std::filesystem::path& path) = 0;
};

class ModelRef : public TrainableModel {
 public:
  explicit ModelRef(zoo::Model& model) : model_(model) {}
  nn::Tensor forward(const nn::Tensor& batch, bool train) override {
    return model_.forward(batch, train);
  }
  void backward(const nn::Tensor& grad_logits) override {
    model_.backward(grad_logits);
  }
  std::vector<nn::Parameter*> trainable_parameters() override {
    return model_.trainable_parameters();
  }
  void reseed(std::uint64_t seed) override { model_.reseed(seed); }
  void save_checkpoint(const std::filesystem::path& path) const override {
    model_.save_checkpoint(path);
  }
  void load_checkpoint(const std::filesystem::path& path) override {
    model_.load_checkpoint(path);
  }

 private:
  zoo::Model& model_;
};

// A split resolved against the dataset root it was produced from.
struct DataBinding {
  std::filesystem::path root;
  std::vector<data::ManifestEntry> entries;
};

struct TrainOutcome {
  TrainingHistory history;
  std::filesystem::path checkpoint_path;
  double best_val_acc = 0.0;
};

// Full protocol loop: per epoch one shuffled pass over the train split
// under the stochastic pipeline, then a deterministic eval pass over the val
// split; checkpoint on strict val-accuracy improvement; stop on patience or
// the epoch cap; best checkpoint restored before returning.
//
// Sample order and every stochastic stream are pure functions of
// (cfg.seed, epoch), so a run is reproducible on a fixed machine regardless
// of how loading is parallelized.
TrainOutcome train_model(TrainableModel& model, const DataBinding& train_data,
                         const DataBinding& val_data, const TrainConfig& cfg,
                         const aug::PreprocessConfig& pre,
                         const std::filesystem::path& checkpoint_path,
                         const std::function<void(const EpochRecord&)>&
                             on_epoch = {});

// Deterministic eval-pipeline pass assembling the full metrics report.
metrics::MetricsReport evaluate_model(TrainableModel& model,
                                      const DataBinding& data,
                                      const aug::PreprocessConfig& pre,
                                      int batch_size);

}  // namespace mribench::train
