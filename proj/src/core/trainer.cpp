#include "core/trainer.hpp"

#include <cmath>

#include "core/common.hpp"
#include "core/image.hpp"
#include "core/nn/loss.hpp"
#include "core/optimizer.hpp"
#include "core/rng.hpp"

namespace mribench::train {

namespace {

constexpr std::uint64_t kOrderStream = 0x6f72646572;   // "order"
constexpr std::uint64_t kSampleStream = 0x73616d706c;  // "sampl"
constexpr std::uint64_t kDropStream = 0x64726f70;      // "drop"

int argmax_row(const nn::Tensor& logits, int row) {
  int best = 0;
  for (int j = 1; j < logits.dim(1); ++j) {
    if (logits.at2(row, j) > logits.at2(row, best)) best = j;
  }
  return best;
}

nn::Tensor stack_samples(const std::vector<nn::Tensor>& samples) {
  const auto& first = samples.front();
  nn::Tensor batch({static_cast<int>(samples.size()), first.dim(0),
                    first.dim(1), first.dim(2)});
  std::size_t offset = 0;
  for (const auto& s : samples) {
    std::copy(s.data.begin(), s.data.end(), batch.data.begin() + offset);
    offset += s.data.size();
  }
  return batch;
}

struct Predictions {
  std::vector<int> y_true;
  std::vector<int> y_pred;
  std::vector<std::array<double, metrics::kNumClasses>> probs;
};

// Deterministic batched pass under the eval pipeline.
Predictions collect_predictions(TrainableModel& model, const DataBinding& data,
                                const aug::EvalPipeline& pipeline,
                                int batch_size) {
  Predictions out;
  const std::size_t n = data.entries.size();
  for (std::size_t start = 0; start < n;
       start += static_cast<std::size_t>(batch_size)) {
    std::size_t end = std::min(n, start + static_cast<std::size_t>(batch_size));
    std::vector<nn::Tensor> samples;
    std::vector<int> labels;
    for (std::size_t i = start; i < end; ++i) {
      const auto& entry = data.entries[i];
      samples.push_back(pipeline(load_image((data.root / entry.path).string())));
      labels.push_back(entry.label);
    }
    nn::Tensor logits = model.forward(stack_samples(samples), false);
    nn::Tensor p = nn::softmax(logits);
    for (int r = 0; r < logits.dim(0); ++r) {
      out.y_true.push_back(labels[static_cast<std::size_t>(r)]);
      out.y_pred.push_back(argmax_row(logits, r));
      std::array<double, metrics::kNumClasses> row{};
      for (int j = 0; j < metrics::kNumClasses; ++j) row[j] = p.at2(r, j);
      out.probs.push_back(row);
    }
  }
  return out;
}

}  // namespace

TrainOutcome train_model(TrainableModel& model, const DataBinding& train_data,
                         const DataBinding& val_data, const TrainConfig& cfg,
                         const aug::PreprocessConfig& pre,
                         const std::filesystem::path& checkpoint_path,
                         const std::function<void(const EpochRecord&)>&
                             on_epoch) {
  cfg.validate();
  pre.validate();
  if (train_data.entries.empty()) throw_config("train split is empty");
  if (val_data.entries.empty()) throw_config("val split is empty");

  auto train_pipe = aug::build_train_pipeline(pre);
  auto eval_pipe = aug::build_eval_pipeline(pre);
  auto optimizer = make_optimizer(cfg.optimizer_id,
                                  model.trainable_parameters());

  const std::size_t n_train = train_data.entries.size();

  auto epoch_fn = [&](int epoch, double lr) {
    std::vector<std::size_t> order(n_train);
    for (std::size_t i = 0; i < n_train; ++i) order[i] = i;
    Rng order_rng(derive_seed({cfg.seed, kOrderStream,
                               static_cast<std::uint64_t>(epoch)}));
    order_rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    int step = 0;
    for (std::size_t start = 0; start < n_train;
         start += static_cast<std::size_t>(cfg.batch_size), ++step) {
      std::size_t end =
          std::min(n_train, start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<nn::Tensor> samples;
      std::vector<int> labels;
      for (std::size_t pos = start; pos < end; ++pos) {
        std::size_t idx = order[pos];
        const auto& entry = train_data.entries[idx];
        // Stream keyed by the dataset index: sample i's augmentation never
        // depends on which other samples share its batch.
        Rng sample_rng(derive_seed({cfg.seed, kSampleStream,
                                    static_cast<std::uint64_t>(epoch), idx}));
        samples.push_back(train_pipe(
            load_image((train_data.root / entry.path).string()), sample_rng));
        labels.push_back(entry.label);
      }

      model.reseed(derive_seed({cfg.seed, kDropStream,
                                static_cast<std::uint64_t>(epoch),
                                static_cast<std::uint64_t>(step)}));
      nn::Tensor logits = model.forward(stack_samples(samples), true);
      auto loss = nn::softmax_cross_entropy(logits, labels);
      if (!std::isfinite(loss.loss)) {
        throw_runtime("non-finite training loss at epoch " +
                      std::to_string(epoch) + ", batch " +
                      std::to_string(step) + ", lr " + std::to_string(lr));
      }
      optimizer->zero_grad();
      model.backward(loss.grad_logits);
      optimizer->step(lr);

      loss_sum += loss.loss * static_cast<double>(labels.size());
      for (int r = 0; r < logits.dim(0); ++r) {
        if (argmax_row(logits, r) == labels[static_cast<std::size_t>(r)])
          ++correct;
      }
    }

    EpochRecord rec;
    rec.train_loss = loss_sum / static_cast<double>(n_train);
    rec.train_acc = static_cast<double>(correct) /
                    static_cast<double>(n_train);

    Predictions val = collect_predictions(model, val_data, eval_pipe,
                                          cfg.batch_size);
    rec.val_loss = metrics::mean_cross_entropy(val.probs, val.y_true);
    std::size_t val_correct = 0;
    for (std::size_t i = 0; i < val.y_true.size(); ++i)
      if (val.y_true[i] == val.y_pred[i]) ++val_correct;
    rec.val_acc = static_cast<double>(val_correct) /
                  static_cast<double>(val.y_true.size());
    return rec;
  };

  TrainOutcome outcome;
  outcome.checkpoint_path = checkpoint_path;
  outcome.history = run_epoch_loop(
      cfg,
      [&](int epoch, double lr) {
        EpochRecord rec = epoch_fn(epoch, lr);
        rec.epoch = epoch;
        rec.lr = lr;
        if (on_epoch) on_epoch(rec);
        return rec;
      },
      [&](const EpochRecord& best) {
        model.save_checkpoint(checkpoint_path);
        outcome.best_val_acc = best.val_acc;
      });

  // Leave the model at its best validation accuracy, not its last state.
  model.load_checkpoint(checkpoint_path);
  return outcome;
}

metrics::MetricsReport evaluate_model(TrainableModel& model,
                                      const DataBinding& data,
                                      const aug::PreprocessConfig& pre,
                                      int batch_size) {
  pre.validate();
  if (data.entries.empty()) throw_config("evaluation split is empty");
  if (batch_size < 1) throw_config("batch size must be >= 1");
  auto pipeline = aug::build_eval_pipeline(pre);
  Predictions p = collect_predictions(model, data, pipeline, batch_size);
  return metrics::build_report(p.y_true, p.y_pred, p.probs);
}

}  // namespace mribench::train
