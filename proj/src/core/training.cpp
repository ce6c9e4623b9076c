#include "core/training.hpp"

#include <cmath>

#include "core/common.hpp"

namespace mribench::train {

void TrainConfig::validate() const {
  if (base_lr <= 0.0) throw_config("train.base_lr must be > 0");
  if (lr_step < 1) throw_config("train.lr_step must be >= 1");
  if (lr_gamma <= 0.0 || lr_gamma >= 1.0)
    throw_config("train.lr_gamma must be in (0, 1)");
  if (patience < 1) throw_config("train.patience must be >= 1");
  if (batch_size < 1) throw_config("train.batch_size must be >= 1");
  if (max_epochs < 1) throw_config("train.max_epochs must be >= 1");
  if (optimizer_id != "adam" && optimizer_id != "sgd")
    throw_config("train.optimizer must be one of {adam, sgd}, got '" +
                 optimizer_id + "'");
}

double lr_at(int epoch, const TrainConfig& cfg) {
  if (epoch < 0) throw_runtime("lr_at: epoch must be >= 0");
  int k = epoch / cfg.lr_step;
  return cfg.base_lr * std::pow(cfg.lr_gamma, static_cast<double>(k));
}

bool should_stop(const TrainingHistory& history, int patience) {
  if (history.records.empty())
    throw_runtime("should_stop: history must be nonempty");
  double best = -1.0;
  int since_improve = 0;
  for (const auto& rec : history.records) {
    if (rec.val_acc > best) {
      best = rec.val_acc;
      since_improve = 0;
    } else {
      ++since_improve;
    }
  }
  return since_improve >= patience;
}

int select_best(const TrainingHistory& history) {
  if (history.records.empty())
    throw_runtime("select_best: history must be nonempty");
  int best = 0;
  for (std::size_t i = 1; i < history.records.size(); ++i) {
    if (history.records[i].val_acc >
        history.records[static_cast<std::size_t>(best)].val_acc)
      best = static_cast<int>(i);
  }
  return best;
}

TrainingHistory run_epoch_loop(
    const TrainConfig& cfg,
    const std::function<EpochRecord(int epoch, double lr)>& epoch_fn,
    const std::function<void(const EpochRecord&)>& on_improved) {
  cfg.validate();
  TrainingHistory history;
  double best_acc = -1.0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    double lr = lr_at(epoch, cfg);
    EpochRecord rec = epoch_fn(epoch, lr);
    rec.epoch = epoch;
    rec.lr = lr;
    history.records.push_back(rec);
    if (rec.val_acc > best_acc) {
      best_acc = rec.val_acc;
      history.best_epoch = epoch;
      if (on_improved) on_improved(rec);
    }
    if (should_stop(history, cfg.patience)) {
      history.stopped_early = true;
      break;
    }
  }
  return history;
}

}  // namespace mribench::train
