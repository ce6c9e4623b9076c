#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mribench::train {

struct TrainConfig {
  double base_lr = 0.001;
  int lr_step = 8;        // epochs between decays
  double lr_gamma = 0.1;  // decay factor
  int patience = 8;       // epochs without val-accuracy improvement
  int batch_size = 32;
  int max_epochs = 100;
  std::uint64_t seed = 42;
  std::string optimizer_id = "adam";

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
};

struct TrainingHistory {
  std::vector<EpochRecord> records;
  int best_epoch = -1;
  bool stopped_early = false;
};

// Step decay: base_lr * gamma^floor(epoch / lr_step). The training loop calls
// this every epoch, so the stepped schedule and the closed form are the same
// expression by construction.
double lr_at(int epoch, const TrainConfig& cfg);

// True iff the last `patience` epochs each failed to strictly exceed the best
// val_acc seen before them. Ties do not reset the counter.
bool should_stop(const TrainingHistory& history, int patience);

// Earliest epoch index attaining the maximum val_acc.
int select_best(const TrainingHistory& history);

// Shared control flow for real training and synthetic simulations. epoch_fn
// produces the record for one epoch; on_improved fires whenever val_acc
// strictly exceeds the previous best (checkpoint hook).
TrainingHistory run_epoch_loop(
    const TrainConfig& cfg,
    const std::function<EpochRecord(int epoch, double lr)>& epoch_fn,
    const std::function<void(const EpochRecord&)>& on_improved = {});

}  // namespace mribench::train
