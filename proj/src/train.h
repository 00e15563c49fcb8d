#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "dataset.h"
#include "loss.h"
#include "model.h"

namespace urec {

// Number of optimization epochs granted to an unlearning run: ceil of
// fraction * train_epochs, guarded against FP noise just below integers.
size_t unlearn_budget(size_t train_epochs, double fraction);

// Index count for a retain subset: ceil of fraction * n, same guard.
size_t subset_count(size_t n, double fraction);

// Draws the subset by seeded permutation without replacement.
Dataset subset_retain(const Dataset& retain, double fraction, uint64_t seed);

struct Adam {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<double> m, v;
  size_t t = 0;

  explicit Adam(double lr_, size_t n_params) : lr(lr_), m(n_params, 0.0), v(n_params, 0.0) {}
  void step(std::vector<double>& params, const std::vector<double>& grad);
};

struct TrainConfig {
  size_t epochs = 30;
  double lr = 1e-3;
  size_t batch_size = 4;
  uint64_t seed = 0;
};

// Called after each completed epoch (0-based index, mean sample-weighted loss).
using EpochHook = std::function<void(size_t epoch, const ModelParams& p, double loss)>;

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_losses;
};

// Runs `cfg.epochs` epochs of Adam over `data` with the given loss. Batches
// come from a fresh seeded permutation each epoch; the final short batch is
// kept. Non-finite losses abort with the epoch index in the message.
TrainResult train_loop(const ModelParams& init, const std::vector<const Sample*>& data,
                       const LossSpec& loss, const TrainConfig& cfg,
                       const EpochHook& hook = nullptr);

std::vector<const Sample*> sample_ptrs(const Dataset& d);

}  // namespace urec
