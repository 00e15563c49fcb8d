#pragma once

#include <cstdint>
#include <vector>

#include "dataset.h"
#include "model.h"
#include "recon.h"

namespace urec {

enum class LossKind {
  PlainL1,             // mean |pred − y|
  NegatedL1PlusL1Reg,  // −mean |pred − y| + γ‖θ‖₁
  NoisyLabel,          // mean |pred − (y + λn)|
  Composite,           // weighted sum of atomic terms
};

struct LossTerm {
  LossKind kind = LossKind::PlainL1;  // atomic kinds only
  double weight = 1.0;
  double gamma = 0.0;
  double lambda = 0.0;
};

struct LossSpec {
  LossKind kind = LossKind::PlainL1;
  double gamma = 0.0;
  double lambda = 0.0;
  std::vector<LossTerm> terms;  // used when kind == Composite

  static LossSpec plain() { return {}; }
  static LossSpec negated_l1(double gamma) {
    return {LossKind::NegatedL1PlusL1Reg, gamma, 0.0, {}};
  }
  static LossSpec noisy_label(double lambda) {
    return {LossKind::NoisyLabel, 0.0, lambda, {}};
  }
  static LossSpec composite(std::vector<LossTerm> terms) {
    return {LossKind::Composite, 0.0, 0.0, std::move(terms)};
  }
};

// One evaluation unit: a sample plus the seed for its noisy-label draw. The
// seed is carried in the batch so noisy targets are reproducible; per-epoch
// resampling is implemented by deriving a fresh seed per (sample, epoch).
struct BatchItem {
  const Sample* sample = nullptr;
  uint64_t noise_seed = 0;
};

double loss_l1(const RealImage& pred, const RealImage& target);

// Batch-mean loss value and its exact gradient with respect to flatten(θ).
// Throws NumericError if the forward pass produces a non-finite value.
struct LossResult {
  double value = 0.0;
  std::vector<double> grad;
};
LossResult loss_and_grad(const ModelParams& p, const std::vector<BatchItem>& batch,
                         const LossSpec& spec);

// The noisy target y + λn used by NoisyLabel, exposed for tests.
RealImage noisy_target(const RealImage& target, double lambda, uint64_t noise_seed);

}  // namespace urec
