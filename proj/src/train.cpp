#include "train.h"

#include <cmath>
#include <string>

#include "errors.h"
#include "rng.h"

namespace urec {
namespace {

size_t guarded_ceil_product(size_t n, double fraction) {
  // 0.1 * 30 is 3.0000000000000004 in binary; back off one ulp-scale epsilon
  // so nominally exact products do not round up to an extra unit.
  double x = fraction * static_cast<double>(n);
  double c = std::ceil(x - 1e-9);
  return c < 0.0 ? 0 : static_cast<size_t>(c);
}

}  // namespace

size_t unlearn_budget(size_t train_epochs, double fraction) {
  if (fraction <= 0.0 || fraction > 1.0)
    throw UsageError("budget fraction must be in (0, 1]");
  return guarded_ceil_product(train_epochs, fraction);
}

size_t subset_count(size_t n, double fraction) {
  if (fraction <= 0.0 || fraction > 1.0)
    throw UsageError("retain fraction must be in (0, 1]");
  return guarded_ceil_product(n, fraction);
}

Dataset subset_retain(const Dataset& retain, double fraction, uint64_t seed) {
  size_t m = subset_count(retain.samples.size(), fraction);
  Rng g(derive_seed(seed, "subset"));
  std::vector<size_t> perm = g.permutation(retain.samples.size());
  Dataset out;
  out.role = Role::RetainSubset;
  out.seed = seed;
  out.samples.reserve(m);
  for (size_t i = 0; i < m; ++i) out.samples.push_back(retain.samples[perm[i]]);
  return out;
}

void Adam::step(std::vector<double>& params, const std::vector<double>& grad) {
  if (params.size() != m.size() || grad.size() != m.size())
    throw UsageError("Adam::step: size mismatch");
  ++t;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (size_t i = 0; i < params.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
    params[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
  }
}

TrainResult train_loop(const ModelParams& init, const std::vector<const Sample*>& data,
                       const LossSpec& loss, const TrainConfig& cfg, const EpochHook& hook) {
  if (data.empty()) throw UsageError("train_loop: empty dataset");
  if (cfg.batch_size == 0) throw UsageError("train_loop: batch_size must be positive");

  TrainResult res;
  res.params = init;
  Adam opt(cfg.lr, init.values.size());

  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng g(derive_seed(cfg.seed, "shuffle", epoch));
    std::vector<size_t> perm = g.permutation(data.size());

    double loss_acc = 0.0;
    for (size_t start = 0; start < perm.size(); start += cfg.batch_size) {
      size_t end = std::min(start + cfg.batch_size, perm.size());
      std::vector<BatchItem> batch;
      batch.reserve(end - start);
      for (size_t i = start; i < end; ++i)
        batch.push_back(BatchItem{data[perm[i]], derive_seed(cfg.seed, "noise", perm[i], epoch)});
      LossResult lr_res;
      try {
        lr_res = loss_and_grad(res.params, batch, loss);
      } catch (const NumericError& e) {
        throw NumericError("epoch " + std::to_string(epoch) + ": " + e.what());
      }
      opt.step(res.params.values, lr_res.grad);
      loss_acc += lr_res.value * static_cast<double>(end - start);
    }
    double mean_loss = loss_acc / static_cast<double>(perm.size());
    res.epoch_losses.push_back(mean_loss);
    if (hook) hook(epoch, res.params, mean_loss);
  }
  return res;
}

std::vector<const Sample*> sample_ptrs(const Dataset& d) {
  std::vector<const Sample*> out;
  out.reserve(d.samples.size());
  for (const Sample& s : d.samples) out.push_back(&s);
  return out;
}

}  // namespace urec
