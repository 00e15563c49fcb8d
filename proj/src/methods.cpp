#include "methods.h"

#include <algorithm>
#include <cmath>

#include "errors.h"
#include "loss.h"
#include "rng.h"

namespace urec {
namespace {

struct ForgetStream {
  // Endless reshuffled walk over the forget indices.
  Rng rng;
  size_t n;
  std::vector<size_t> perm;
  size_t pos = 0;

  ForgetStream(uint64_t seed, size_t n_) : rng(seed), n(n_) {}

  size_t next() {
    if (pos == perm.size()) {
      perm = rng.permutation(n);
      pos = 0;
    }
    return perm[pos++];
  }
};

LossSpec forget_loss(const UnlearnConfig& cfg) {
  if (cfg.method == Method::GaL1 || cfg.method == Method::GaL1Ft)
    return LossSpec::negated_l1(cfg.gamma);
  return LossSpec::noisy_label(cfg.lambda);
}

UnlearnResult run_combined(const ModelParams& start, const Dataset& subset, const Dataset& forget,
                           const UnlearnConfig& cfg, size_t epochs, const EpochHook& hook) {
  std::vector<const Sample*> retain_ptrs = sample_ptrs(subset);
  std::vector<const Sample*> forget_ptrs = sample_ptrs(forget);
  const LossSpec fspec = forget_loss(cfg);
  const LossSpec rspec = LossSpec::plain();

  UnlearnResult res;
  res.params = start;
  res.epochs = epochs;
  Adam opt(cfg.lr, start.values.size());
  ForgetStream stream(derive_seed(cfg.seed, "forget-stream"), forget_ptrs.size());

  for (size_t epoch = 0; epoch < epochs; ++epoch) {
    Rng g(derive_seed(cfg.seed, "shuffle", epoch));
    std::vector<size_t> perm = g.permutation(retain_ptrs.size());

    double loss_acc = 0.0;
    for (size_t startb = 0; startb < perm.size(); startb += cfg.batch_size) {
      size_t end = std::min(startb + cfg.batch_size, perm.size());
      std::vector<BatchItem> rbatch, fbatch;
      for (size_t i = startb; i < end; ++i) rbatch.push_back(BatchItem{retain_ptrs[perm[i]], 0});
      if (!forget_ptrs.empty()) {
        for (size_t i = startb; i < end; ++i) {
          size_t fi = stream.next();
          fbatch.push_back(BatchItem{forget_ptrs[fi], derive_seed(cfg.seed, "noise", fi, epoch)});
        }
      }

      LossResult rl, fl;
      try {
        rl = loss_and_grad(res.params, rbatch, rspec);
        if (!fbatch.empty()) fl = loss_and_grad(res.params, fbatch, fspec);
      } catch (const NumericError& e) {
        throw NumericError("epoch " + std::to_string(epoch) + ": " + e.what());
      }

      double value = rl.value + fl.value;
      std::vector<double> grad = std::move(rl.grad);
      if (!fl.grad.empty())
        for (size_t i = 0; i < grad.size(); ++i) grad[i] += fl.grad[i];
      opt.step(res.params.values, grad);
      loss_acc += value * static_cast<double>(end - startb);
    }
    double mean_loss = loss_acc / static_cast<double>(perm.size());
    res.epoch_losses.push_back(mean_loss);
    if (hook) hook(epoch, res.params, mean_loss);
  }
  return res;
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::Ft: return "ft";
    case Method::FullFt: return "full_ft";
    case Method::GaL1: return "ga_l1";
    case Method::Nl: return "nl";
    case Method::GaL1Ft: return "ga_l1_ft";
    case Method::NlFt: return "nl_ft";
  }
  throw UsageError("unknown method");
}

Method method_from_name(const std::string& name) {
  for (Method m : all_methods())
    if (name == method_name(m)) return m;
  throw UsageError("unknown method '" + name + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> ms = {Method::Ft,  Method::FullFt, Method::GaL1,
                                         Method::Nl, Method::GaL1Ft, Method::NlFt};
  return ms;
}

bool method_uses_retain(Method m) {
  return m == Method::Ft || m == Method::FullFt || m == Method::GaL1Ft || m == Method::NlFt;
}

bool method_uses_forget(Method m) {
  return m == Method::GaL1 || m == Method::Nl || m == Method::GaL1Ft || m == Method::NlFt;
}

UnlearnResult run_unlearn(const ModelParams& start, const Dataset& retain, const Dataset& forget,
                          const UnlearnConfig& cfg, const EpochHook& hook) {
  if (cfg.gamma < 0.0) throw UsageError("gamma must be non-negative");
  if (cfg.lambda < 0.0) throw UsageError("lambda must be non-negative");
  if (cfg.batch_size == 0) throw UsageError("batch_size must be positive");
  size_t epochs = unlearn_budget(cfg.train_epochs, cfg.budget_fraction);

  TrainConfig tc;
  tc.epochs = epochs;
  tc.lr = cfg.lr;
  tc.batch_size = cfg.batch_size;
  tc.seed = cfg.seed;

  auto finish = [&](TrainResult&& tr, std::vector<std::string> subset_ids) {
    UnlearnResult res;
    res.params = std::move(tr.params);
    res.epoch_losses = std::move(tr.epoch_losses);
    res.epochs = epochs;
    res.subset_ids = std::move(subset_ids);
    return res;
  };

  switch (cfg.method) {
    case Method::Ft: {
      if (retain.samples.empty()) throw UsageError("ft: empty retain split");
      Dataset sub = subset_retain(retain, cfg.retain_fraction, cfg.seed);
      std::vector<std::string> ids;
      for (const Sample& s : sub.samples) ids.push_back(s.id);
      return finish(train_loop(start, sample_ptrs(sub), LossSpec::plain(), tc, hook),
                    std::move(ids));
    }
    case Method::FullFt: {
      if (retain.samples.empty()) throw UsageError("full_ft: empty retain split");
      std::vector<std::string> ids;
      for (const Sample& s : retain.samples) ids.push_back(s.id);
      return finish(train_loop(start, sample_ptrs(retain), LossSpec::plain(), tc, hook),
                    std::move(ids));
    }
    case Method::GaL1:
    case Method::Nl: {
      if (forget.samples.empty()) throw UsageError("forget-only method: empty forget split");
      return finish(train_loop(start, sample_ptrs(forget), forget_loss(cfg), tc, hook), {});
    }
    case Method::GaL1Ft:
    case Method::NlFt: {
      if (retain.samples.empty()) throw UsageError("combined method: empty retain split");
      Dataset sub = subset_retain(retain, cfg.retain_fraction, cfg.seed);
      UnlearnResult res = run_combined(start, sub, forget, cfg, epochs, hook);
      for (const Sample& s : sub.samples) res.subset_ids.push_back(s.id);
      return res;
    }
  }
  throw UsageError("unknown method");
}

}  // namespace urec
