#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dataset.h"
#include "train.h"

namespace urec {

enum class Method { Ft, FullFt, GaL1, Nl, GaL1Ft, NlFt };

const char* method_name(Method m);
Method method_from_name(const std::string& name);
const std::vector<Method>& all_methods();

bool method_uses_retain(Method m);
bool method_uses_forget(Method m);

struct UnlearnConfig {
  Method method = Method::Ft;
  double gamma = 0.0;           // weight of the parameter L1 penalty (ga_l1 family)
  double lambda = 0.0;          // label noise scale (nl family)
  double retain_fraction = 0.1; // share of the retain split visible to the run
  double budget_fraction = 0.1; // share of the training epochs granted
  size_t train_epochs = 30;     // epoch count of the model being unlearned
  double lr = 1e-3;
  size_t batch_size = 4;
  uint64_t seed = 0;
};

struct UnlearnResult {
  ModelParams params;
  std::vector<double> epoch_losses;
  size_t epochs = 0;
  std::vector<std::string> subset_ids; // retain samples the run actually saw
};

// Applies the configured unlearning method to `start`. Optimizer state is
// fresh (Adam reinitialized); retain-side methods draw a seeded subset;
// combined methods pair each retain batch with an equally sized forget batch
// from a cycling reshuffled stream and take one Adam step on the summed loss.
UnlearnResult run_unlearn(const ModelParams& start, const Dataset& retain, const Dataset& forget,
                          const UnlearnConfig& cfg, const EpochHook& hook = nullptr);

}  // namespace urec
