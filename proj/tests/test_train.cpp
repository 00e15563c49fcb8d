#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "dataset.h"
#include "doctest.h"
#include "errors.h"
#include "loss.h"
#include "rng.h"
#include "train.h"

using namespace urec;

namespace {

CorpusConfig tiny_config() {
  CorpusConfig cfg;
  cfg.height = 16;
  cfg.width = 16;
  cfg.n_coils = 2;
  cfg.accel = 4;
  cfg.center_fraction = 0.125;
  cfg.n_retain = 10;
  cfg.n_forget = 1;
  cfg.n_retain_test = 2;
  cfg.n_forget_test = 2;
  return cfg;
}

Dataset tiny_split(Role role, size_t n, uint64_t seed) {
  Dataset d;
  d.role = role;
  d.seed = seed;
  CorpusConfig cfg = tiny_config();
  for (size_t i = 0; i < n; ++i)
    d.samples.push_back(make_sample(role_anatomy(role), derive_seed(seed, "s", i),
                                    role_name(role) + std::to_string(i), cfg));
  return d;
}

}  // namespace

TEST_CASE("epoch budget rounds up with a guard against binary noise") {
  CHECK(unlearn_budget(30, 0.1) == 3);
  CHECK(unlearn_budget(50, 0.1) == 5);
  CHECK(unlearn_budget(200, 0.1) == 20);
  CHECK(unlearn_budget(1, 0.1) == 1);
  CHECK(unlearn_budget(10, 0.25) == 3);
  CHECK(unlearn_budget(10, 0.05) == 1);
  CHECK(unlearn_budget(7, 1.0) == 7);
  CHECK(unlearn_budget(3, 0.34) == 2);
  CHECK_THROWS_AS(unlearn_budget(30, 0.0), UsageError);
  CHECK_THROWS_AS(unlearn_budget(30, -0.1), UsageError);
  CHECK_THROWS_AS(unlearn_budget(30, 1.0001), UsageError);
}

TEST_CASE("subset count rounds the same way") {
  CHECK(subset_count(200, 0.1) == 20);
  CHECK(subset_count(200, 0.01) == 2);
  CHECK(subset_count(10, 0.05) == 1);
  CHECK(subset_count(10, 1.0) == 10);
  CHECK(subset_count(3, 0.5) == 2);
  CHECK_THROWS_AS(subset_count(10, 0.0), UsageError);
}

TEST_CASE("retain subsets are seeded draws without replacement") {
  Dataset retain = tiny_split(Role::Retain, 10, 3);
  Dataset sub = subset_retain(retain, 0.3, 17);
  CHECK(sub.role == Role::RetainSubset);
  CHECK(sub.samples.size() == 3);
  std::set<std::string> ids;
  for (const Sample& s : sub.samples) ids.insert(s.id);
  CHECK(ids.size() == 3);  // no repeats
  std::set<std::string> pool;
  for (const Sample& s : retain.samples) pool.insert(s.id);
  for (const std::string& id : ids) CHECK(pool.count(id) == 1);

  Dataset again = subset_retain(retain, 0.3, 17);
  for (size_t i = 0; i < sub.samples.size(); ++i)
    CHECK(sub.samples[i].id == again.samples[i].id);
  Dataset other = subset_retain(retain, 0.3, 18);
  bool differs = other.samples.size() != sub.samples.size();
  for (size_t i = 0; !differs && i < sub.samples.size(); ++i)
    differs = other.samples[i].id != sub.samples[i].id;
  CHECK(differs);
}

TEST_CASE("full-fraction subset is the whole retain set reordered") {
  Dataset retain = tiny_split(Role::Retain, 10, 4);
  Dataset sub = subset_retain(retain, 1.0, 9);
  CHECK(sub.samples.size() == retain.samples.size());
  std::set<std::string> a, b;
  for (const Sample& s : retain.samples) a.insert(s.id);
  for (const Sample& s : sub.samples) b.insert(s.id);
  CHECK(a == b);
}

TEST_CASE("adam matches a hand-computed first step") {
  Adam opt(0.1, 2);
  std::vector<double> params{1.0, -2.0};
  std::vector<double> grad{0.5, -1.5};
  opt.step(params, grad);
  // First step: m̂ = g, v̂ = g², so Δ = lr · g / (|g| + eps) ≈ lr · sign(g).
  double d0 = 0.1 * 0.5 / (std::sqrt(0.25) + 1e-8);
  double d1 = 0.1 * -1.5 / (std::sqrt(2.25) + 1e-8);
  CHECK(params[0] == doctest::Approx(1.0 - d0).epsilon(1e-15));
  CHECK(params[1] == doctest::Approx(-2.0 - d1).epsilon(1e-15));

  // Second step with the same gradient keeps moving in the same direction.
  std::vector<double> before = params;
  opt.step(params, grad);
  CHECK(params[0] < before[0]);
  CHECK(params[1] > before[1]);
}

TEST_CASE("adam rejects mismatched sizes") {
  Adam opt(0.1, 2);
  std::vector<double> params{1.0, 2.0, 3.0};
  std::vector<double> grad{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(opt.step(params, grad), UsageError);
}

TEST_CASE("zero epochs returns the initial parameters untouched") {
  Dataset d = tiny_split(Role::Retain, 4, 5);
  ModelParams p = init_params({2, 2}, 1);
  TrainConfig cfg;
  cfg.epochs = 0;
  TrainResult r = train_loop(p, sample_ptrs(d), LossSpec::plain(), cfg);
  CHECK(r.params.values == p.values);
  CHECK(r.epoch_losses.empty());
}

TEST_CASE("training is deterministic and reduces the loss") {
  Dataset d = tiny_split(Role::Retain, 8, 6);
  ModelParams p = init_params({2, 2}, 2);
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.lr = 1e-3;
  cfg.batch_size = 3;  // exercises the final short batch
  cfg.seed = 11;

  std::vector<size_t> hook_epochs;
  TrainResult a = train_loop(p, sample_ptrs(d), LossSpec::plain(), cfg,
                             [&](size_t e, const ModelParams&, double) {
                               hook_epochs.push_back(e);
                             });
  TrainResult b = train_loop(p, sample_ptrs(d), LossSpec::plain(), cfg);
  CHECK(a.params.values == b.params.values);
  CHECK(a.epoch_losses == b.epoch_losses);
  CHECK(hook_epochs == std::vector<size_t>{0, 1, 2, 3});
  REQUIRE(a.epoch_losses.size() == 4);
  CHECK(a.epoch_losses.back() < a.epoch_losses.front());

  TrainConfig other = cfg;
  other.seed = 12;
  TrainResult c = train_loop(p, sample_ptrs(d), LossSpec::plain(), other);
  CHECK(c.params.values != a.params.values);
}

TEST_CASE("batch size larger than the dataset still trains") {
  Dataset d = tiny_split(Role::Forget, 2, 7);
  ModelParams p = init_params({2, 2}, 3);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 16;
  TrainResult r = train_loop(p, sample_ptrs(d), LossSpec::plain(), cfg);
  CHECK(r.epoch_losses.size() == 2);
  CHECK(r.params.values != p.values);
}

TEST_CASE("non-finite data aborts with the epoch in the message") {
  Dataset d = tiny_split(Role::Retain, 3, 8);
  d.samples[1].target.data[0] = std::nan("");
  ModelParams p = init_params({2, 2}, 4);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 4;
  try {
    train_loop(p, sample_ptrs(d), LossSpec::plain(), cfg);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("empty data and zero batch size are usage errors") {
  ModelParams p = init_params({2, 2}, 5);
  TrainConfig cfg;
  CHECK_THROWS_AS(train_loop(p, {}, LossSpec::plain(), cfg), UsageError);
  Dataset d = tiny_split(Role::Retain, 2, 9);
  cfg.batch_size = 0;
  CHECK_THROWS_AS(train_loop(p, sample_ptrs(d), LossSpec::plain(), cfg), UsageError);
}
