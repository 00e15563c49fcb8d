#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dataset.h"
#include "json.hpp"
#include "methods.h"
#include "model.h"

namespace urec {

// Frozen desk-scale defaults; configs/default.json mirrors these exactly.
inline constexpr uint64_t kDefaultMasterSeed = 1;
inline constexpr double kDefaultGamma = 1e-6;
inline constexpr double kDefaultLambda = 16.0;

struct MethodHp {
  double lr = 1e-3;
  size_t batch_size = 4;

  bool operator==(const MethodHp&) const = default;
};

struct TrainSection {
  size_t epochs = 30;
  double lr = 1e-3;
  size_t batch_size = 4;
  ArchConfig arch;

  bool operator==(const TrainSection&) const = default;
};

struct UnlearnSection {
  double budget_fraction = 0.10;
  double retain_fraction = 0.10;
  double gamma = kDefaultGamma;
  double lambda = kDefaultLambda;
  MethodHp ft{2.5e-4, 4};
  MethodHp full_ft{2.5e-4, 4};
  MethodHp ga_l1{1e-3, 4};
  MethodHp nl{4e-3, 1};
  MethodHp ga_l1_ft{1e-3, 4};
  MethodHp nl_ft{4e-3, 4};

  const MethodHp& hp(Method m) const;
  MethodHp& hp(Method m);
  bool operator==(const UnlearnSection&) const = default;
};

struct AblateSection {
  std::vector<Method> methods{Method::Ft, Method::NlFt, Method::GaL1Ft};
  std::vector<double> fractions{0.01, 0.05, 0.10, 0.20, 0.50, 1.00};

  bool operator==(const AblateSection&) const = default;
};

struct Config {
  uint64_t master_seed = kDefaultMasterSeed;
  CorpusConfig data;
  TrainSection train;
  UnlearnSection unlearn;
  AblateSection ablate;
};

bool operator==(const CorpusConfig& a, const CorpusConfig& b);
bool operator==(const Config& a, const Config& b);

// Strict schema: every key must be known and well-typed; unknown keys raise
// UsageError naming the full key path. Absent keys keep the built-in default.
Config parse_config(const nlohmann::json& j);
Config load_config(const std::string& path);

// UNLEARN_RECON_SEED, when set, must be a base-10 unsigned integer and
// replaces the config seed.
uint64_t apply_seed_env(uint64_t config_seed);

// Canonical serialization (all keys explicit) used for snapshots and hashing.
nlohmann::ordered_json config_to_json(const Config& c);
std::string config_sha256(const Config& c);

}  // namespace urec
