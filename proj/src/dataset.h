#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "image.h"
#include "mri.h"
#include "phantom.h"

namespace urec {

enum class Role { Retain, Forget, RetainSubset, RetainTest, ForgetTest };

const char* role_name(Role r);
Role role_from_name(const std::string& s);
Anatomy role_anatomy(Role r);

struct Sample {
  MultiCoilKSpace masked_kspace;
  SamplingMask mask;
  RealImage target;
  Anatomy anatomy = Anatomy::A;
  std::string id;
};

struct Dataset {
  std::vector<Sample> samples;
  Role role = Role::Retain;
  uint64_t seed = 0;
};

struct CorpusConfig {
  size_t height = 64;
  size_t width = 64;
  size_t n_coils = 4;
  unsigned accel = 8;
  double center_fraction = 0.04;
  size_t n_retain = 200;
  size_t n_forget = 20;
  size_t n_retain_test = 40;
  size_t n_forget_test = 40;
};

struct Corpus {
  Dataset retain;       // D_r
  Dataset forget;       // D_f
  Dataset retain_test;  // D_r^t
  Dataset forget_test;  // D_f^t
};

// One fully simulated sample: phantom → coil-weighted k-space → RSS target →
// per-sample mask → undersampled k-space. Values are quantized to float32 at
// generation time so in-memory corpora and their on-disk round trips train
// identically.
Sample make_sample(Anatomy anatomy, uint64_t sample_seed, const std::string& id,
                   const CorpusConfig& cfg);

// Builds all four splits with disjoint per-sample seed streams derived from
// the master seed. Enforces the 10:1 retain-to-forget ratio.
Corpus build_corpus(const CorpusConfig& cfg, uint64_t master_seed);

// Directory layout: manifest.json + one little-endian float32 binary per
// sample (k-space planes coil-major then row-major, re/im interleaved,
// followed by the row-major target). CRC32 of every binary is recorded in the
// manifest and verified on read; any mismatch aborts the load.
void write_dataset(const Dataset& d, const std::string& dir);
Dataset read_dataset(const std::string& dir);

}  // namespace urec
