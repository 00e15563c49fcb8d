#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "errors.h"

namespace urec {

// Unrolled cascade architecture: per cascade one data-consistency weight and
// a 2-layer 3×3 convolutional refiner (2 → channels → 2, re/im as channels).
struct ArchConfig {
  size_t cascades = 3;
  size_t channels = 4;

  bool operator==(const ArchConfig&) const = default;
};

// Parameters per cascade, in flatten order:
//   dc_weight (1), conv1 [channels][2][3][3], bias1 [channels],
//   conv2 [2][channels][3][3], bias2 [2]
// giving 37·channels + 3 values per cascade.
size_t param_count(const ArchConfig& arch);

// All trainable parameters as one flat vector plus offset accessors, so the
// flatten/unflatten bijection is the identity on storage.
struct ModelParams {
  ArchConfig arch;
  std::vector<double> values;

  size_t cascade_base(size_t t) const { return t * (37 * arch.channels + 3); }
  double& dc(size_t t) { return values[cascade_base(t)]; }
  double dc(size_t t) const { return values[cascade_base(t)]; }
  double* conv1(size_t t) { return values.data() + cascade_base(t) + 1; }
  const double* conv1(size_t t) const { return values.data() + cascade_base(t) + 1; }
  double* bias1(size_t t) { return values.data() + cascade_base(t) + 1 + 18 * arch.channels; }
  const double* bias1(size_t t) const {
    return values.data() + cascade_base(t) + 1 + 18 * arch.channels;
  }
  double* conv2(size_t t) { return values.data() + cascade_base(t) + 1 + 19 * arch.channels; }
  const double* conv2(size_t t) const {
    return values.data() + cascade_base(t) + 1 + 19 * arch.channels;
  }
  double* bias2(size_t t) { return values.data() + cascade_base(t) + 1 + 37 * arch.channels; }
  const double* bias2(size_t t) const {
    return values.data() + cascade_base(t) + 1 + 37 * arch.channels;
  }
};

// Deterministic initialization: dc_weight = 1.0, biases zero, conv weights
// uniform in ±1/sqrt(fan_in) with fan_in = in_channels · 9.
ModelParams init_params(const ArchConfig& arch, uint64_t seed);

std::vector<double> flatten(const ModelParams& p);
ModelParams unflatten(const ArchConfig& arch, const std::vector<double>& v);

// Checkpoint file: magic, version, architecture JSON, float32 parameter
// payload, CRC32 trailer. Loading verifies magic/version/CRC and the payload
// length against the architecture.
void save_checkpoint(const ModelParams& p, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace urec
