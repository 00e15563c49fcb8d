#pragma once

#include <cstdint>
#include <vector>

#include "image.h"

namespace urec {

// Cartesian column mask: a column is either fully acquired or fully skipped.
struct SamplingMask {
  size_t width = 0;
  std::vector<bool> kept;      // one flag per column
  double accel = 1.0;          // nominal acceleration factor
  double center_fraction = 0;  // fraction of always-kept center columns

  size_t n_kept() const {
    size_t n = 0;
    for (bool b : kept) n += b;
    return n;
  }
};

// round(width × center_fraction) contiguous center columns (round half away
// from zero) plus every accel-th remaining column, starting at a seed-derived
// offset. Realized acceleration is therefore slightly below nominal.
SamplingMask make_mask(size_t width, unsigned accel, double center_fraction,
                       uint64_t seed);

// Per-coil centered unitary FFT of the sensitivity-weighted image.
MultiCoilKSpace forward_model(const ComplexImage& image, const CoilSensitivities& maps);

// Zero every column the mask drops; kept columns pass through bit-identical.
MultiCoilKSpace undersample(const MultiCoilKSpace& k, const SamplingMask& m);

// Root-sum-of-squares magnitude of the per-coil inverse transforms — the
// ground-truth convention for multi-coil data.
RealImage rss_target(const MultiCoilKSpace& k);

// Summary statistic separating the two phantom families: mean absolute
// horizontal finite difference of a magnitude image. Family A is smooth
// (< 0.10), family B is striped (> 0.20); threshold at 0.15.
double anatomy_statistic(const RealImage& magnitude);
constexpr double kAnatomyThreshold = 0.15;

}  // namespace urec
