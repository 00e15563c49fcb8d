#pragma once

#include <cstdint>

#include "image.h"

namespace urec {

enum class Anatomy { A, B };  // A = retain-like, B = forget-like

// Two-family synthetic phantom generator, deterministic in (anatomy, seed, size).
//
// Family A: nested smooth ellipses with paired dark "ventricles", a few small
// bright inclusions, and a low-amplitude smooth internal texture — smooth
// along both axes.
// Family B: an elongated envelope filled with full-contrast vertical stripes
// (34–44 cycles across the field of view) plus one narrow bright ridge.
// Under the column-wise undersampling mask the stripes alias severely, which
// is what creates a measurable domain gap between the families.
//
// Separability: the mean absolute horizontal finite difference of the
// magnitude (see anatomy_statistic in mri.h) is < 0.10 for family A and
// > 0.20 for family B; a 0.15 threshold classifies the families exactly.
//
// Magnitude is normalized to [0, 1]; phase is smooth with amplitude 0.05.
ComplexImage make_phantom(Anatomy anatomy, uint64_t seed, size_t height, size_t width);

// Smooth complex coil profiles: Gaussian magnitude lobes centered at distinct
// jittered border angles (2πc/n_coils, radius 1.1 in [-1,1] coordinates,
// σ = 0.9) with a linear phase ramp per coil, normalized pixelwise so that
// Σ_c |S_c|² = 1.
CoilSensitivities make_coil_maps(size_t n_coils, size_t height, size_t width,
                                 uint64_t seed);

}  // namespace urec
