#pragma once

#include "dataset.h"
#include "image.h"
#include "model.h"
#include "mri.h"

namespace urec {

// Coil sensitivities from the auto-calibration region: keep only the mask's
// fully-sampled center columns, inverse-transform per coil, normalize by the
// pixelwise RSS magnitude (epsilon 1e-8).
CoilSensitivities estimate_sensitivities(const MultiCoilKSpace& masked_k,
                                         const SamplingMask& m);

// Everything the backward pass needs from one forward evaluation. Channel
// stacks are stored as per-channel row-major planes.
struct ForwardTrace {
  CoilSensitivities sens;
  std::vector<MultiCoilKSpace> k;  // k⁰ … k^T
  std::vector<std::vector<std::vector<double>>> combined;  // per cascade: 2-channel S*·F⁻¹(kᵗ)
  std::vector<std::vector<std::vector<double>>> pre1;      // per cascade: pre-ReLU stack
  std::vector<std::vector<std::vector<double>>> hidden;    // per cascade: post-ReLU stack
  std::vector<ComplexImage> final_imgs;                    // per-coil ifft of k^T
  RealImage output;                                        // RSS magnitude
};

// Unrolled reconstruction:
//   kᵗ⁺¹ = kᵗ − dc_t · M ⊙ (kᵗ − k⁰) − F(S ⊙ refiner_t(S* ⊙ F⁻¹(kᵗ)))
// followed by the RSS magnitude of F⁻¹(k^T).
ForwardTrace reconstruct_traced(const ModelParams& p, const MultiCoilKSpace& masked_k,
                                const SamplingMask& m);
RealImage reconstruct(const ModelParams& p, const MultiCoilKSpace& masked_k,
                      const SamplingMask& m);

// Reverse-mode pass: given ∂L/∂output, accumulates ∂L/∂θ into grad (length P,
// pre-initialized by the caller).
void reconstruct_backward(const ModelParams& p, const MultiCoilKSpace& masked_k,
                          const SamplingMask& m, const ForwardTrace& trace,
                          const RealImage& output_grad, std::vector<double>& grad);

}  // namespace urec
