#pragma once

#include "image.h"

namespace urec {

// In-place 1-D transforms on a stride-able view; length may be any n ≥ 1
// (radix-2 fast path, O(n²) DFT otherwise). No scaling applied here.
void dft_1d(cplx* data, size_t n, size_t stride, bool inverse);

// Centered unitary 2-D transforms: fftshift ∘ DFT ∘ ifftshift with 1/sqrt(N)
// scaling both ways, so fft2c and ifft2c are exact adjoints and inverses.
ComplexImage fft2c(const ComplexImage& img);
ComplexImage ifft2c(const ComplexImage& img);

}  // namespace urec
