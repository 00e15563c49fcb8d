#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "errors.h"

namespace urec {

using cplx = std::complex<double>;

// 2-D complex array, row-major. The image-domain and k-space-domain carrier.
struct ComplexImage {
  size_t height = 0;
  size_t width = 0;
  std::vector<cplx> data;

  ComplexImage() = default;
  ComplexImage(size_t h, size_t w) : height(h), width(w), data(h * w) {}

  cplx& at(size_t r, size_t c) { return data[r * width + c]; }
  const cplx& at(size_t r, size_t c) const { return data[r * width + c]; }
  size_t size() const { return data.size(); }
};

// 2-D real array, row-major. Targets and reconstructed magnitudes.
struct RealImage {
  size_t height = 0;
  size_t width = 0;
  std::vector<double> data;

  RealImage() = default;
  RealImage(size_t h, size_t w) : height(h), width(w), data(h * w, 0.0) {}

  double& at(size_t r, size_t c) { return data[r * width + c]; }
  const double& at(size_t r, size_t c) const { return data[r * width + c]; }
  size_t size() const { return data.size(); }
};

struct CoilSensitivities {
  size_t n_coils = 0;
  std::vector<ComplexImage> maps;  // one per coil, shared shape
};

struct MultiCoilKSpace {
  size_t n_coils = 0;
  std::vector<ComplexImage> planes;  // one per coil, shared shape

  size_t height() const { return planes.empty() ? 0 : planes[0].height; }
  size_t width() const { return planes.empty() ? 0 : planes[0].width; }
};

inline void require_same_shape(const ComplexImage& a, const ComplexImage& b,
                               const char* what) {
  if (a.height != b.height || a.width != b.width)
    throw DataError(std::string(what) + ": shape mismatch");
}

inline void require_same_shape(const RealImage& a, const RealImage& b,
                               const char* what) {
  if (a.height != b.height || a.width != b.width)
    throw DataError(std::string(what) + ": shape mismatch");
}

inline bool all_finite(const ComplexImage& img) {
  for (const cplx& v : img.data)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

inline bool all_finite(const RealImage& img) {
  for (double v : img.data)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace urec
