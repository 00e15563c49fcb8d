#include "mri.h"

#include <cmath>

#include "fft.h"
#include "rng.h"

namespace urec {

SamplingMask make_mask(size_t width, unsigned accel, double center_fraction,
                       uint64_t seed) {
  if (accel < 1) throw DataError("make_mask: accel must be >= 1");
  if (center_fraction <= 0.0 || center_fraction >= 1.0)
    throw DataError("make_mask: center_fraction must be in (0, 1)");
  size_t n_center = static_cast<size_t>(
      std::llround(static_cast<double>(width) * center_fraction));
  if (n_center >= width) throw DataError("make_mask: center block covers the full width");

  SamplingMask m;
  m.width = width;
  m.accel = accel;
  m.center_fraction = center_fraction;
  m.kept.assign(width, false);
  size_t start = (width - n_center) / 2;
  for (size_t c = start; c < start + n_center; ++c) m.kept[c] = true;

  Rng g(derive_seed(seed, "mask"));
  uint64_t offset = g.below(accel);
  size_t i = 0;  // index over non-center columns, in order
  for (size_t c = 0; c < width; ++c) {
    if (c >= start && c < start + n_center) continue;
    if (i % accel == offset) m.kept[c] = true;
    ++i;
  }
  return m;
}

MultiCoilKSpace forward_model(const ComplexImage& image, const CoilSensitivities& maps) {
  MultiCoilKSpace k;
  k.n_coils = maps.n_coils;
  for (const ComplexImage& s : maps.maps) {
    require_same_shape(s, image, "forward_model");
    ComplexImage weighted(image.height, image.width);
    for (size_t i = 0; i < image.size(); ++i) weighted.data[i] = s.data[i] * image.data[i];
    k.planes.push_back(fft2c(weighted));
  }
  return k;
}

MultiCoilKSpace undersample(const MultiCoilKSpace& k, const SamplingMask& m) {
  if (k.width() != m.width) throw DataError("undersample: mask width mismatch");
  MultiCoilKSpace out = k;
  for (ComplexImage& plane : out.planes)
    for (size_t r = 0; r < plane.height; ++r)
      for (size_t c = 0; c < plane.width; ++c)
        if (!m.kept[c]) plane.at(r, c) = 0.0;
  return out;
}

RealImage rss_target(const MultiCoilKSpace& k) {
  if (k.planes.empty()) throw DataError("rss_target: no coils");
  RealImage out(k.height(), k.width());
  for (const ComplexImage& plane : k.planes) {
    ComplexImage img = ifft2c(plane);
    for (size_t i = 0; i < img.size(); ++i) out.data[i] += std::norm(img.data[i]);
  }
  for (double& v : out.data) v = std::sqrt(v);
  return out;
}

double anatomy_statistic(const RealImage& magnitude) {
  if (magnitude.width < 2) return 0.0;
  double acc = 0.0;
  size_t n = 0;
  for (size_t r = 0; r < magnitude.height; ++r)
    for (size_t c = 0; c + 1 < magnitude.width; ++c) {
      acc += std::abs(magnitude.at(r, c + 1) - magnitude.at(r, c));
      ++n;
    }
  return acc / static_cast<double>(n);
}

}  // namespace urec
