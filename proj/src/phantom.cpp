#include "phantom.h"

#include <cmath>

#include "rng.h"

namespace urec {
namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

// Pixel-center coordinates spanning [-1, 1] inclusive along both axes.
double coord(size_t i, size_t n) {
  return n > 1 ? -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1)
               : 0.0;
}

struct Ellipse {
  double cy, cx, ry, rx, ang;

  // Normalized elliptical radius of a point, after rotating by ang.
  double radius(double y, double x) const {
    double ca = std::cos(ang), sa = std::sin(ang);
    double yr = (y - cy) * ca + (x - cx) * sa;
    double xr = -(y - cy) * sa + (x - cx) * ca;
    return std::sqrt((yr / ry) * (yr / ry) + (xr / rx) * (xr / rx));
  }

  // Soft indicator: 1 inside, 0 outside, linear ramp of width `soft` at the rim.
  double soft_at(double y, double x, double soft = 0.08) const {
    double v = (1.0 - radius(y, x)) / soft;
    return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  }

  bool contains(double y, double x) const { return radius(y, x) <= 1.0; }
};

void add_soft(RealImage& img, const Ellipse& e, double amp) {
  for (size_t r = 0; r < img.height; ++r) {
    double y = coord(r, img.height);
    for (size_t c = 0; c < img.width; ++c)
      img.at(r, c) += amp * e.soft_at(y, coord(c, img.width));
  }
}

RealImage family_a(Rng& g, size_t h, size_t w) {
  RealImage img(h, w);
  double ry = 0.82 + 0.06 * g.uniform(-1, 1);
  double rx = 0.66 + 0.06 * g.uniform(-1, 1);
  double ang = 0.15 * g.uniform(-1, 1);
  Ellipse outer{0, 0, ry, rx, ang};
  add_soft(img, outer, 1.0);
  add_soft(img, {0, 0, ry * 0.88, rx * 0.88, ang}, -0.55);
  add_soft(img, {0, 0, ry * 0.80, rx * 0.80, ang}, 0.35);
  for (double sgn : {-1.0, 1.0}) {
    double cy = -0.05 + 0.05 * g.uniform(-1, 1);
    double cx = sgn * (0.16 + 0.04 * g.uniform(-1, 1));
    add_soft(img, {cy, cx, 0.30, 0.10, ang + sgn * 0.3}, -0.25);
  }
  for (int i = 0; i < 4; ++i) {
    double cy = g.uniform(-0.4, 0.4);
    double cx = g.uniform(-0.35, 0.35);
    double sry = g.uniform(0.04, 0.1);
    double srx = g.uniform(0.04, 0.1);
    double sang = g.uniform(0, 3);
    add_soft(img, {cy, cx, sry, srx, sang}, 0.18);
  }
  // Gentle internal texture confined to the inner ellipse.
  double tex_phase = g.uniform(0, 6);
  Ellipse inner{0, 0, ry * 0.8, rx * 0.8, ang};
  for (size_t r = 0; r < h; ++r) {
    double y = coord(r, h);
    for (size_t c = 0; c < w; ++c) {
      double x = coord(c, w);
      if (inner.contains(y, x))
        img.at(r, c) += 0.06 * std::sin(2 * kPi * (1.5 * x + 2.1 * y) + tex_phase);
    }
  }
  return img;
}

RealImage family_b(Rng& g, size_t h, size_t w) {
  RealImage img(h, w);
  double ang = 0.10 * g.uniform(-1, 1);
  Ellipse env{0, 0, 0.95, 0.72 + 0.05 * g.uniform(-1, 1), ang};
  double n_bands = g.uniform(34, 44);  // cycles across the field of view
  double phase = g.uniform(0, 2 * kPi);
  double ridge_x = g.uniform(-0.25, 0.25);
  double ca = std::cos(ang), sa = std::sin(ang);
  for (size_t r = 0; r < h; ++r) {
    double y = coord(r, h);
    for (size_t c = 0; c < w; ++c) {
      double x = coord(c, w);
      double e = env.soft_at(y, x);
      double xr = x * ca - y * sa;
      double bands = 0.5 + 0.5 * std::sin(2 * kPi * (n_bands / 2.0) * xr + phase);
      // The ridge stays small so peak normalization keeps the band contrast.
      double ridge = std::exp(-(xr - ridge_x) * (xr - ridge_x) / (2 * 0.05 * 0.05));
      img.at(r, c) += e * (0.04 + 0.96 * bands) + 0.15 * e * ridge;
    }
  }
  return img;
}

}  // namespace

ComplexImage make_phantom(Anatomy anatomy, uint64_t seed, size_t height, size_t width) {
  if (height < 8 || width < 8) throw DataError("make_phantom: size below 8x8");
  Rng g(derive_seed(seed, anatomy == Anatomy::A ? "phantom-a" : "phantom-b"));
  RealImage mag = anatomy == Anatomy::A ? family_a(g, height, width)
                                        : family_b(g, height, width);
  double peak = 0.0;
  for (double& v : mag.data) {
    if (v < 0.0) v = 0.0;
    peak = std::max(peak, v);
  }
  if (peak > 0.0)
    for (double& v : mag.data) v /= peak;
  double ph_shift = g.uniform(0, 6);
  ComplexImage out(height, width);
  for (size_t r = 0; r < height; ++r) {
    double y = coord(r, height);
    for (size_t c = 0; c < width; ++c) {
      double x = coord(c, width);
      double ph = 0.05 * std::sin(2 * kPi * (0.7 * x + 0.9 * y) + ph_shift);
      out.at(r, c) = std::polar(mag.at(r, c), ph);
    }
  }
  return out;
}

CoilSensitivities make_coil_maps(size_t n_coils, size_t height, size_t width,
                                 uint64_t seed) {
  if (n_coils == 0) throw DataError("make_coil_maps: n_coils must be >= 1");
  Rng g(derive_seed(seed, "coil-maps"));
  CoilSensitivities sens;
  sens.n_coils = n_coils;
  for (size_t c = 0; c < n_coils; ++c) {
    double ang = 2 * kPi * (static_cast<double>(c) + 0.15 * g.uniform(-1, 1)) /
                 static_cast<double>(n_coils);
    double cy = 1.1 * std::sin(ang);
    double cx = 1.1 * std::cos(ang);
    ComplexImage map(height, width);
    for (size_t r = 0; r < height; ++r) {
      double y = coord(r, height);
      for (size_t col = 0; col < width; ++col) {
        double x = coord(col, width);
        double d2 = (y - cy) * (y - cy) + (x - cx) * (x - cx);
        double mag = std::exp(-d2 / (2 * 0.9 * 0.9));
        double ph = 0.3 * (x * std::cos(ang) + y * std::sin(ang));
        map.at(r, col) = std::polar(mag, ph);
      }
    }
    sens.maps.push_back(std::move(map));
  }
  // Pixelwise RSS normalization so Σ_c |S_c|² = 1 everywhere.
  for (size_t r = 0; r < height; ++r) {
    for (size_t col = 0; col < width; ++col) {
      double ss = 0.0;
      for (const auto& m : sens.maps) ss += std::norm(m.at(r, col));
      double rss = std::sqrt(ss);
      if (rss > 0.0)
        for (auto& m : sens.maps) m.at(r, col) /= rss;
    }
  }
  return sens;
}

}  // namespace urec
