#include "metrics.h"

#include <algorithm>
#include <cmath>

#include "errors.h"

namespace urec {
namespace {

double resolve_range(const RealImage& target, double data_range, const char* op) {
  if (data_range > 0.0) return data_range;
  if (data_range < 0.0) throw UsageError(std::string(op) + ": data_range must be positive");
  double mx = 0.0;
  for (double v : target.data) mx = std::max(mx, v);
  if (mx <= 0.0) throw UsageError(std::string(op) + ": target has no positive range");
  return mx;
}

}  // namespace

double psnr(const RealImage& pred, const RealImage& target, double data_range) {
  require_same_shape(pred, target, "psnr");
  double range = resolve_range(target, data_range, "psnr");
  double mse = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    double d = pred.data[i] - target.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(pred.size());
  if (mse == 0.0) return kPsnrSentinel;
  return 10.0 * std::log10(range * range / mse);
}

double ssim(const RealImage& pred, const RealImage& target, int window, double k1, double k2,
            double data_range) {
  require_same_shape(pred, target, "ssim");
  if (window <= 0) throw UsageError("ssim: window must be positive");
  if (pred.height < static_cast<size_t>(window) || pred.width < static_cast<size_t>(window))
    throw UsageError("ssim: image smaller than window");
  double range = resolve_range(target, data_range, "ssim");
  const double c1 = (k1 * range) * (k1 * range);
  const double c2 = (k2 * range) * (k2 * range);
  const size_t w = static_cast<size_t>(window);
  const double inv_n = 1.0 / static_cast<double>(w * w);

  double acc = 0.0;
  size_t count = 0;
  for (size_t r0 = 0; r0 + w <= pred.height; ++r0) {
    for (size_t c0 = 0; c0 + w <= pred.width; ++c0) {
      double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
      for (size_t r = r0; r < r0 + w; ++r) {
        for (size_t c = c0; c < c0 + w; ++c) {
          double x = pred.at(r, c), y = target.at(r, c);
          sx += x;
          sy += y;
          sxx += x * x;
          syy += y * y;
          sxy += x * y;
        }
      }
      double mx = sx * inv_n, my = sy * inv_n;
      double vx = sxx * inv_n - mx * mx;
      double vy = syy * inv_n - my * my;
      double cov = sxy * inv_n - mx * my;
      double num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
      double den = (mx * mx + my * my + c1) * (vx + vy + c2);
      acc += num / den;
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

}  // namespace urec
