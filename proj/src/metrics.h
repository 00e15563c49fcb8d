#pragma once

#include <limits>

#include "image.h"

namespace urec {

// Returned by psnr when MSE is exactly zero; callers exclude it from means.
constexpr double kPsnrSentinel = std::numeric_limits<double>::infinity();

// 10*log10(data_range^2 / MSE). data_range <= 0 means "use max of target".
double psnr(const RealImage& pred, const RealImage& target, double data_range = 0.0);

// Mean local SSIM over all valid windows, uniform weights, population
// moments. data_range <= 0 means "use max of target".
double ssim(const RealImage& pred, const RealImage& target, int window = 7, double k1 = 0.01,
            double k2 = 0.03, double data_range = 0.0);

}  // namespace urec
