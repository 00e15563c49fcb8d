#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dataset.h"
#include "model.h"

namespace urec {

struct MetricsRecord {
  std::string model_id;
  Role split = Role::RetainTest;
  double psnr_mean = 0.0;
  double psnr_std = 0.0;
  double ssim_mean = 0.0;
  double ssim_std = 0.0;
  size_t n_psnr = 0;     // samples contributing to the PSNR aggregate
  size_t n_ssim = 0;     // samples contributing to the SSIM aggregate
  size_t n_sentinel = 0; // perfect reconstructions excluded from PSNR
};

// Reconstructs every sample and aggregates per-sample PSNR/SSIM as
// mean +- population std. Infinite PSNR values are counted separately and
// excluded from the aggregate; if every sample is perfect the mean itself is
// the sentinel.
MetricsRecord evaluate_split(const ModelParams& p, const Dataset& data,
                             const std::string& model_id);

struct EvalSummary {
  MetricsRecord bta; // retain_test
  MetricsRecord kta; // forget_test
  MetricsRecord ua;  // forget (training split)
};

EvalSummary evaluate_model(const ModelParams& p, const Dataset& retain_test,
                           const Dataset& forget_test, const Dataset& forget,
                           const std::string& model_id);

// a.psnr_mean - b.psnr_mean; both records must describe the same split.
double gap(const MetricsRecord& a, const MetricsRecord& b);

struct RteRecord {
  std::string model_id;
  double wall_seconds = 0.0;
  size_t epochs_run = 0;
  double normalized_inverse_rte = 0.0;
};

RteRecord measure_rte(const std::string& model_id, double wall_seconds, size_t epochs_run);

// Min-max rescaling of 1/wall_seconds to [0,1] over the group; a degenerate
// group (single element or equal durations) maps everything to 1.0.
std::vector<RteRecord> normalize_rte(std::vector<RteRecord> group);

struct ParetoFit {
  double a = 0.0, b = 0.0, c = 0.0;
  double rss = 0.0;
  bool has_argmax = false;
  double argmax_x = 0.0; // stationary point, reported when the parabola opens down
};

// Least-squares quadratic through (x, y) points via normal equations.
ParetoFit pareto_fit(const std::vector<std::pair<double, double>>& points);

}  // namespace urec
