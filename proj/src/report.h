#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evaluate.h"
#include "json.hpp"
#include "methods.h"

namespace urec {

// JSON-safe numeric encoding: finite doubles stay numbers, infinities become
// the strings "inf"/"-inf" (JSON has no inf literal).
nlohmann::ordered_json json_num(double v);
double num_from_json(const nlohmann::json& j);

nlohmann::ordered_json metrics_to_json(const MetricsRecord& r);
MetricsRecord metrics_from_json(const std::string& model_id, Role split,
                                const nlohmann::json& j);

struct EpochLogRow {
  std::string model_id;
  size_t epoch = 0;
  std::string split;
  bool has_metrics = false;
  double psnr_mean = 0.0, psnr_std = 0.0, ssim_mean = 0.0, ssim_std = 0.0;
  double loss = 0.0;
};

struct ModelEval {
  std::string model_id;
  std::string checkpoint_sha256;
  std::vector<MetricsRecord> records; // retain_test / forget_test / optionally forget
};

struct AblationCell {
  std::string cell_id;
  std::string method;
  double fraction = 0.0;
  size_t retain_samples = 0;
  size_t epochs = 0;
  double wall_seconds = 0.0;
  MetricsRecord bta, kta, ua;
};

struct ReportInputs {
  std::vector<ModelEval> models;       // canonical order; must contain original and oracle
  std::vector<EpochLogRow> epoch_rows; // per-epoch unlearning dynamics
  std::vector<AblationCell> ablation;  // retain-fraction grid, may be empty
  std::vector<RteRecord> rte_group;    // unlearning wall times, timing file only
  std::map<std::string, double> stage_walls; // named stage durations, timing file only
};

// Lossless float64 text form: finite values via %.17g, infinities as "inf".
std::string fmt17(double v);

// Writes report.csv, report.json, per-model epoch CSVs, and timing.json under
// `dir`. Everything except timing.json is a pure function of the inputs'
// deterministic fields.
void write_report_files(const std::string& dir, const ReportInputs& inputs);

}  // namespace urec
