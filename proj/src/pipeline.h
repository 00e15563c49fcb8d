#pragma once

#include <optional>
#include <string>

#include "config.h"
#include "methods.h"
#include "model.h"

namespace urec {

struct PipelineOptions {
  std::string workdir;
  bool force = false;
  size_t jobs = 1;
};

// Reconstruction with no learned refinement: dc_weight 1 and zero conv
// weights reduces every cascade to the identity on acquired k-space, so the
// output is the zero-filled baseline.
ModelParams zero_filled_params(const ArchConfig& arch);

// Stage entry points shared by the CLI and the acceptance harness. Each one
// validates inputs, runs the stage, writes its run directory, and appends a
// manifest entry.
void cmd_gen_data(const Config& cfg, const PipelineOptions& opt);
void cmd_train(const Config& cfg, const PipelineOptions& opt, const std::string& role);
void cmd_unlearn(const Config& cfg, const PipelineOptions& opt, Method method,
                 std::optional<double> retain_fraction = std::nullopt,
                 std::optional<double> budget_fraction = std::nullopt);
void cmd_ablate(const Config& cfg, const PipelineOptions& opt);
void cmd_eval(const Config& cfg, const PipelineOptions& opt);
void cmd_report(const Config& cfg, const PipelineOptions& opt);

}  // namespace urec
