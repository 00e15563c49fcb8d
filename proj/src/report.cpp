#include "report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include "errors.h"
#include "json.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace urec {
namespace {

const MetricsRecord* find_record(const ModelEval& m, Role split) {
  for (const MetricsRecord& r : m.records)
    if (r.split == split) return &r;
  return nullptr;
}

const ModelEval* find_model(const std::vector<ModelEval>& models, const std::string& id) {
  for (const ModelEval& m : models)
    if (m.model_id == id) return &m;
  return nullptr;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

void append_metric_rows(std::string& csv, const std::string& method, const MetricsRecord& r) {
  csv += method + "," + role_name(r.split) + ",psnr," + fmt17(r.psnr_mean) + "," +
         fmt17(r.psnr_std) + "," + std::to_string(r.n_psnr) + "\n";
  csv += method + "," + role_name(r.split) + ",ssim," + fmt17(r.ssim_mean) + "," +
         fmt17(r.ssim_std) + "," + std::to_string(r.n_ssim) + "\n";
}

ordered_json fit_json(const ParetoFit& fit) {
  ordered_json j;
  j["a"] = json_num(fit.a);
  j["b"] = json_num(fit.b);
  j["c"] = json_num(fit.c);
  j["rss"] = json_num(fit.rss);
  if (fit.has_argmax) j["argmax_x"] = json_num(fit.argmax_x);
  return j;
}

// Grid cells grouped per method, preserving first-seen method order.
std::vector<std::pair<std::string, std::vector<const AblationCell*>>> group_cells(
    const std::vector<AblationCell>& cells) {
  std::vector<std::pair<std::string, std::vector<const AblationCell*>>> groups;
  for (const AblationCell& c : cells) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == c.method; });
    if (it == groups.end()) {
      groups.push_back({c.method, {&c}});
    } else {
      it->second.push_back(&c);
    }
  }
  return groups;
}

}  // namespace

ordered_json json_num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return "nan";
}

double num_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw DataError("expected a numeric JSON value");
}

ordered_json metrics_to_json(const MetricsRecord& r) {
  ordered_json j;
  j["psnr_mean"] = json_num(r.psnr_mean);
  j["psnr_std"] = json_num(r.psnr_std);
  j["ssim_mean"] = json_num(r.ssim_mean);
  j["ssim_std"] = json_num(r.ssim_std);
  j["n_psnr"] = r.n_psnr;
  j["n_ssim"] = r.n_ssim;
  j["n_sentinel"] = r.n_sentinel;
  return j;
}

MetricsRecord metrics_from_json(const std::string& model_id, Role split,
                                const nlohmann::json& j) {
  MetricsRecord r;
  r.model_id = model_id;
  r.split = split;
  r.psnr_mean = num_from_json(j.at("psnr_mean"));
  r.psnr_std = num_from_json(j.at("psnr_std"));
  r.ssim_mean = num_from_json(j.at("ssim_mean"));
  r.ssim_std = num_from_json(j.at("ssim_std"));
  r.n_psnr = j.at("n_psnr").get<size_t>();
  r.n_ssim = j.at("n_ssim").get<size_t>();
  r.n_sentinel = j.at("n_sentinel").get<size_t>();
  return r;
}

std::string fmt17(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_report_files(const std::string& dir, const ReportInputs& inputs) {
  std::vector<std::string> missing;
  const ModelEval* original = find_model(inputs.models, "original");
  const ModelEval* oracle = find_model(inputs.models, "oracle");
  if (!original) missing.push_back("original");
  if (!oracle) missing.push_back("oracle");
  if (!missing.empty()) {
    std::string names;
    for (const std::string& n : missing) names += (names.empty() ? "" : ", ") + n;
    throw DataError("report: missing required records: " + names);
  }

  fs::create_directories(dir);
  std::vector<std::string> warnings;

  // report.csv: aggregate rows, then gap rows, then grid rows.
  std::string csv = "method,split,metric,mean,std,n\n";
  for (const ModelEval& m : inputs.models)
    for (const MetricsRecord& r : m.records) append_metric_rows(csv, m.model_id, r);
  for (Role split : {Role::RetainTest, Role::ForgetTest}) {
    const MetricsRecord* a = find_record(*original, split);
    const MetricsRecord* b = find_record(*oracle, split);
    if (a && b)
      csv += std::string("gap,") + role_name(split) + ",psnr," + fmt17(gap(*a, *b)) + ",0,0\n";
  }
  for (const AblationCell& c : inputs.ablation) {
    append_metric_rows(csv, c.cell_id, c.bta);
    append_metric_rows(csv, c.cell_id, c.kta);
    if (c.ua.n_ssim > 0) append_metric_rows(csv, c.cell_id, c.ua);
  }
  write_text(fs::path(dir) / "report.csv", csv);

  // Per-model epoch CSVs mirror the run-log schema.
  std::vector<std::string> epoch_models;
  for (const EpochLogRow& row : inputs.epoch_rows)
    if (std::find(epoch_models.begin(), epoch_models.end(), row.model_id) == epoch_models.end())
      epoch_models.push_back(row.model_id);
  for (const std::string& id : epoch_models) {
    std::string ecsv = "epoch,split,psnr_mean,psnr_std,ssim_mean,ssim_std,loss\n";
    for (const EpochLogRow& row : inputs.epoch_rows) {
      if (row.model_id != id) continue;
      ecsv += std::to_string(row.epoch) + "," + row.split + ",";
      if (row.has_metrics)
        ecsv += fmt17(row.psnr_mean) + "," + fmt17(row.psnr_std) + "," + fmt17(row.ssim_mean) +
                "," + fmt17(row.ssim_std);
      else
        ecsv += ",,,";
      ecsv += "," + fmt17(row.loss) + "\n";
    }
    write_text(fs::path(dir) / ("epochs_" + id + ".csv"), ecsv);
  }

  // report.json: everything deterministic.
  ordered_json j;
  j["schema_version"] = 1;
  j["models"] = ordered_json::array();
  for (const ModelEval& m : inputs.models) {
    ordered_json mj;
    mj["id"] = m.model_id;
    mj["checkpoint_sha256"] = m.checkpoint_sha256;
    mj["splits"] = ordered_json::object();
    for (const MetricsRecord& r : m.records) mj["splits"][role_name(r.split)] = metrics_to_json(r);
    if (!find_record(m, Role::Forget))
      warnings.push_back(m.model_id + ": forget split missing, no forget-train row");
    j["models"].push_back(mj);
  }

  j["gaps"] = ordered_json::object();
  for (Role split : {Role::RetainTest, Role::ForgetTest}) {
    const MetricsRecord* a = find_record(*original, split);
    const MetricsRecord* b = find_record(*oracle, split);
    if (a && b) j["gaps"][role_name(split)] = json_num(gap(*a, *b));
  }

  if (inputs.epoch_rows.empty()) {
    warnings.push_back("per-epoch logs empty; unlearning-dynamics table omitted");
  } else {
    j["per_epoch"] = ordered_json::array();
    for (const EpochLogRow& row : inputs.epoch_rows) {
      ordered_json rj;
      rj["model"] = row.model_id;
      rj["epoch"] = row.epoch;
      rj["split"] = row.split;
      if (row.has_metrics) {
        rj["psnr_mean"] = json_num(row.psnr_mean);
        rj["psnr_std"] = json_num(row.psnr_std);
        rj["ssim_mean"] = json_num(row.ssim_mean);
        rj["ssim_std"] = json_num(row.ssim_std);
      }
      rj["loss"] = json_num(row.loss);
      j["per_epoch"].push_back(rj);
    }
  }

  if (!inputs.ablation.empty()) {
    j["retain_fraction_grid"] = ordered_json::array();
    for (const AblationCell& c : inputs.ablation) {
      ordered_json cj;
      cj["cell"] = c.cell_id;
      cj["method"] = c.method;
      cj["fraction"] = json_num(c.fraction);
      cj["retain_samples"] = c.retain_samples;
      cj["epochs"] = c.epochs;
      cj["bta_psnr"] = json_num(c.bta.psnr_mean);
      cj["kta_psnr"] = json_num(c.kta.psnr_mean);
      if (c.ua.n_ssim > 0) cj["ua_psnr"] = json_num(c.ua.psnr_mean);
      cj["bta_ssim"] = json_num(c.bta.ssim_mean);
      cj["kta_ssim"] = json_num(c.kta.ssim_mean);
      j["retain_fraction_grid"].push_back(cj);
    }

    // Pareto data keyed on retain-sample usage, the deterministic stand-in
    // for unlearning time.
    j["pareto"] = ordered_json::object();
    for (const auto& [method, cells] : group_cells(inputs.ablation)) {
      ordered_json pj;
      pj["points"] = ordered_json::array();
      std::vector<std::pair<double, double>> pts;
      for (const AblationCell* c : cells) {
        pts.push_back({static_cast<double>(c->retain_samples), c->bta.psnr_mean});
        pj["points"].push_back(
            {{"x", static_cast<double>(c->retain_samples)}, {"y", json_num(c->bta.psnr_mean)}});
      }
      try {
        pj["fit"] = fit_json(pareto_fit(pts));
      } catch (const UsageError& e) {
        warnings.push_back("pareto fit skipped for " + method + ": " + e.what());
      }
      j["pareto"][method] = pj;
    }
  } else {
    warnings.push_back("no retain-fraction grid data; grid table and pareto fit omitted");
  }

  j["radar_psnr"] = ordered_json::object();
  for (const ModelEval& m : inputs.models) {
    const MetricsRecord* bta = find_record(m, Role::RetainTest);
    const MetricsRecord* kta = find_record(m, Role::ForgetTest);
    const MetricsRecord* ua = find_record(m, Role::Forget);
    if (!bta || !kta || !ua) continue;
    j["radar_psnr"][m.model_id] = {{"ua_psnr", json_num(ua->psnr_mean)},
                                   {"bta_psnr", json_num(bta->psnr_mean)},
                                   {"kta_psnr", json_num(kta->psnr_mean)}};
  }

  j["warnings"] = warnings;
  write_text(fs::path(dir) / "report.json", j.dump(2) + "\n");

  // timing.json: everything wall-clock dependent lives here, away from the
  // byte-compared artifacts.
  ordered_json t;
  t["schema_version"] = 1;
  t["stage_walls"] = ordered_json::object();
  for (const auto& [name, wall] : inputs.stage_walls) t["stage_walls"][name] = json_num(wall);
  if (!inputs.rte_group.empty()) {
    t["rte"] = ordered_json::array();
    for (const RteRecord& r : normalize_rte(inputs.rte_group)) {
      t["rte"].push_back({{"model", r.model_id},
                          {"wall_seconds", json_num(r.wall_seconds)},
                          {"epochs_run", r.epochs_run},
                          {"normalized_inverse_rte", json_num(r.normalized_inverse_rte)}});
    }
  }
  if (!inputs.ablation.empty()) {
    t["pareto_wall"] = ordered_json::object();
    for (const auto& [method, cells] : group_cells(inputs.ablation)) {
      ordered_json pj;
      pj["points"] = ordered_json::array();
      std::vector<std::pair<double, double>> pts;
      for (const AblationCell* c : cells) {
        pts.push_back({c->wall_seconds, c->bta.psnr_mean});
        pj["points"].push_back({{"x", json_num(c->wall_seconds)}, {"y", json_num(c->bta.psnr_mean)}});
      }
      try {
        pj["fit"] = fit_json(pareto_fit(pts));
      } catch (const UsageError&) {
        // Coincident wall times; points stand alone.
      }
      t["pareto_wall"][method] = pj;
    }
  }
  write_text(fs::path(dir) / "timing.json", t.dump(2) + "\n");
}

}  // namespace urec
