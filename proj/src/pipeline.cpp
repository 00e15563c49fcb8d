#include "pipeline.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "checksum.h"
#include "errors.h"
#include "evaluate.h"
#include "manifest.h"
#include "recon.h"
#include "report.h"
#include "rng.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace urec {
namespace {

constexpr const char* kLogHeader = "epoch,split,psnr_mean,psnr_std,ssim_mean,ssim_std,loss";

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string data_rel(Role r) { return std::string("data/") + role_name(r); }
std::string run_rel(const std::string& id) { return "runs/" + id; }

fs::path abs_path(const PipelineOptions& opt, const std::string& rel) {
  return fs::path(opt.workdir) / rel;
}

void write_text_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

ordered_json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    ordered_json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("parse error in " + path.string() + ": " + e.what());
  }
}

Dataset load_split(const PipelineOptions& opt, Role r) {
  fs::path dir = abs_path(opt, data_rel(r));
  if (!fs::exists(dir / "manifest.json"))
    throw DataError("missing dataset " + dir.string() + "; run gen-data first");
  Dataset d = read_dataset(dir.string());
  if (d.role != r) throw DataError("dataset role mismatch in " + dir.string());
  return d;
}

size_t method_index(Method m) {
  const std::vector<Method>& ms = all_methods();
  for (size_t i = 0; i < ms.size(); ++i)
    if (ms[i] == m) return i;
  throw UsageError("unknown method");
}

std::string epoch_ckpt_rel(size_t epoch) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "checkpoints/epoch_%03zu.urck", epoch);
  return buf;
}

// A finished run is marked by its final checkpoint; redoing one is explicit.
void prepare_run_dir(const fs::path& dir, bool force, const std::string& what) {
  if (fs::exists(dir / "model.urck") && !force)
    throw DataError(what + " already exists at " + dir.string() + "; use --force to redo");
  fs::remove_all(dir);
  fs::create_directories(dir / "checkpoints");
}

void append_log_row(std::string& log, size_t epoch, const std::string& split,
                    const MetricsRecord* rec, double loss) {
  log += std::to_string(epoch) + "," + split + ",";
  if (rec)
    log += fmt17(rec->psnr_mean) + "," + fmt17(rec->psnr_std) + "," + fmt17(rec->ssim_mean) + "," +
           fmt17(rec->ssim_std);
  else
    log += ",,,";
  log += "," + fmt17(loss) + "\n";
}

ordered_json timing_json(double wall, size_t epochs) {
  ordered_json t;
  t["schema_version"] = 1;
  t["wall_seconds"] = wall;
  t["epochs"] = epochs;
  return t;
}

// ---- unlearning runs (shared by cmd_unlearn and the ablation grid) ----

struct UnlearnRunSpec {
  std::string run_id;     // path component under runs/
  Method requested = Method::Ft;
  Method effective = Method::Ft;
  double fraction = 0.1;  // effective retain fraction
  double budget_fraction = 0.1;
  uint64_t seed = 0;
  MethodHp hp;
};

UnlearnRunSpec make_run_spec(const Config& cfg, Method requested, double fraction,
                             double budget_fraction, const std::string& run_id) {
  UnlearnRunSpec spec;
  spec.run_id = run_id;
  spec.requested = requested;
  // ft over the full retain split is by definition full_ft; normalizing here
  // keeps the two spellings on one trajectory.
  spec.effective =
      (requested == Method::Ft && fraction >= 1.0) ? Method::FullFt : requested;
  spec.fraction = spec.effective == Method::FullFt ? 1.0 : fraction;
  spec.budget_fraction = budget_fraction;
  spec.hp = cfg.unlearn.hp(spec.effective);
  spec.seed = derive_seed(cfg.master_seed, "unlearn", method_index(spec.effective),
                          static_cast<uint64_t>(std::llround(spec.fraction * 10000.0)));
  return spec;
}

ordered_json run_snapshot(const Config& cfg, const UnlearnRunSpec& spec) {
  ordered_json j = config_to_json(cfg);
  j["run"] = {{"id", spec.run_id},
              {"stage", "unlearn"},
              {"method", method_name(spec.requested)},
              {"effective_method", method_name(spec.effective)},
              {"retain_fraction", spec.fraction},
              {"budget_fraction", spec.budget_fraction},
              {"lr", spec.hp.lr},
              {"batch_size", spec.hp.batch_size},
              {"train_epochs", cfg.train.epochs},
              {"seed", spec.seed}};
  return j;
}

struct SplitSet {
  const Dataset* retain;
  const Dataset* forget;
  const Dataset* retain_test;
  const Dataset* forget_test;
};

struct UnlearnRunOutput {
  size_t epochs = 0;
  double wall = 0.0;
  size_t retain_samples = 0;
  EvalSummary final_eval;
  std::vector<std::string> subset_ids;
  std::string checkpoint_sha256;
  bool skipped = false;
};

UnlearnRunOutput execute_unlearn_run(const Config& cfg, const PipelineOptions& opt,
                                     const UnlearnRunSpec& spec, const ModelParams& parent,
                                     const SplitSet& splits) {
  fs::path dir = abs_path(opt, run_rel(spec.run_id));
  prepare_run_dir(dir, true, "unlearning run");
  write_text_file(dir / "config.json", run_snapshot(cfg, spec).dump(2) + "\n");

  UnlearnConfig ucfg;
  ucfg.method = spec.effective;
  ucfg.gamma = cfg.unlearn.gamma;
  ucfg.lambda = cfg.unlearn.lambda;
  ucfg.retain_fraction = spec.fraction;
  ucfg.budget_fraction = spec.budget_fraction;
  ucfg.train_epochs = cfg.train.epochs;
  ucfg.lr = spec.hp.lr;
  ucfg.batch_size = spec.hp.batch_size;
  ucfg.seed = spec.seed;

  std::string log = std::string(kLogHeader) + "\n";
  UnlearnRunOutput out;
  bool have_eval = false;

  Timer timer;
  EpochHook hook = [&](size_t epoch, const ModelParams& p, double loss) {
    save_checkpoint(p, (dir / epoch_ckpt_rel(epoch)).string());
    out.final_eval = EvalSummary{evaluate_split(p, *splits.retain_test, spec.run_id),
                                 evaluate_split(p, *splits.forget_test, spec.run_id),
                                 evaluate_split(p, *splits.forget, spec.run_id)};
    have_eval = true;
    append_log_row(log, epoch, role_name(Role::RetainTest), &out.final_eval.bta, loss);
    append_log_row(log, epoch, role_name(Role::ForgetTest), &out.final_eval.kta, loss);
    append_log_row(log, epoch, role_name(Role::Forget), &out.final_eval.ua, loss);
  };

  UnlearnResult res = run_unlearn(parent, *splits.retain, *splits.forget, ucfg, hook);
  out.wall = timer.seconds();
  out.epochs = res.epochs;
  out.subset_ids = res.subset_ids;
  out.retain_samples = method_uses_retain(spec.effective) ? res.subset_ids.size() : 0;
  if (!have_eval)
    out.final_eval = EvalSummary{evaluate_split(res.params, *splits.retain_test, spec.run_id),
                                 evaluate_split(res.params, *splits.forget_test, spec.run_id),
                                 evaluate_split(res.params, *splits.forget, spec.run_id)};

  save_checkpoint(res.params, (dir / "model.urck").string());
  out.checkpoint_sha256 = sha256_file((dir / "model.urck").string());
  write_text_file(dir / "log.csv", log);

  ordered_json metrics;
  metrics["schema_version"] = 1;
  metrics["run_id"] = spec.run_id;
  metrics["method"] = method_name(spec.requested);
  metrics["effective_method"] = method_name(spec.effective);
  metrics["retain_fraction"] = spec.fraction;
  metrics["retain_samples"] = out.retain_samples;
  metrics["epochs"] = out.epochs;
  metrics["records"] = {{role_name(Role::RetainTest), metrics_to_json(out.final_eval.bta)},
                        {role_name(Role::ForgetTest), metrics_to_json(out.final_eval.kta)},
                        {role_name(Role::Forget), metrics_to_json(out.final_eval.ua)}};
  write_text_file(dir / "metrics.json", metrics.dump(2) + "\n");
  write_text_file(dir / "timing.json", timing_json(out.wall, out.epochs).dump(2) + "\n");
  return out;
}

// Loads the recorded outputs of a finished grid cell.
UnlearnRunOutput load_unlearn_run(const PipelineOptions& opt, const UnlearnRunSpec& spec) {
  fs::path dir = abs_path(opt, run_rel(spec.run_id));
  ordered_json metrics = read_json_file(dir / "metrics.json");
  ordered_json timing = read_json_file(dir / "timing.json");
  UnlearnRunOutput out;
  out.skipped = true;
  out.epochs = metrics.at("epochs").get<size_t>();
  out.retain_samples = metrics.at("retain_samples").get<size_t>();
  out.wall = timing.at("wall_seconds").get<double>();
  const ordered_json& recs = metrics.at("records");
  out.final_eval.bta = metrics_from_json(spec.run_id, Role::RetainTest,
                                         recs.at(role_name(Role::RetainTest)));
  out.final_eval.kta = metrics_from_json(spec.run_id, Role::ForgetTest,
                                         recs.at(role_name(Role::ForgetTest)));
  out.final_eval.ua =
      metrics_from_json(spec.run_id, Role::Forget, recs.at(role_name(Role::Forget)));
  out.checkpoint_sha256 = sha256_file((dir / "model.urck").string());
  return out;
}

// A grid cell counts as complete when its snapshot matches the requested
// configuration and its artifacts are intact.
bool cell_complete(const PipelineOptions& opt, const Config& cfg, const UnlearnRunSpec& spec) {
  fs::path dir = abs_path(opt, run_rel(spec.run_id));
  if (!fs::exists(dir / "model.urck")) return false;
  if (!fs::exists(dir / "config.json") || !fs::exists(dir / "metrics.json") ||
      !fs::exists(dir / "timing.json"))
    return false;
  if (read_text_file(dir / "config.json") != run_snapshot(cfg, spec).dump(2) + "\n") return false;
  try {
    load_checkpoint((dir / "model.urck").string());
  } catch (const DataError& e) {
    throw DataError("corrupt prior run at " + dir.string() + " (" + e.what() +
                    "); use --force to redo it");
  }
  return true;
}

std::vector<EpochLogRow> parse_log_csv(const fs::path& path, const std::string& model_id) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kLogHeader)
    throw DataError("unexpected log header in " + path.string());
  std::vector<EpochLogRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    size_t start = 0;
    for (size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 7) throw DataError("malformed log row in " + path.string());
    EpochLogRow row;
    row.model_id = model_id;
    row.epoch = std::stoul(fields[0]);
    row.split = fields[1];
    row.has_metrics = !fields[2].empty();
    if (row.has_metrics) {
      row.psnr_mean = std::stod(fields[2]);
      row.psnr_std = std::stod(fields[3]);
      row.ssim_mean = std::stod(fields[4]);
      row.ssim_std = std::stod(fields[5]);
    }
    row.loss = std::stod(fields[6]);
    rows.push_back(row);
  }
  return rows;
}

std::string cell_id_for(Method m, double fraction) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_p%03d", static_cast<int>(std::llround(fraction * 100.0)));
  return method_name(m) + std::string(buf);
}

ModelParams load_parent(const Config& cfg, const PipelineOptions& opt) {
  fs::path ckpt = abs_path(opt, "runs/original/model.urck");
  if (!fs::exists(ckpt))
    throw DataError("missing parent checkpoint " + ckpt.string() +
                    "; run train --role original first");
  ModelParams p = load_checkpoint(ckpt.string());
  if (!(p.arch == cfg.train.arch))
    throw DataError("parent checkpoint architecture does not match the config");
  return p;
}

}  // namespace

ModelParams zero_filled_params(const ArchConfig& arch) {
  ModelParams p;
  p.arch = arch;
  p.values.assign(param_count(arch), 0.0);
  for (size_t t = 0; t < arch.cascades; ++t) p.dc(t) = 1.0;
  return p;
}

void cmd_gen_data(const Config& cfg, const PipelineOptions& opt) {
  if (cfg.data.n_retain != 10 * cfg.data.n_forget)
    throw UsageError("retain-to-forget ratio must be 10:1 (n_retain = 10 × n_forget)");

  const Role roles[] = {Role::Retain, Role::Forget, Role::RetainTest, Role::ForgetTest};
  for (Role r : roles) {
    fs::path dir = abs_path(opt, data_rel(r));
    if (fs::exists(dir) && !opt.force)
      throw DataError("dataset directory " + dir.string() + " exists; use --force to regenerate");
  }
  for (Role r : roles) fs::remove_all(abs_path(opt, data_rel(r)));

  Timer timer;
  Corpus corpus = build_corpus(cfg.data, cfg.master_seed);
  const Dataset* sets[] = {&corpus.retain, &corpus.forget, &corpus.retain_test,
                           &corpus.forget_test};
  ordered_json datasets;
  for (size_t i = 0; i < 4; ++i) {
    std::string rel = data_rel(roles[i]);
    write_dataset(*sets[i], abs_path(opt, rel).string());
    datasets[role_name(roles[i])] = {
        {"dir", rel},
        {"manifest", rel + "/manifest.json"},
        {"manifest_sha256", sha256_file((abs_path(opt, rel) / "manifest.json").string())},
        {"n_samples", sets[i]->samples.size()}};
  }

  ordered_json entry;
  entry["stage"] = "gen-data";
  entry["config_sha256"] = config_sha256(cfg);
  entry["datasets"] = datasets;
  entry["wall_seconds"] = timer.seconds();
  manifest_append(opt.workdir, cfg.master_seed, entry);
}

void cmd_train(const Config& cfg, const PipelineOptions& opt, const std::string& role) {
  if (role != "original" && role != "oracle")
    throw UsageError("train role must be 'original' or 'oracle'");
  if (cfg.train.epochs == 0) throw UsageError("train.epochs must be positive");

  Dataset retain = load_split(opt, Role::Retain);
  Dataset forget;
  std::vector<const Sample*> data = sample_ptrs(retain);
  std::vector<std::string> used = {role_name(Role::Retain)};
  if (role == "original") {
    forget = load_split(opt, Role::Forget);
    for (const Sample* s : sample_ptrs(forget)) data.push_back(s);
    used.push_back(role_name(Role::Forget));
  }

  fs::path dir = abs_path(opt, run_rel(role));
  prepare_run_dir(dir, opt.force, "training run");

  uint64_t seed = derive_seed(cfg.master_seed, "train-" + std::string(role));
  ordered_json snapshot = config_to_json(cfg);
  snapshot["run"] = {{"id", role}, {"stage", "train"}, {"role", role}, {"seed", seed}};
  write_text_file(dir / "config.json", snapshot.dump(2) + "\n");

  TrainConfig tc;
  tc.epochs = cfg.train.epochs;
  tc.lr = cfg.train.lr;
  tc.batch_size = cfg.train.batch_size;
  tc.seed = seed;

  std::string log = std::string(kLogHeader) + "\n";
  Timer timer;
  EpochHook hook = [&](size_t epoch, const ModelParams& p, double loss) {
    save_checkpoint(p, (dir / epoch_ckpt_rel(epoch)).string());
    append_log_row(log, epoch, "train", nullptr, loss);
  };
  ModelParams init = init_params(cfg.train.arch, seed);
  TrainResult res = train_loop(init, data, LossSpec::plain(), tc, hook);
  double wall = timer.seconds();

  save_checkpoint(res.params, (dir / "model.urck").string());
  write_text_file(dir / "log.csv", log);
  write_text_file(dir / "timing.json", timing_json(wall, tc.epochs).dump(2) + "\n");

  ordered_json entry;
  entry["stage"] = "train";
  entry["role"] = role;
  entry["run_id"] = role;
  entry["config_sha256"] = config_sha256(cfg);
  entry["datasets_used"] = used;
  entry["checkpoint"] = run_rel(role) + "/model.urck";
  entry["checkpoint_sha256"] = sha256_file((dir / "model.urck").string());
  entry["epochs"] = tc.epochs;
  entry["wall_seconds"] = wall;
  manifest_append(opt.workdir, cfg.master_seed, entry);
}

void cmd_unlearn(const Config& cfg, const PipelineOptions& opt, Method method,
                 std::optional<double> retain_fraction, std::optional<double> budget_fraction) {
  double fraction = retain_fraction.value_or(cfg.unlearn.retain_fraction);
  double budget = budget_fraction.value_or(cfg.unlearn.budget_fraction);
  if (fraction <= 0.0 || fraction > 1.0) throw UsageError("--retain-fraction must be in (0, 1]");
  if (budget <= 0.0 || budget > 1.0) throw UsageError("--budget must be in (0, 1]");

  ModelParams parent = load_parent(cfg, opt);
  Dataset retain = load_split(opt, Role::Retain);
  Dataset forget = load_split(opt, Role::Forget);
  Dataset retain_test = load_split(opt, Role::RetainTest);
  Dataset forget_test = load_split(opt, Role::ForgetTest);
  SplitSet splits{&retain, &forget, &retain_test, &forget_test};

  UnlearnRunSpec spec = make_run_spec(cfg, method, fraction, budget, "");
  spec.run_id = method_name(spec.effective);

  fs::path dir = abs_path(opt, run_rel(spec.run_id));
  if (fs::exists(dir / "model.urck") && !opt.force)
    throw DataError("unlearning run already exists at " + dir.string() + "; use --force to redo");

  UnlearnRunOutput out = execute_unlearn_run(cfg, opt, spec, parent, splits);

  ordered_json entry;
  entry["stage"] = "unlearn";
  entry["method"] = method_name(spec.effective);
  entry["run_id"] = spec.run_id;
  entry["config_sha256"] = config_sha256(cfg);
  entry["parent_checkpoint_sha256"] = sha256_file(abs_path(opt, "runs/original/model.urck").string());
  entry["retain_fraction"] = spec.fraction;
  entry["budget_fraction"] = spec.budget_fraction;
  entry["epochs"] = out.epochs;
  entry["subset_ids"] = out.subset_ids;
  entry["checkpoint"] = run_rel(spec.run_id) + "/model.urck";
  entry["checkpoint_sha256"] = out.checkpoint_sha256;
  entry["wall_seconds"] = out.wall;
  manifest_append(opt.workdir, cfg.master_seed, entry);
}

void cmd_ablate(const Config& cfg, const PipelineOptions& opt) {
  ModelParams parent = load_parent(cfg, opt);
  Dataset retain = load_split(opt, Role::Retain);
  Dataset forget = load_split(opt, Role::Forget);
  Dataset retain_test = load_split(opt, Role::RetainTest);
  Dataset forget_test = load_split(opt, Role::ForgetTest);
  SplitSet splits{&retain, &forget, &retain_test, &forget_test};

  struct Cell {
    UnlearnRunSpec spec;
    Method requested;
    double fraction;
    std::string cell_id;
    UnlearnRunOutput out;
  };
  std::vector<Cell> cells;
  for (Method m : cfg.ablate.methods) {
    for (double f : cfg.ablate.fractions) {
      Cell cell;
      cell.requested = m;
      cell.fraction = f;
      cell.cell_id = cell_id_for(m, f);
      cell.spec = make_run_spec(cfg, m, f, cfg.unlearn.budget_fraction,
                                "ablate/" + cell.cell_id);
      cells.push_back(std::move(cell));
    }
  }

  Timer timer;
  std::atomic<size_t> next{0};
  std::mutex io_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      Cell& cell = cells[i];
      try {
        if (!opt.force && cell_complete(opt, cfg, cell.spec)) {
          cell.out = load_unlearn_run(opt, cell.spec);
        } else {
          cell.out = execute_unlearn_run(cfg, opt, cell.spec, parent, splits);
        }
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << "ablate: " << cell.cell_id << (cell.out.skipped ? " (cached)" : " done")
                  << "\n";
      } catch (...) {
        std::lock_guard<std::mutex> lock(io_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  size_t n_threads = std::max<size_t>(1, std::min(opt.jobs, cells.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Grid summary: deterministic cell records plus both Pareto variants.
  ordered_json summary;
  summary["schema_version"] = 1;
  summary["cells"] = ordered_json::array();
  for (const Cell& cell : cells) {
    ordered_json cj;
    cj["cell"] = cell.cell_id;
    cj["method"] = method_name(cell.requested);
    cj["fraction"] = cell.fraction;
    cj["retain_samples"] = cell.out.retain_samples;
    cj["epochs"] = cell.out.epochs;
    cj["wall_seconds"] = cell.out.wall;
    cj["checkpoint"] = run_rel(cell.spec.run_id) + "/model.urck";
    cj["checkpoint_sha256"] = cell.out.checkpoint_sha256;
    cj["records"] = {{role_name(Role::RetainTest), metrics_to_json(cell.out.final_eval.bta)},
                     {role_name(Role::ForgetTest), metrics_to_json(cell.out.final_eval.kta)},
                     {role_name(Role::Forget), metrics_to_json(cell.out.final_eval.ua)}};
    summary["cells"].push_back(cj);
  }
  for (const char* axis : {"samples", "wall"}) {
    ordered_json fits;
    for (Method m : cfg.ablate.methods) {
      std::vector<std::pair<double, double>> pts;
      ordered_json points = ordered_json::array();
      for (const Cell& cell : cells) {
        if (cell.requested != m) continue;
        double x = axis == std::string("samples") ? static_cast<double>(cell.out.retain_samples)
                                                  : cell.out.wall;
        pts.push_back({x, cell.out.final_eval.bta.psnr_mean});
        points.push_back({{"x", x}, {"y", json_num(cell.out.final_eval.bta.psnr_mean)}});
      }
      ordered_json fj;
      fj["points"] = points;
      try {
        ParetoFit fit = pareto_fit(pts);
        fj["fit"] = {{"a", fit.a}, {"b", fit.b}, {"c", fit.c}, {"rss", fit.rss}};
        if (fit.has_argmax) fj["fit"]["argmax_x"] = fit.argmax_x;
      } catch (const UsageError&) {
        // Not enough distinct x values; points stand alone.
      }
      fits[method_name(m)] = fj;
    }
    summary[axis == std::string("samples") ? "pareto_samples" : "pareto_wall"] = fits;
  }
  write_text_file(abs_path(opt, "runs/ablate/summary.json"), summary.dump(2) + "\n");

  ordered_json entry;
  entry["stage"] = "ablate";
  entry["config_sha256"] = config_sha256(cfg);
  entry["cells"] = ordered_json::array();
  for (const Cell& cell : cells) {
    entry["cells"].push_back({{"cell", cell.cell_id},
                              {"checkpoint", run_rel(cell.spec.run_id) + "/model.urck"},
                              {"checkpoint_sha256", cell.out.checkpoint_sha256},
                              {"skipped", cell.out.skipped},
                              {"wall_seconds", cell.out.wall}});
  }
  entry["wall_seconds"] = timer.seconds();
  manifest_append(opt.workdir, cfg.master_seed, entry);
}

void cmd_eval(const Config& cfg, const PipelineOptions& opt) {
  Dataset retain_test = load_split(opt, Role::RetainTest);
  Dataset forget_test = load_split(opt, Role::ForgetTest);
  Dataset forget;
  bool have_forget = fs::exists(abs_path(opt, data_rel(Role::Forget)) / "manifest.json");
  if (have_forget) forget = load_split(opt, Role::Forget);

  struct Target {
    std::string id;
    std::string checkpoint_rel; // empty for the synthetic zero-filled baseline
  };
  std::vector<Target> targets = {{"zero_filled", ""}};
  for (const char* id : {"original", "oracle"}) {
    if (fs::exists(abs_path(opt, run_rel(id)) / "model.urck"))
      targets.push_back({id, run_rel(id) + "/model.urck"});
  }
  for (Method m : all_methods()) {
    std::string id = method_name(m);
    if (fs::exists(abs_path(opt, run_rel(id)) / "model.urck"))
      targets.push_back({id, run_rel(id) + "/model.urck"});
  }

  ordered_json models = ordered_json::array();
  for (const Target& t : targets) {
    ModelParams p;
    std::string sha;
    if (t.checkpoint_rel.empty()) {
      p = zero_filled_params(cfg.train.arch);
    } else {
      p = load_checkpoint(abs_path(opt, t.checkpoint_rel).string());
      if (!(p.arch == cfg.train.arch))
        throw DataError("checkpoint architecture mismatch for " + t.id);
      sha = sha256_file(abs_path(opt, t.checkpoint_rel).string());
    }

    ordered_json ej;
    ej["schema_version"] = 1;
    ej["model_id"] = t.id;
    ej["checkpoint"] = t.checkpoint_rel;
    ej["checkpoint_sha256"] = sha;
    ordered_json records;
    records[role_name(Role::RetainTest)] =
        metrics_to_json(evaluate_split(p, retain_test, t.id));
    records[role_name(Role::ForgetTest)] =
        metrics_to_json(evaluate_split(p, forget_test, t.id));
    ordered_json warnings = ordered_json::array();
    if (have_forget)
      records[role_name(Role::Forget)] = metrics_to_json(evaluate_split(p, forget, t.id));
    else
      warnings.push_back("forget split missing; forget-train metrics omitted");
    ej["records"] = records;
    ej["warnings"] = warnings;
    write_text_file(abs_path(opt, "eval/" + t.id + ".json"), ej.dump(2) + "\n");
    models.push_back({{"id", t.id},
                      {"checkpoint_sha256", sha},
                      {"records", "eval/" + t.id + ".json"}});
  }

  ordered_json entry;
  entry["stage"] = "eval";
  entry["config_sha256"] = config_sha256(cfg);
  entry["models"] = models;
  manifest_append(opt.workdir, cfg.master_seed, entry);
}

void cmd_report(const Config& cfg, const PipelineOptions& opt) {
  ReportInputs inputs;

  std::vector<std::string> ids = {"zero_filled", "original", "oracle"};
  for (Method m : all_methods()) ids.push_back(method_name(m));
  for (const std::string& id : ids) {
    fs::path ej = abs_path(opt, "eval/" + id + ".json");
    if (!fs::exists(ej)) continue;
    ordered_json j = read_json_file(ej);
    ModelEval me;
    me.model_id = j.at("model_id").get<std::string>();
    me.checkpoint_sha256 = j.at("checkpoint_sha256").get<std::string>();
    const ordered_json& records = j.at("records");
    for (Role r : {Role::RetainTest, Role::ForgetTest, Role::Forget}) {
      if (records.contains(role_name(r)))
        me.records.push_back(metrics_from_json(me.model_id, r, records.at(role_name(r))));
    }
    inputs.models.push_back(std::move(me));
  }

  for (Method m : all_methods()) {
    std::string id = method_name(m);
    fs::path log = abs_path(opt, run_rel(id)) / "log.csv";
    if (!fs::exists(log)) continue;
    for (EpochLogRow& row : parse_log_csv(log, id)) inputs.epoch_rows.push_back(std::move(row));
    fs::path timing = abs_path(opt, run_rel(id)) / "timing.json";
    if (fs::exists(timing)) {
      ordered_json t = read_json_file(timing);
      inputs.rte_group.push_back(measure_rte(id, t.at("wall_seconds").get<double>(),
                                             t.at("epochs").get<size_t>()));
      inputs.stage_walls["unlearn_" + id] = t.at("wall_seconds").get<double>();
    }
  }

  for (const char* id : {"original", "oracle"}) {
    fs::path timing = abs_path(opt, run_rel(id)) / "timing.json";
    if (fs::exists(timing))
      inputs.stage_walls["train_" + std::string(id)] =
          read_json_file(timing).at("wall_seconds").get<double>();
  }

  fs::path summary_path = abs_path(opt, "runs/ablate/summary.json");
  if (fs::exists(summary_path)) {
    ordered_json summary = read_json_file(summary_path);
    for (const ordered_json& cj : summary.at("cells")) {
      AblationCell cell;
      cell.cell_id = cj.at("cell").get<std::string>();
      cell.method = cj.at("method").get<std::string>();
      cell.fraction = cj.at("fraction").get<double>();
      cell.retain_samples = cj.at("retain_samples").get<size_t>();
      cell.epochs = cj.at("epochs").get<size_t>();
      cell.wall_seconds = cj.at("wall_seconds").get<double>();
      const ordered_json& recs = cj.at("records");
      cell.bta = metrics_from_json(cell.cell_id, Role::RetainTest,
                                   recs.at(role_name(Role::RetainTest)));
      cell.kta = metrics_from_json(cell.cell_id, Role::ForgetTest,
                                   recs.at(role_name(Role::ForgetTest)));
      if (recs.contains(role_name(Role::Forget)))
        cell.ua = metrics_from_json(cell.cell_id, Role::Forget, recs.at(role_name(Role::Forget)));
      inputs.ablation.push_back(std::move(cell));
    }
  }

  write_report_files((fs::path(opt.workdir) / "report").string(), inputs);

  ordered_json entry;
  entry["stage"] = "report";
  entry["config_sha256"] = config_sha256(cfg);
  ordered_json files = ordered_json::array();
  files.push_back("report/report.csv");
  files.push_back("report/report.json");
  files.push_back("report/timing.json");
  entry["files"] = files;
  manifest_append(opt.workdir, cfg.master_seed, entry);
}

}  // namespace urec
