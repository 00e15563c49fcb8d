#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "dataset.h"
#include "doctest.h"
#include "errors.h"
#include "evaluate.h"
#include "metrics.h"
#include "model.h"
#include "mri.h"
#include "phantom.h"
#include "recon.h"
#include "rng.h"

using namespace urec;

namespace {

// A sample whose k-space is fully sampled and whose target is the exact
// root-sum-of-squares of that same k-space, with no quantization in between.
Sample perfect_sample(uint64_t seed, const std::string& id) {
  const size_t h = 16, w = 16;
  Sample s;
  s.id = id;
  s.anatomy = Anatomy::A;
  ComplexImage img = make_phantom(Anatomy::A, seed, h, w);
  CoilSensitivities maps = make_coil_maps(2, h, w, seed);
  MultiCoilKSpace full = forward_model(img, maps);
  s.mask = make_mask(w, 1, 0.25, seed);  // unit acceleration keeps everything
  s.masked_kspace = undersample(full, s.mask);
  s.target = rss_target(s.masked_kspace);
  return s;
}

ModelParams zero_params(const ArchConfig& arch) {
  return unflatten(arch, std::vector<double>(param_count(arch), 0.0));
}

Dataset small_eval_split(Role role, size_t n, uint64_t seed) {
  CorpusConfig cfg;
  cfg.height = 16;
  cfg.width = 16;
  cfg.n_coils = 2;
  cfg.accel = 4;
  cfg.center_fraction = 0.125;
  Dataset d;
  d.role = role;
  d.seed = seed;
  for (size_t i = 0; i < n; ++i)
    d.samples.push_back(make_sample(role_anatomy(role), derive_seed(seed, "s", i),
                                    std::string(role_name(role)) + std::to_string(i), cfg));
  return d;
}

MetricsRecord hand_record(const std::string& id, Role split, double psnr_mean) {
  MetricsRecord r;
  r.model_id = id;
  r.split = split;
  r.psnr_mean = psnr_mean;
  return r;
}

}  // namespace

TEST_CASE("an identity-acting model on fully sampled data hits the sentinel") {
  Dataset d;
  d.role = Role::RetainTest;
  d.samples.push_back(perfect_sample(31, "perfect-0"));
  d.samples.push_back(perfect_sample(32, "perfect-1"));
  // With every parameter zero, data consistency and the refiner are inert, so
  // the output is exactly the root-sum-of-squares of the input k-space.
  MetricsRecord rec = evaluate_split(zero_params({2, 2}), d, "identity");
  CHECK(std::isinf(rec.psnr_mean));
  CHECK(rec.psnr_mean == kPsnrSentinel);
  CHECK(rec.psnr_std == 0.0);
  CHECK(rec.n_psnr == 0);
  CHECK(rec.n_sentinel == 2);
  CHECK(rec.n_ssim == 2);
  CHECK(rec.ssim_mean == 1.0);
  CHECK(rec.ssim_std == 0.0);
}

TEST_CASE("a mixed split excludes sentinels from the psnr aggregate only") {
  Dataset d;
  d.role = Role::RetainTest;
  d.samples.push_back(perfect_sample(33, "perfect"));
  Sample imperfect = perfect_sample(34, "imperfect");
  imperfect.target.data[5] += 0.25;  // breaks the exact match
  d.samples.push_back(imperfect);
  MetricsRecord rec = evaluate_split(zero_params({2, 2}), d, "mixed");
  CHECK(rec.n_sentinel == 1);
  CHECK(rec.n_psnr == 1);
  CHECK(rec.n_ssim == 2);
  CHECK(std::isfinite(rec.psnr_mean));
  CHECK(rec.psnr_std == 0.0);  // single finite contribution
}

TEST_CASE("evaluation is deterministic") {
  Dataset d = small_eval_split(Role::RetainTest, 3, 40);
  ModelParams p = init_params({2, 2}, 41);
  MetricsRecord a = evaluate_split(p, d, "m");
  MetricsRecord b = evaluate_split(p, d, "m");
  CHECK(a.psnr_mean == b.psnr_mean);
  CHECK(a.psnr_std == b.psnr_std);
  CHECK(a.ssim_mean == b.ssim_mean);
  CHECK(a.ssim_std == b.ssim_std);
}

TEST_CASE("aggregates match per-sample metrics computed by hand") {
  Dataset d = small_eval_split(Role::ForgetTest, 4, 42);
  ModelParams p = init_params({2, 2}, 43);
  MetricsRecord rec = evaluate_split(p, d, "agg");

  std::vector<double> psnrs, ssims;
  for (const Sample& s : d.samples) {
    RealImage out = reconstruct(p, s.masked_kspace, s.mask);
    psnrs.push_back(psnr(out, s.target));
    ssims.push_back(ssim(out, s.target));
  }
  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto pop_std = [&](const std::vector<double>& v) {
    double m = mean_of(v), q = 0.0;
    for (double x : v) q += (x - m) * (x - m);
    return std::sqrt(q / static_cast<double>(v.size()));
  };
  CHECK(rec.n_psnr == 4);
  CHECK(std::abs(rec.psnr_mean - mean_of(psnrs)) < 1e-12);
  CHECK(std::abs(rec.psnr_std - pop_std(psnrs)) < 1e-12);
  CHECK(std::abs(rec.ssim_mean - mean_of(ssims)) < 1e-12);
  CHECK(std::abs(rec.ssim_std - pop_std(ssims)) < 1e-12);
}

TEST_CASE("evaluate_model checks split roles and fills all three records") {
  Dataset rt = small_eval_split(Role::RetainTest, 2, 44);
  Dataset ft = small_eval_split(Role::ForgetTest, 2, 45);
  Dataset fg = small_eval_split(Role::Forget, 2, 46);
  ModelParams p = init_params({2, 2}, 47);
  EvalSummary s = evaluate_model(p, rt, ft, fg, "model-x");
  CHECK(s.bta.split == Role::RetainTest);
  CHECK(s.kta.split == Role::ForgetTest);
  CHECK(s.ua.split == Role::Forget);
  CHECK(s.bta.model_id == "model-x");
  CHECK_THROWS_AS(evaluate_model(p, ft, ft, fg, "m"), UsageError);
  CHECK_THROWS_AS(evaluate_model(p, rt, rt, fg, "m"), UsageError);
  CHECK_THROWS_AS(evaluate_model(p, rt, ft, rt, "m"), UsageError);
}

TEST_CASE("empty datasets cannot be evaluated") {
  Dataset empty;
  empty.role = Role::RetainTest;
  CHECK_THROWS_AS(evaluate_split(init_params({2, 2}, 48), empty, "m"), UsageError);
}

TEST_CASE("gap is a signed difference on matching splits") {
  MetricsRecord a = hand_record("a", Role::RetainTest, 36.65);
  MetricsRecord b = hand_record("b", Role::RetainTest, 31.82);
  CHECK(gap(a, b) == doctest::Approx(4.83).epsilon(1e-12));
  CHECK(gap(b, a) == doctest::Approx(-4.83).epsilon(1e-12));
  CHECK(gap(a, a) == 0.0);
  MetricsRecord c = hand_record("c", Role::ForgetTest, 30.0);
  CHECK_THROWS_AS(gap(a, c), UsageError);
}

TEST_CASE("relative training efficiency is a min-max rescaled reciprocal") {
  std::vector<RteRecord> group;
  group.push_back(measure_rte("fast", 10.0, 3));
  group.push_back(measure_rte("mid", 20.0, 3));
  group.push_back(measure_rte("slow", 40.0, 30));
  group = normalize_rte(std::move(group));
  CHECK(group[0].normalized_inverse_rte == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(group[1].normalized_inverse_rte == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(group[2].normalized_inverse_rte == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(group[2].epochs_run == 30);
}

TEST_CASE("degenerate efficiency groups map to one") {
  std::vector<RteRecord> solo{measure_rte("only", 5.0, 1)};
  CHECK(normalize_rte(solo)[0].normalized_inverse_rte == 1.0);
  std::vector<RteRecord> equal_group;
  equal_group.push_back(measure_rte("a", 7.0, 1));
  equal_group.push_back(measure_rte("b", 7.0, 2));
  for (const RteRecord& r : normalize_rte(equal_group))
    CHECK(r.normalized_inverse_rte == 1.0);
}

TEST_CASE("efficiency measurements validate the duration") {
  CHECK_THROWS_AS(measure_rte("bad", 0.0, 1), UsageError);
  CHECK_THROWS_AS(measure_rte("bad", -2.0, 1), UsageError);
  CHECK_THROWS_AS(normalize_rte({}), UsageError);
}

TEST_CASE("quadratic fit recovers exact polynomials") {
  std::vector<std::pair<double, double>> parabola;
  for (double x : {-1.0, 0.0, 1.0, 2.0}) parabola.push_back({x, x * x});
  ParetoFit f = pareto_fit(parabola);
  CHECK(std::abs(f.a - 1.0) < 1e-9);
  CHECK(std::abs(f.b) < 1e-9);
  CHECK(std::abs(f.c) < 1e-9);
  CHECK(f.rss < 1e-18);
  CHECK(!f.has_argmax);

  // Exact interpolation through three points: y = x² - x + 1.
  ParetoFit g = pareto_fit({{1.0, 1.0}, {2.0, 3.0}, {3.0, 7.0}});
  CHECK(std::abs(g.a - 1.0) < 1e-9);
  CHECK(std::abs(g.b + 1.0) < 1e-9);
  CHECK(std::abs(g.c - 1.0) < 1e-9);
}

TEST_CASE("overdetermined fit matches an independent solver") {
  std::vector<std::pair<double, double>> pts;
  Rng g(99);
  for (double x : {0.1, 0.3, 0.5, 0.7, 0.9, 1.1})
    pts.push_back({x, -2.0 * x * x + 1.5 * x + 0.25 + 0.01 * g.normal()});
  ParetoFit fit = pareto_fit(pts);

  // Cramer's rule on the same normal equations.
  double s[5] = {0, 0, 0, 0, 0};
  double t[3] = {0, 0, 0};
  for (auto [x, y] : pts) {
    double p2 = x * x;
    s[0] += 1.0;
    s[1] += x;
    s[2] += p2;
    s[3] += p2 * x;
    s[4] += p2 * p2;
    t[0] += y;
    t[1] += x * y;
    t[2] += p2 * y;
  }
  double m[3][3] = {{s[4], s[3], s[2]}, {s[3], s[2], s[1]}, {s[2], s[1], s[0]}};
  double rhs[3] = {t[2], t[1], t[0]};
  auto det3 = [](double a[3][3]) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  double d = det3(m);
  double coef[3];
  for (int col = 0; col < 3; ++col) {
    double mm[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mm[i][j] = j == col ? rhs[i] : m[i][j];
    coef[col] = det3(mm) / d;
  }
  CHECK(std::abs(fit.a - coef[0]) < 1e-9);
  CHECK(std::abs(fit.b - coef[1]) < 1e-9);
  CHECK(std::abs(fit.c - coef[2]) < 1e-9);

  CHECK(fit.has_argmax);
  CHECK(std::abs(fit.argmax_x - (-fit.b / (2.0 * fit.a))) < 1e-12);
}

TEST_CASE("downward parabolas expose their argmax") {
  // y = -(x-2)² + 5 = -x² + 4x + 1.
  std::vector<std::pair<double, double>> pts;
  for (double x : {0.0, 1.0, 2.0, 3.0, 4.0}) pts.push_back({x, -(x - 2.0) * (x - 2.0) + 5.0});
  ParetoFit f = pareto_fit(pts);
  CHECK(f.has_argmax);
  CHECK(std::abs(f.argmax_x - 2.0) < 1e-9);
}

TEST_CASE("fit input validation") {
  CHECK_THROWS_AS(pareto_fit({{1.0, 1.0}, {2.0, 2.0}}), UsageError);
  CHECK_THROWS_AS(pareto_fit({{1.0, 1.0}, {1.0, 2.0}, {1.0, 3.0}, {1.0, 4.0}}), UsageError);
  CHECK_THROWS_AS(pareto_fit({{1.0, 1.0}, {2.0, 2.0}, {2.0, 3.0}}), UsageError);
}
