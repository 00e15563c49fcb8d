#include "evaluate.h"

#include <algorithm>
#include <cmath>

#include "errors.h"
#include "metrics.h"
#include "recon.h"

namespace urec {
namespace {

struct MeanStd {
  double mean = 0.0;
  double stdev = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  double s = 0.0;
  for (double x : v) s += x;
  out.mean = s / static_cast<double>(v.size());
  double q = 0.0;
  for (double x : v) q += (x - out.mean) * (x - out.mean);
  out.stdev = std::sqrt(q / static_cast<double>(v.size()));
  return out;
}

}  // namespace

MetricsRecord evaluate_split(const ModelParams& p, const Dataset& data,
                             const std::string& model_id) {
  if (data.samples.empty()) throw UsageError("evaluate_split: empty dataset");
  MetricsRecord rec;
  rec.model_id = model_id;
  rec.split = data.role;

  std::vector<double> psnrs, ssims;
  psnrs.reserve(data.samples.size());
  ssims.reserve(data.samples.size());
  for (const Sample& s : data.samples) {
    RealImage out = reconstruct(p, s.masked_kspace, s.mask);
    double ps = psnr(out, s.target);
    if (std::isinf(ps))
      ++rec.n_sentinel;
    else
      psnrs.push_back(ps);
    ssims.push_back(ssim(out, s.target));
  }

  if (psnrs.empty()) {
    rec.psnr_mean = kPsnrSentinel;
    rec.psnr_std = 0.0;
  } else {
    MeanStd ms = mean_std(psnrs);
    rec.psnr_mean = ms.mean;
    rec.psnr_std = ms.stdev;
  }
  MeanStd ss = mean_std(ssims);
  rec.ssim_mean = ss.mean;
  rec.ssim_std = ss.stdev;
  rec.n_psnr = psnrs.size();
  rec.n_ssim = ssims.size();
  return rec;
}

EvalSummary evaluate_model(const ModelParams& p, const Dataset& retain_test,
                           const Dataset& forget_test, const Dataset& forget,
                           const std::string& model_id) {
  if (retain_test.role != Role::RetainTest) throw UsageError("evaluate_model: bad retain_test role");
  if (forget_test.role != Role::ForgetTest) throw UsageError("evaluate_model: bad forget_test role");
  if (forget.role != Role::Forget) throw UsageError("evaluate_model: bad forget role");
  EvalSummary s;
  s.bta = evaluate_split(p, retain_test, model_id);
  s.kta = evaluate_split(p, forget_test, model_id);
  s.ua = evaluate_split(p, forget, model_id);
  return s;
}

double gap(const MetricsRecord& a, const MetricsRecord& b) {
  if (a.split != b.split) throw UsageError("gap: split role mismatch");
  return a.psnr_mean - b.psnr_mean;
}

RteRecord measure_rte(const std::string& model_id, double wall_seconds, size_t epochs_run) {
  if (wall_seconds <= 0.0) throw UsageError("measure_rte: duration must be positive");
  RteRecord r;
  r.model_id = model_id;
  r.wall_seconds = wall_seconds;
  r.epochs_run = epochs_run;
  return r;
}

std::vector<RteRecord> normalize_rte(std::vector<RteRecord> group) {
  if (group.empty()) throw UsageError("normalize_rte: empty group");
  double lo = 1.0 / group.front().wall_seconds, hi = lo;
  for (const RteRecord& r : group) {
    if (r.wall_seconds <= 0.0) throw UsageError("normalize_rte: duration must be positive");
    double inv = 1.0 / r.wall_seconds;
    lo = std::min(lo, inv);
    hi = std::max(hi, inv);
  }
  for (RteRecord& r : group) {
    double inv = 1.0 / r.wall_seconds;
    r.normalized_inverse_rte = hi > lo ? (inv - lo) / (hi - lo) : 1.0;
  }
  return group;
}

ParetoFit pareto_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw UsageError("pareto_fit: need at least 3 points");
  std::vector<double> xs;
  for (const auto& [x, y] : points) {
    (void)y;
    if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
  }
  if (xs.size() < 3) throw UsageError("pareto_fit: degenerate x values");

  // Normal equations for [a b c] against the Vandermonde of (x^2, x, 1).
  double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double rhs[3] = {0, 0, 0};
  for (const auto& [x, y] : points) {
    double basis[3] = {x * x, x, 1.0};
    for (int i = 0; i < 3; ++i) {
      rhs[i] += basis[i] * y;
      for (int j = 0; j < 3; ++j) m[i][j] += basis[i] * basis[j];
    }
  }

  // Gaussian elimination with partial pivoting.
  int order[3] = {0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[order[r]][col]) > std::abs(m[order[piv]][col])) piv = r;
    std::swap(order[col], order[piv]);
    double d = m[order[col]][col];
    if (d == 0.0) throw UsageError("pareto_fit: singular system");
    for (int r = col + 1; r < 3; ++r) {
      double f = m[order[r]][col] / d;
      for (int c = col; c < 3; ++c) m[order[r]][c] -= f * m[order[col]][c];
      rhs[order[r]] -= f * rhs[order[col]];
    }
  }
  double sol[3];
  for (int row = 2; row >= 0; --row) {
    double acc = rhs[order[row]];
    for (int c = row + 1; c < 3; ++c) acc -= m[order[row]][c] * sol[c];
    sol[row] = acc / m[order[row]][row];
  }

  ParetoFit fit;
  fit.a = sol[0];
  fit.b = sol[1];
  fit.c = sol[2];
  for (const auto& [x, y] : points) {
    double r = y - (fit.a * x * x + fit.b * x + fit.c);
    fit.rss += r * r;
  }
  if (fit.a < 0.0) {
    fit.has_argmax = true;
    fit.argmax_x = -fit.b / (2.0 * fit.a);
  }
  return fit;
}

}  // namespace urec
