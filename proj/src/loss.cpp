#include "loss.h"

#include <cmath>

#include "rng.h"

namespace urec {
namespace {

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double l1_norm(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += std::abs(x);
  return acc;
}

std::vector<LossTerm> as_terms(const LossSpec& spec) {
  if (spec.kind == LossKind::Composite) {
    for (const LossTerm& t : spec.terms)
      if (t.kind == LossKind::Composite)
        throw UsageError("composite loss terms must be atomic");
    return spec.terms;
  }
  return {LossTerm{spec.kind, 1.0, spec.gamma, spec.lambda}};
}

}  // namespace

double loss_l1(const RealImage& pred, const RealImage& target) {
  require_same_shape(pred, target, "loss_l1");
  double acc = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) acc += std::abs(pred.data[i] - target.data[i]);
  return acc / static_cast<double>(pred.size());
}

RealImage noisy_target(const RealImage& target, double lambda, uint64_t noise_seed) {
  Rng g(noise_seed);
  RealImage out = target;
  for (double& v : out.data) v += lambda * g.normal();
  return out;
}

LossResult loss_and_grad(const ModelParams& p, const std::vector<BatchItem>& batch,
                         const LossSpec& spec) {
  if (batch.empty()) throw UsageError("loss_and_grad: empty batch");
  const std::vector<LossTerm> terms = as_terms(spec);
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  LossResult res;
  res.grad.assign(p.values.size(), 0.0);

  for (const BatchItem& item : batch) {
    const Sample& s = *item.sample;
    ForwardTrace tr = reconstruct_traced(p, s.masked_kspace, s.mask);
    const size_t n = tr.output.size();
    const double inv_bn = inv_b / static_cast<double>(n);

    RealImage cotangent(tr.output.height, tr.output.width);
    for (const LossTerm& term : terms) {
      double term_sign = term.kind == LossKind::NegatedL1PlusL1Reg ? -1.0 : 1.0;
      RealImage target = s.target;
      if (term.kind == LossKind::NoisyLabel && term.lambda != 0.0)
        target = noisy_target(s.target, term.lambda, item.noise_seed);
      require_same_shape(tr.output, target, "loss_and_grad");
      double acc = 0.0;
      for (size_t i = 0; i < n; ++i) {
        double d = tr.output.data[i] - target.data[i];
        acc += std::abs(d);
        cotangent.data[i] += term.weight * term_sign * inv_bn * sign0(d);
      }
      res.value += term.weight * term_sign * inv_b * acc / static_cast<double>(n);
    }
    reconstruct_backward(p, s.masked_kspace, s.mask, tr, cotangent, res.grad);
  }

  // Parameter-space regularizers enter once per batch, not per sample.
  for (const LossTerm& term : terms) {
    if (term.kind != LossKind::NegatedL1PlusL1Reg || term.gamma == 0.0) continue;
    res.value += term.weight * term.gamma * l1_norm(p.values);
    for (size_t i = 0; i < p.values.size(); ++i)
      res.grad[i] += term.weight * term.gamma * sign0(p.values[i]);
  }

  if (!std::isfinite(res.value))
    throw NumericError("loss_and_grad: non-finite loss value");
  return res;
}

}  // namespace urec
