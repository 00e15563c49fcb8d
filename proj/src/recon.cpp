#include "recon.h"

#include <cmath>

#include "fft.h"

namespace urec {
namespace {

using Planes = std::vector<std::vector<double>>;  // [channel][row*width]

Planes make_planes(size_t n, size_t hw) { return Planes(n, std::vector<double>(hw, 0.0)); }

// 3×3 zero-padded convolution; weights laid out [out][in][ky][kx].
void conv3x3(const Planes& in, const double* w, const double* bias, Planes& out,
             size_t h, size_t wd) {
  const size_t n_in = in.size(), n_out = out.size();
  for (size_t o = 0; o < n_out; ++o)
    std::fill(out[o].begin(), out[o].end(), bias[o]);
  for (size_t o = 0; o < n_out; ++o) {
    for (size_t i = 0; i < n_in; ++i) {
      const double* wk = w + (o * n_in + i) * 9;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const double wv = wk[(dy + 1) * 3 + (dx + 1)];
          if (wv == 0.0) continue;
          const size_t r0 = dy < 0 ? 1 : 0, r1 = dy > 0 ? h - 1 : h;
          const size_t c0 = dx < 0 ? 1 : 0, c1 = dx > 0 ? wd - 1 : wd;
          for (size_t r = r0; r < r1; ++r) {
            const double* src = in[i].data() + (r + dy) * wd + dx;
            double* dst = out[o].data() + r * wd;
            for (size_t c = c0; c < c1; ++c) dst[c] += wv * src[c];
          }
        }
      }
    }
  }
}

// Backward of conv3x3: accumulates input, weight, and bias gradients.
void conv3x3_backward(const Planes& in, const double* w, const Planes& gout,
                      Planes& gin, double* gw, double* gbias, size_t h, size_t wd) {
  const size_t n_in = in.size(), n_out = gout.size();
  for (size_t o = 0; o < n_out; ++o) {
    double acc = 0.0;
    for (double v : gout[o]) acc += v;
    gbias[o] += acc;
  }
  for (size_t o = 0; o < n_out; ++o) {
    for (size_t i = 0; i < n_in; ++i) {
      const double* wk = w + (o * n_in + i) * 9;
      double* gwk = gw + (o * n_in + i) * 9;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const size_t r0 = dy < 0 ? 1 : 0, r1 = dy > 0 ? h - 1 : h;
          const size_t c0 = dx < 0 ? 1 : 0, c1 = dx > 0 ? wd - 1 : wd;
          double wgrad = 0.0;
          const double wv = wk[(dy + 1) * 3 + (dx + 1)];
          for (size_t r = r0; r < r1; ++r) {
            const double* src = in[i].data() + (r + dy) * wd + dx;
            double* gsrc = gin[i].data() + (r + dy) * wd + dx;
            const double* g = gout[o].data() + r * wd;
            for (size_t c = c0; c < c1; ++c) {
              wgrad += g[c] * src[c];
              gsrc[c] += wv * g[c];
            }
          }
          gwk[(dy + 1) * 3 + (dx + 1)] += wgrad;
        }
      }
    }
  }
}

size_t center_start(const SamplingMask& m, size_t& n_center) {
  n_center = static_cast<size_t>(
      std::llround(static_cast<double>(m.width) * m.center_fraction));
  if (n_center == 0) throw DataError("estimate_sensitivities: empty center block");
  return (m.width - n_center) / 2;
}

}  // namespace

CoilSensitivities estimate_sensitivities(const MultiCoilKSpace& masked_k,
                                         const SamplingMask& m) {
  if (masked_k.width() != m.width)
    throw DataError("estimate_sensitivities: mask width mismatch");
  size_t n_center = 0;
  size_t start = center_start(m, n_center);
  const size_t h = masked_k.height(), w = masked_k.width();

  CoilSensitivities sens;
  sens.n_coils = masked_k.n_coils;
  for (const ComplexImage& plane : masked_k.planes) {
    ComplexImage acs(h, w);
    for (size_t r = 0; r < h; ++r)
      for (size_t c = start; c < start + n_center; ++c) acs.at(r, c) = plane.at(r, c);
    sens.maps.push_back(ifft2c(acs));
  }
  constexpr double kEps = 1e-8;
  for (size_t i = 0; i < h * w; ++i) {
    double ss = 0.0;
    for (const ComplexImage& map : sens.maps) ss += std::norm(map.data[i]);
    double rss = std::sqrt(ss);
    for (ComplexImage& map : sens.maps)
      map.data[i] = rss > kEps ? map.data[i] / rss : cplx(0.0, 0.0);
  }
  return sens;
}

ForwardTrace reconstruct_traced(const ModelParams& p, const MultiCoilKSpace& masked_k,
                                const SamplingMask& m) {
  const size_t h = masked_k.height(), w = masked_k.width(), hw = h * w;
  const size_t nc = masked_k.n_coils, T = p.arch.cascades, ch = p.arch.channels;

  ForwardTrace tr;
  tr.sens = estimate_sensitivities(masked_k, m);
  tr.k.reserve(T + 1);
  tr.k.push_back(masked_k);

  for (size_t t = 0; t < T; ++t) {
    const MultiCoilKSpace& kt = tr.k.back();
    std::vector<ComplexImage> imgs;
    imgs.reserve(nc);
    for (const ComplexImage& plane : kt.planes) imgs.push_back(ifft2c(plane));

    // Coil-combined image, re/im as two channels.
    Planes z = make_planes(2, hw);
    for (size_t c = 0; c < nc; ++c) {
      const ComplexImage& s = tr.sens.maps[c];
      const ComplexImage& im = imgs[c];
      for (size_t i = 0; i < hw; ++i) {
        cplx v = std::conj(s.data[i]) * im.data[i];
        z[0][i] += v.real();
        z[1][i] += v.imag();
      }
    }

    Planes pre1 = make_planes(ch, hw);
    conv3x3(z, p.conv1(t), p.bias1(t), pre1, h, w);
    Planes hidden = pre1;
    for (auto& plane : hidden)
      for (double& v : plane) v = v > 0.0 ? v : 0.0;
    Planes out2 = make_planes(2, hw);
    conv3x3(hidden, p.conv2(t), p.bias2(t), out2, h, w);

    // Refinement image back through the coil maps and into k-space.
    MultiCoilKSpace knext;
    knext.n_coils = nc;
    const double dc = p.dc(t);
    for (size_t c = 0; c < nc; ++c) {
      ComplexImage expanded(h, w);
      const ComplexImage& s = tr.sens.maps[c];
      for (size_t i = 0; i < hw; ++i)
        expanded.data[i] = s.data[i] * cplx(out2[0][i], out2[1][i]);
      ComplexImage fk = fft2c(expanded);
      ComplexImage plane(h, w);
      for (size_t r = 0; r < h; ++r) {
        for (size_t col = 0; col < w; ++col) {
          cplx kv = kt.planes[c].at(r, col);
          cplx dc_term = m.kept[col] ? dc * (kv - masked_k.planes[c].at(r, col))
                                     : cplx(0.0, 0.0);
          plane.at(r, col) = kv - dc_term - fk.at(r, col);
        }
      }
      knext.planes.push_back(std::move(plane));
    }

    tr.combined.push_back(std::move(z));
    tr.pre1.push_back(std::move(pre1));
    tr.hidden.push_back(std::move(hidden));
    tr.k.push_back(std::move(knext));
  }

  tr.final_imgs.reserve(nc);
  for (const ComplexImage& plane : tr.k.back().planes)
    tr.final_imgs.push_back(ifft2c(plane));
  tr.output = RealImage(h, w);
  for (size_t i = 0; i < hw; ++i) {
    double ss = 0.0;
    for (const ComplexImage& im : tr.final_imgs) ss += std::norm(im.data[i]);
    tr.output.data[i] = std::sqrt(ss);
  }
  return tr;
}

RealImage reconstruct(const ModelParams& p, const MultiCoilKSpace& masked_k,
                      const SamplingMask& m) {
  return reconstruct_traced(p, masked_k, m).output;
}

void reconstruct_backward(const ModelParams& p, const MultiCoilKSpace& masked_k,
                          const SamplingMask& m, const ForwardTrace& tr,
                          const RealImage& output_grad, std::vector<double>& grad) {
  const size_t h = masked_k.height(), w = masked_k.width(), hw = h * w;
  const size_t nc = masked_k.n_coils, T = p.arch.cascades, ch = p.arch.channels;
  if (grad.size() != p.values.size())
    throw UsageError("reconstruct_backward: gradient vector length mismatch");

  // RSS backward: for out = sqrt(Σ|x_c|²), x̄_c = (ḡ/out)·x_c.
  std::vector<ComplexImage> kbar(nc, ComplexImage(h, w));
  {
    std::vector<ComplexImage> img_bar(nc, ComplexImage(h, w));
    for (size_t c = 0; c < nc; ++c) {
      for (size_t i = 0; i < hw; ++i) {
        double denom = tr.output.data[i];
        img_bar[c].data[i] = denom > 0.0
                                 ? (output_grad.data[i] / denom) * tr.final_imgs[c].data[i]
                                 : cplx(0.0, 0.0);
      }
      kbar[c] = fft2c(img_bar[c]);  // adjoint of ifft2c
    }
  }

  for (size_t t = T; t-- > 0;) {
    const MultiCoilKSpace& kt = tr.k[t];
    const double dc = p.dc(t);

    // dc_weight gradient: ∂k^{t+1}/∂dc = −M ⊙ (kᵗ − k⁰).
    double dc_grad = 0.0;
    for (size_t c = 0; c < nc; ++c) {
      for (size_t r = 0; r < h; ++r) {
        for (size_t col = 0; col < w; ++col) {
          if (!m.kept[col]) continue;
          cplx diff = kt.planes[c].at(r, col) - masked_k.planes[c].at(r, col);
          cplx kb = kbar[c].at(r, col);
          dc_grad -= kb.real() * diff.real() + kb.imag() * diff.imag();
        }
      }
    }
    size_t base = p.cascade_base(t);
    grad[base] += dc_grad;

    // Refinement path: k^{t+1} has −F(S ⊙ refined), so ū = −k̄^{t+1}.
    Planes out2_bar = make_planes(2, hw);
    for (size_t c = 0; c < nc; ++c) {
      ComplexImage ubar(h, w);
      for (size_t i = 0; i < hw; ++i) ubar.data[i] = -kbar[c].data[i];
      ComplexImage exp_bar = ifft2c(ubar);  // adjoint of fft2c
      const ComplexImage& s = tr.sens.maps[c];
      for (size_t i = 0; i < hw; ++i) {
        cplx rb = std::conj(s.data[i]) * exp_bar.data[i];
        out2_bar[0][i] += rb.real();
        out2_bar[1][i] += rb.imag();
      }
    }

    Planes hidden_bar = make_planes(ch, hw);
    conv3x3_backward(tr.hidden[t], p.conv2(t), out2_bar, hidden_bar,
                     grad.data() + base + 1 + 19 * ch, grad.data() + base + 1 + 37 * ch,
                     h, w);
    // ReLU backward (derivative 0 at the kink).
    for (size_t i = 0; i < ch; ++i)
      for (size_t j = 0; j < hw; ++j)
        if (tr.pre1[t][i][j] <= 0.0) hidden_bar[i][j] = 0.0;

    Planes z_bar = make_planes(2, hw);
    conv3x3_backward(tr.combined[t], p.conv1(t), hidden_bar, z_bar,
                     grad.data() + base + 1, grad.data() + base + 1 + 18 * ch, h, w);

    // Through reduce and the per-coil inverse transform, plus the direct
    // (1 − dc·M) path into k̄ᵗ.
    std::vector<ComplexImage> kbar_prev(nc, ComplexImage(h, w));
    for (size_t c = 0; c < nc; ++c) {
      const ComplexImage& s = tr.sens.maps[c];
      ComplexImage img_bar(h, w);
      for (size_t i = 0; i < hw; ++i)
        img_bar.data[i] = s.data[i] * cplx(z_bar[0][i], z_bar[1][i]);
      kbar_prev[c] = fft2c(img_bar);
      for (size_t r = 0; r < h; ++r) {
        for (size_t col = 0; col < w; ++col) {
          double coeff = m.kept[col] ? 1.0 - dc : 1.0;
          kbar_prev[c].at(r, col) += coeff * kbar[c].at(r, col);
        }
      }
    }
    kbar = std::move(kbar_prev);
  }
}

}  // namespace urec
