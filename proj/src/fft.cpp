#include "fft.h"

#include <cmath>

namespace urec {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void transform_pow2(std::vector<cplx>& a, bool inverse) {
  const size_t n = a.size();
  // Bit-reversal reorder.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * kTwoPi / static_cast<double>(len);
    for (size_t i = 0; i < n; i += len) {
      for (size_t k = 0; k < len / 2; ++k) {
        // Fresh twiddle per butterfly keeps accumulation error out.
        cplx w = std::polar(1.0, ang * static_cast<double>(k));
        cplx u = a[i + k];
        cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

void transform_naive(std::vector<cplx>& a, bool inverse) {
  const size_t n = a.size();
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cplx> out(n);
  for (size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (size_t j = 0; j < n; ++j) {
      double ang = sign * kTwoPi * static_cast<double>(k * j) / static_cast<double>(n);
      acc += a[j] * std::polar(1.0, ang);
    }
    out[k] = acc;
  }
  a = std::move(out);
}

// Circular shift: out[i] = in[(i + offset) mod n] along both axes.
ComplexImage roll(const ComplexImage& img, size_t roff, size_t coff) {
  ComplexImage out(img.height, img.width);
  for (size_t r = 0; r < img.height; ++r) {
    size_t rs = (r + roff) % img.height;
    for (size_t c = 0; c < img.width; ++c) {
      size_t cs = (c + coff) % img.width;
      out.at(r, c) = img.at(rs, cs);
    }
  }
  return out;
}

ComplexImage ifftshift(const ComplexImage& img) {
  return roll(img, img.height / 2, img.width / 2);
}

ComplexImage fftshift(const ComplexImage& img) {
  return roll(img, (img.height + 1) / 2, (img.width + 1) / 2);
}

void dft_rows_cols(ComplexImage& img, bool inverse) {
  for (size_t r = 0; r < img.height; ++r)
    dft_1d(&img.at(r, 0), img.width, 1, inverse);
  for (size_t c = 0; c < img.width; ++c)
    dft_1d(&img.at(0, c), img.height, img.width, inverse);
}

}  // namespace

void dft_1d(cplx* data, size_t n, size_t stride, bool inverse) {
  if (n <= 1) return;
  std::vector<cplx> buf(n);
  for (size_t i = 0; i < n; ++i) buf[i] = data[i * stride];
  if (is_pow2(n))
    transform_pow2(buf, inverse);
  else
    transform_naive(buf, inverse);
  for (size_t i = 0; i < n; ++i) data[i * stride] = buf[i];
}

ComplexImage fft2c(const ComplexImage& img) {
  ComplexImage work = ifftshift(img);
  dft_rows_cols(work, /*inverse=*/false);
  work = fftshift(work);
  const double scale = 1.0 / std::sqrt(static_cast<double>(img.size()));
  for (cplx& v : work.data) v *= scale;
  return work;
}

ComplexImage ifft2c(const ComplexImage& img) {
  ComplexImage work = ifftshift(img);
  dft_rows_cols(work, /*inverse=*/true);
  work = fftshift(work);
  const double scale = 1.0 / std::sqrt(static_cast<double>(img.size()));
  for (cplx& v : work.data) v *= scale;
  return work;
}

}  // namespace urec
