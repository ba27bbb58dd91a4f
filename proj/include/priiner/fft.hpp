#pragma once

// Centered unitary 2D Fourier transforms. DC sits at (H/2, W/2) and
// ||fft2c(x)|| == ||x||, so loss magnitudes do not depend on resolution.
// Even H and W only; odd sizes would make the center index ambiguous.

#include <complex>
#include <vector>

#include "priiner/grid.hpp"

namespace priiner {

namespace fft_detail {

inline bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

// In-place iterative radix-2 DIT, unnormalized, exponent sign -1.
inline void radix2(std::vector<cplx>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * 3.14159265358979323846 / double(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx w = std::polar(1.0, ang * double(k));
        const cplx u = a[i + k];
        const cplx t = a[i + k + len / 2] * w;
        a[i + k] = u + t;
        a[i + k + len / 2] = u - t;
      }
    }
  }
}

// Bluestein chirp-z for arbitrary n, unnormalized, exponent sign -1.
inline void bluestein(std::vector<cplx>& a) {
  const std::size_t n = a.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;

  std::vector<cplx> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small
    const std::size_t k2 = (k * k) % (2 * n);
    chirp[k] = std::polar(1.0, -3.14159265358979323846 * double(k2) / double(n));
  }

  std::vector<cplx> fa(m), fb(m);
  for (std::size_t k = 0; k < n; ++k) fa[k] = a[k] * chirp[k];
  fb[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k)
    fb[k] = fb[m - k] = std::conj(chirp[k]);

  radix2(fa);
  radix2(fb);
  for (std::size_t k = 0; k < m; ++k) fa[k] *= fb[k];
  // inverse of the padded transform via conjugation
  for (auto& z : fa) z = std::conj(z);
  radix2(fa);
  for (std::size_t k = 0; k < n; ++k)
    a[k] = std::conj(fa[k]) / double(m) * chirp[k];
}

inline void fft1d(std::vector<cplx>& a, bool inverse) {
  if (a.size() <= 1) return;
  if (inverse)
    for (auto& z : a) z = std::conj(z);
  if (is_pow2(a.size()))
    radix2(a);
  else
    bluestein(a);
  if (inverse)
    for (auto& z : a) z = std::conj(z);
}

// Unnormalized 2D DFT with fftshift on both sides.
inline ComplexGrid2D centered_2d(const ComplexGrid2D& in, bool inverse) {
  const std::size_t H = in.H, W = in.W;
  if (H == 0 || W == 0) throw ValidationError("fft2c: empty grid");
  if (H % 2 != 0 || W % 2 != 0)
    throw ValidationError("fft2c: grid sizes must be even");
  if (!in.finite()) throw ValidationError("fft2c: non-finite input");

  // ifftshift (== fftshift for even sizes)
  ComplexGrid2D work(H, W);
  for (std::size_t i = 0; i < H; ++i)
    for (std::size_t k = 0; k < W; ++k)
      work.at(i, k) = in.at((i + H / 2) % H, (k + W / 2) % W);

  std::vector<cplx> row(W);
  for (std::size_t i = 0; i < H; ++i) {
    for (std::size_t k = 0; k < W; ++k) row[k] = work.at(i, k);
    fft1d(row, inverse);
    for (std::size_t k = 0; k < W; ++k) work.at(i, k) = row[k];
  }
  std::vector<cplx> col(H);
  for (std::size_t k = 0; k < W; ++k) {
    for (std::size_t i = 0; i < H; ++i) col[i] = work.at(i, k);
    fft1d(col, inverse);
    for (std::size_t i = 0; i < H; ++i) work.at(i, k) = col[i];
  }

  ComplexGrid2D out(H, W);
  for (std::size_t i = 0; i < H; ++i)
    for (std::size_t k = 0; k < W; ++k)
      out.at(i, k) = work.at((i + H / 2) % H, (k + W / 2) % W);
  return out;
}

}  // namespace fft_detail

inline ComplexGrid2D fft2c(const ComplexGrid2D& img) {
  ComplexGrid2D out = fft_detail::centered_2d(img, false);
  const double s = 1.0 / std::sqrt(double(img.H) * double(img.W));
  for (auto& z : out.v) z *= s;
  return out;
}

inline ComplexGrid2D ifft2c(const ComplexGrid2D& ksp) {
  ComplexGrid2D out = fft_detail::centered_2d(ksp, true);
  const double s = 1.0 / std::sqrt(double(ksp.H) * double(ksp.W));
  for (auto& z : out.v) z *= s;
  return out;
}

}  // namespace priiner
