#pragma once

// Cartesian acquisition operator: equispaced column masks, the multi-coil
// forward model y_j = M . F(S_j . x), and its adjoint (zero-filled
// reconstruction).

#include <cmath>

#include "priiner/fft.hpp"
#include "priiner/grid.hpp"

namespace priiner {

// Fully sampled center block of round(center_fraction*W) columns about W/2,
// plus every R-th column starting at 0. Columns may satisfy both.
inline SamplingMask make_equispaced_mask(std::size_t W, int R,
                                         double center_fraction) {
  if (W < 1 || W % 2 != 0)
    throw ValidationError("mask: width must be a positive even integer");
  if (R < 1) throw ValidationError("mask: acceleration must be >= 1");
  if (!(center_fraction > 0.0) || center_fraction > 1.0)
    throw ValidationError("mask: center_fraction must be in (0, 1]");

  SamplingMask m;
  m.W = W;
  m.acceleration = R;
  m.center_fraction = center_fraction;
  m.sampled.assign(W, 0);

  for (std::size_t k = 0; k < W; k += std::size_t(R)) m.sampled[k] = 1;

  const auto n_center =
      std::size_t(std::floor(center_fraction * double(W) + 0.5));
  const std::size_t start = W / 2 - n_center / 2;
  for (std::size_t k = start; k < start + n_center && k < W; ++k)
    m.sampled[k] = 1;
  return m;
}

inline void require_consistent(const ComplexGrid2D& img, const CoilMaps& csm,
                               const SamplingMask& mask, const char* what) {
  if (csm.H != img.H || csm.W != img.W || csm.coils < 1)
    throw ValidationError(std::string(what) + ": image/maps shape mismatch");
  if (mask.W != img.W)
    throw ValidationError(std::string(what) + ": mask width mismatch");
}

inline MultiCoilKSpace forward_model(const ComplexGrid2D& img,
                                     const CoilMaps& csm,
                                     const SamplingMask& mask) {
  require_consistent(img, csm, mask, "forward_model");
  MultiCoilKSpace y(csm.coils, img.H, img.W);
  ComplexGrid2D weighted(img.H, img.W);
  for (std::size_t j = 0; j < csm.coils; ++j) {
    const cplx* s = csm.coil(j);
    for (std::size_t p = 0; p < img.H * img.W; ++p)
      weighted.v[p] = s[p] * img.v[p];
    ComplexGrid2D k = fft2c(weighted);
    cplx* out = y.coil(j);
    for (std::size_t i = 0; i < img.H; ++i)
      for (std::size_t c = 0; c < img.W; ++c)
        out[i * img.W + c] = mask.sampled[c] ? k.at(i, c) : cplx{0.0, 0.0};
  }
  return y;
}

// Adjoint of forward_model: sum_j conj(S_j) . ifft2c(M . y_j).
inline ComplexGrid2D zero_filled_adjoint(const MultiCoilKSpace& ksp,
                                         const CoilMaps& csm,
                                         const SamplingMask& mask) {
  if (ksp.coils != csm.coils || ksp.H != csm.H || ksp.W != csm.W)
    throw ValidationError("zero_filled_adjoint: kspace/maps shape mismatch");
  if (mask.W != ksp.W)
    throw ValidationError("zero_filled_adjoint: mask width mismatch");

  ComplexGrid2D out(ksp.H, ksp.W);
  ComplexGrid2D masked(ksp.H, ksp.W);
  for (std::size_t j = 0; j < ksp.coils; ++j) {
    const cplx* y = ksp.coil(j);
    for (std::size_t i = 0; i < ksp.H; ++i)
      for (std::size_t c = 0; c < ksp.W; ++c)
        masked.at(i, c) = mask.sampled[c] ? y[i * ksp.W + c] : cplx{0.0, 0.0};
    ComplexGrid2D img = ifft2c(masked);
    const cplx* s = csm.coil(j);
    for (std::size_t p = 0; p < ksp.H * ksp.W; ++p)
      out.v[p] += std::conj(s[p]) * img.v[p];
  }
  return out;
}

}  // namespace priiner
