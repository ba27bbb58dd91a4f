#pragma once

// Plug-and-play prior image providers. Deep-learning priors computed
// elsewhere enter through the `file` kind; the oracle kinds exist for
// testing and desk-scale benchmarks.

#include <string>

#include "priiner/config.hpp"
#include "priiner/kspace.hpp"
#include "priiner/npy.hpp"

namespace priiner {

struct PriorSpec {
  PriorKind kind = PriorKind::zero_filled;
  std::string path;   // file kind
  double rho = 0.25;  // lowpass_oracle keep-fraction, in (0, 1]
};

// Keeps the centered rho-fraction of truth's k-space (both axes) and zeroes
// the rest; a stand-in for a smooth, alias-free population prior.
inline ComplexGrid2D lowpass_prior(const ComplexGrid2D& truth, double rho) {
  if (!(rho > 0.0) || rho > 1.0)
    throw ValidationError("lowpass prior: rho must be in (0, 1]");
  ComplexGrid2D k = fft2c(truth);
  const auto keep_h = std::size_t(std::floor(rho * double(truth.H) + 0.5));
  const auto keep_w = std::size_t(std::floor(rho * double(truth.W) + 0.5));
  const std::size_t i0 = truth.H / 2 - keep_h / 2;
  const std::size_t k0 = truth.W / 2 - keep_w / 2;
  for (std::size_t i = 0; i < truth.H; ++i)
    for (std::size_t c = 0; c < truth.W; ++c)
      if (i < i0 || i >= i0 + keep_h || c < k0 || c >= k0 + keep_w)
        k.at(i, c) = cplx{0.0, 0.0};
  return ifft2c(k);
}

inline ComplexGrid2D load_prior_image(const std::string& path, std::size_t H,
                                      std::size_t W) {
  const npy::ArrayFile a = npy::read(path);
  if (a.shape.size() != 2 || a.shape[0] != H || a.shape[1] != W)
    throw ValidationError("prior file: shape mismatch with reconstruction");
  ComplexGrid2D img(H, W);
  img.v = npy::to_complex(a);
  return img;
}

inline ComplexGrid2D make_prior(const PriorSpec& spec, const MultiCoilKSpace& y,
                                const SamplingMask& mask, const CoilMaps& csm0,
                                const ComplexGrid2D* truth = nullptr) {
  switch (spec.kind) {
    case PriorKind::file:
      return load_prior_image(spec.path, y.H, y.W);
    case PriorKind::zero_filled:
      return zero_filled_adjoint(y, csm0, mask);
    case PriorKind::lowpass_oracle:
      if (!truth)
        throw ValidationError("make_prior: lowpass_oracle requires a truth image");
      return lowpass_prior(*truth, spec.rho);
    case PriorKind::ground_truth_oracle:
      if (!truth)
        throw ValidationError("make_prior: ground_truth_oracle requires a truth image");
      return *truth;
  }
  throw ValidationError("make_prior: invalid prior kind");
}

}  // namespace priiner
