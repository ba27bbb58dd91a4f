#pragma once

// Dual data-consistency objective:
//   L = alpha * L_DC + L_prior + lambda * TV(I(theta))
// with L_DC = sum_j ||y_j - M.F(S_j I)||^2 over acquired k-space and
// L_prior = sum_j ||F(S_j x_p) - F(S_j I)||^2 over the full k-space.
// Sum reductions throughout; maps are RSS-normalized before every use and
// gradients flow through the normalization and through S_j in both prior
// terms.

#include <utility>
#include <vector>

#include "priiner/csm.hpp"
#include "priiner/inr.hpp"
#include "priiner/kspace.hpp"

namespace priiner {

struct LossBreakdown {
  double l_dc = 0.0;
  double l_prior = 0.0;
  double l_tv = 0.0;
  double total = 0.0;
};

// Anisotropic TV with forward differences, no wraparound.
inline double loss_tv(const std::vector<double>& img, std::size_t H,
                      std::size_t W) {
  double tv = 0.0;
  for (std::size_t i = 0; i < H; ++i)
    for (std::size_t k = 0; k < W; ++k) {
      if (i + 1 < H) tv += std::abs(img[(i + 1) * W + k] - img[i * W + k]);
      if (k + 1 < W) tv += std::abs(img[i * W + k + 1] - img[i * W + k]);
    }
  return tv;
}

// Subgradient of |d| at d == 0 is 0.
inline std::vector<double> loss_tv_backward(const std::vector<double>& img,
                                            std::size_t H, std::size_t W) {
  std::vector<double> g(H * W, 0.0);
  auto sgn = [](double d) { return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0); };
  for (std::size_t i = 0; i < H; ++i)
    for (std::size_t k = 0; k < W; ++k) {
      if (i + 1 < H) {
        const double s = sgn(img[(i + 1) * W + k] - img[i * W + k]);
        g[(i + 1) * W + k] += s;
        g[i * W + k] -= s;
      }
      if (k + 1 < W) {
        const double s = sgn(img[i * W + k + 1] - img[i * W + k]);
        g[i * W + k + 1] += s;
        g[i * W + k] -= s;
      }
    }
  return g;
}

// Shared state for one reconstruction problem; caches the polynomial basis.
struct Objective {
  const MultiCoilKSpace& y;
  const SamplingMask& mask;
  const ComplexGrid2D& prior;
  HashGridConfig cfg;
  double alpha;
  double lambda;
  bool use_prior;  // false drops L_prior entirely (DC-only ablation)
  std::size_t H, W;
  std::vector<double> basis;  // csm monomial basis for the configured degree

  Objective(const MultiCoilKSpace& y_, const SamplingMask& mask_,
            const ComplexGrid2D& prior_, const HashGridConfig& cfg_,
            int csm_degree, double alpha_, double lambda_,
            bool use_prior_ = true)
      : y(y_), mask(mask_), prior(prior_), cfg(cfg_), alpha(alpha_),
        lambda(lambda_), use_prior(use_prior_), H(y_.H), W(y_.W) {
    if (prior.H != H || prior.W != W)
      throw ValidationError("objective: prior shape mismatch");
    if (mask.W != W) throw ValidationError("objective: mask width mismatch");
    basis = csm_basis(csm_degree, H, W);
  }

  CoilMaps normalized_maps(const CsmParams& phi, CoilMaps* raw_out = nullptr) const {
    CoilMaps raw = eval_csm_with_basis(phi, basis, H, W);
    CoilMaps maps = normalize_rss(raw);
    if (raw_out) *raw_out = std::move(raw);
    return maps;
  }

  LossBreakdown loss(const InrParams& theta, const CsmParams& phi) const {
    const std::vector<double> intens = render_intensities(theta, cfg, H, W);
    const CoilMaps maps = normalized_maps(phi);
    LossBreakdown b;
    b.l_dc = dc_term(intens, maps);
    b.l_prior = use_prior ? prior_term(intens, maps) : 0.0;
    b.l_tv = loss_tv(intens, H, W);
    b.total = alpha * b.l_dc + b.l_prior + lambda * b.l_tv;
    return b;
  }

  // Full reverse-mode gradient of loss().total w.r.t. theta and phi.
  std::pair<std::vector<double>, CsmParams> gradient(
      const InrParams& theta, const CsmParams& phi,
      LossBreakdown* breakdown = nullptr) const {
    const std::size_t HW = H * W;
    const std::vector<double> intens = render_intensities(theta, cfg, H, W);
    CoilMaps raw;
    const CoilMaps maps = normalized_maps(phi, &raw);

    ComplexGrid2D img(H, W);
    for (std::size_t p = 0; p < HW; ++p) img.v[p] = cplx{intens[p], 0.0};

    double l_dc = 0.0, l_prior = 0.0;
    std::vector<double> g_img(HW, 0.0);        // dL/dI (real image)
    CoilMaps g_maps(maps.coils, H, W);          // dL/dS (normalized maps)

    ComplexGrid2D weighted(H, W), kspace_cot(H, W);
    for (std::size_t j = 0; j < maps.coils; ++j) {
      const cplx* s = maps.coil(j);
      for (std::size_t p = 0; p < HW; ++p) weighted.v[p] = s[p] * img.v[p];
      ComplexGrid2D k_img = fft2c(weighted);

      ComplexGrid2D k_prior;
      if (use_prior) {
        for (std::size_t p = 0; p < HW; ++p)
          weighted.v[p] = s[p] * prior.v[p];
        k_prior = fft2c(weighted);
      }

      const cplx* yj = y.coil(j);
      for (std::size_t i = 0; i < H; ++i)
        for (std::size_t c = 0; c < W; ++c) {
          const std::size_t p = i * W + c;
          const cplx ki = k_img.v[p];
          cplx cot{0.0, 0.0};
          if (use_prior) {
            const cplx d = k_prior.v[p] - ki;
            l_prior += std::norm(d);
            cot = -2.0 * d;  // prior branch, weight 1
          }
          if (mask.sampled[c]) {
            const cplx e = ki - yj[p];
            l_dc += std::norm(e);
            cot += alpha * 2.0 * e;
          } else {
            l_dc += std::norm(yj[p]);
          }
          kspace_cot.v[p] = cot;
        }

      ComplexGrid2D c_img = ifft2c(kspace_cot);  // cotangent of S_j * I

      cplx* gs = g_maps.coil(j);
      if (use_prior) {
        // prior-branch cotangent of S_j * x_p
        for (std::size_t p = 0; p < HW; ++p)
          kspace_cot.v[p] = 2.0 * (k_prior.v[p] - k_img.v[p]);
        ComplexGrid2D c_prior = ifft2c(kspace_cot);
        for (std::size_t p = 0; p < HW; ++p) {
          const cplx gc = c_img.v[p];
          g_img[p] += gc.real() * s[p].real() + gc.imag() * s[p].imag();
          gs[p] = gc * intens[p] + c_prior.v[p] * std::conj(prior.v[p]);
        }
      } else {
        for (std::size_t p = 0; p < HW; ++p) {
          const cplx gc = c_img.v[p];
          g_img[p] += gc.real() * s[p].real() + gc.imag() * s[p].imag();
          gs[p] = gc * intens[p];
        }
      }
    }

    // TV branch
    const std::vector<double> g_tv = loss_tv_backward(intens, H, W);
    for (std::size_t p = 0; p < HW; ++p) g_img[p] += lambda * g_tv[p];

    if (breakdown) {
      breakdown->l_dc = l_dc;
      breakdown->l_prior = l_prior;
      breakdown->l_tv = loss_tv(intens, H, W);
      breakdown->total =
          alpha * breakdown->l_dc + breakdown->l_prior + lambda * breakdown->l_tv;
    }

    const CoilMaps g_raw = normalize_rss_backward(raw, g_maps);
    CsmParams g_phi = csm_gradient_with_basis(phi, basis, g_raw);
    std::vector<double> g_theta = inr_gradient(theta, cfg, H, W, g_img);
    return {std::move(g_theta), std::move(g_phi)};
  }

private:
  double dc_term(const std::vector<double>& intens, const CoilMaps& maps) const {
    const std::size_t HW = H * W;
    double l = 0.0;
    ComplexGrid2D weighted(H, W);
    for (std::size_t j = 0; j < maps.coils; ++j) {
      const cplx* s = maps.coil(j);
      for (std::size_t p = 0; p < HW; ++p)
        weighted.v[p] = s[p] * intens[p];
      ComplexGrid2D k = fft2c(weighted);
      const cplx* yj = y.coil(j);
      for (std::size_t i = 0; i < H; ++i)
        for (std::size_t c = 0; c < W; ++c) {
          const std::size_t p = i * W + c;
          l += mask.sampled[c] ? std::norm(yj[p] - k.v[p]) : std::norm(yj[p]);
        }
    }
    return l;
  }

  double prior_term(const std::vector<double>& intens,
                    const CoilMaps& maps) const {
    const std::size_t HW = H * W;
    double l = 0.0;
    ComplexGrid2D a(H, W), b(H, W);
    for (std::size_t j = 0; j < maps.coils; ++j) {
      const cplx* s = maps.coil(j);
      for (std::size_t p = 0; p < HW; ++p) {
        a.v[p] = s[p] * prior.v[p];
        b.v[p] = s[p] * intens[p];
      }
      ComplexGrid2D ka = fft2c(a);
      ComplexGrid2D kb = fft2c(b);
      for (std::size_t p = 0; p < HW; ++p) l += std::norm(ka.v[p] - kb.v[p]);
    }
    return l;
  }
};

// Convenience entry points matching the operation contracts.

inline double loss_dc(const InrParams& theta, const HashGridConfig& cfg,
                      const CsmParams& phi, const MultiCoilKSpace& y,
                      const SamplingMask& mask) {
  ComplexGrid2D zero_prior(y.H, y.W);
  Objective obj(y, mask, zero_prior, cfg, phi.degree, 1.0, 0.0);
  return obj.loss(theta, phi).l_dc;
}

inline double loss_prior(const InrParams& theta, const HashGridConfig& cfg,
                         const CsmParams& phi, const ComplexGrid2D& prior) {
  MultiCoilKSpace dummy(phi.coils, prior.H, prior.W);
  SamplingMask mask = make_equispaced_mask(prior.W, 1, 1.0);
  Objective obj(dummy, mask, prior, cfg, phi.degree, 0.0, 0.0);
  return obj.loss(theta, phi).l_prior;
}

inline LossBreakdown total_loss(const InrParams& theta,
                                const HashGridConfig& cfg,
                                const CsmParams& phi, const MultiCoilKSpace& y,
                                const SamplingMask& mask,
                                const ComplexGrid2D& prior, double alpha,
                                double lambda) {
  Objective obj(y, mask, prior, cfg, phi.degree, alpha, lambda);
  return obj.loss(theta, phi);
}

inline std::pair<std::vector<double>, CsmParams> total_gradient(
    const InrParams& theta, const HashGridConfig& cfg, const CsmParams& phi,
    const MultiCoilKSpace& y, const SamplingMask& mask,
    const ComplexGrid2D& prior, double alpha, double lambda) {
  Objective obj(y, mask, prior, cfg, phi.degree, alpha, lambda);
  return obj.gradient(theta, phi);
}

}  // namespace priiner
