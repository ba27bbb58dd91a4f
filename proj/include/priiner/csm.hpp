#pragma once

// Coil sensitivity maps as complex bivariate polynomials over [0,1]^2,
// evaluated at pixel centers ((i+0.5)/H, (k+0.5)/W). Monomials u^p v^q with
// p+q <= D are ordered by total degree, then by ascending p.

#include <cmath>
#include <vector>

#include "priiner/grid.hpp"

namespace priiner {

struct CsmParams {
  std::size_t coils = 0;
  int degree = 0;
  std::vector<cplx> coeffs;  // coils x n_coeffs, coil-major

  static std::size_t n_coeffs(int degree) {
    return std::size_t(degree + 1) * std::size_t(degree + 2) / 2;
  }
  std::size_t per_coil() const { return n_coeffs(degree); }

  static CsmParams zeros(std::size_t coils, int degree) {
    CsmParams p;
    p.coils = coils;
    p.degree = degree;
    p.coeffs.assign(coils * n_coeffs(degree), cplx{0.0, 0.0});
    return p;
  }

  // Uniform maps that are already RSS-normalized: constant term 1/sqrt(c).
  static CsmParams uniform_init(std::size_t coils, int degree) {
    CsmParams p = zeros(coils, degree);
    const double a = 1.0 / std::sqrt(double(coils));
    for (std::size_t j = 0; j < coils; ++j)
      p.coeffs[j * p.per_coil()] = cplx{a, 0.0};
    return p;
  }
};

// Real-valued monomial basis, pixel-major inner stride: B[m * H*W + px].
inline std::vector<double> csm_basis(int degree, std::size_t H, std::size_t W) {
  const std::size_t n = CsmParams::n_coeffs(degree);
  std::vector<double> B(n * H * W);
  std::size_t m = 0;
  for (int t = 0; t <= degree; ++t) {
    for (int p = 0; p <= t; ++p) {
      const int q = t - p;
      double* row = B.data() + m * H * W;
      for (std::size_t i = 0; i < H; ++i) {
        const double u = (double(i) + 0.5) / double(H);
        const double up = std::pow(u, p);
        for (std::size_t k = 0; k < W; ++k) {
          const double v = (double(k) + 0.5) / double(W);
          row[i * W + k] = up * std::pow(v, q);
        }
      }
      ++m;
    }
  }
  return B;
}

inline CoilMaps eval_csm_with_basis(const CsmParams& params,
                                    const std::vector<double>& basis,
                                    std::size_t H, std::size_t W) {
  const std::size_t n = params.per_coil();
  CoilMaps maps(params.coils, H, W);
  for (std::size_t j = 0; j < params.coils; ++j) {
    cplx* s = maps.coil(j);
    for (std::size_t m = 0; m < n; ++m) {
      const cplx c = params.coeffs[j * n + m];
      const double* row = basis.data() + m * H * W;
      for (std::size_t px = 0; px < H * W; ++px) s[px] += c * row[px];
    }
  }
  return maps;
}

inline CoilMaps eval_csm(const CsmParams& params, std::size_t H, std::size_t W) {
  if (H < 1 || W < 1) throw ValidationError("eval_csm: empty grid");
  const std::vector<double> B = csm_basis(params.degree, H, W);
  return eval_csm_with_basis(params, B, H, W);
}

inline CsmParams csm_gradient_with_basis(const CsmParams& params,
                                         const std::vector<double>& basis,
                                         const CoilMaps& upstream) {
  const std::size_t n = params.per_coil();
  const std::size_t HW = upstream.H * upstream.W;
  CsmParams g = CsmParams::zeros(params.coils, params.degree);
  for (std::size_t j = 0; j < params.coils; ++j) {
    const cplx* up = upstream.coil(j);
    for (std::size_t m = 0; m < n; ++m) {
      const double* row = basis.data() + m * HW;
      cplx acc{0.0, 0.0};
      for (std::size_t px = 0; px < HW; ++px) acc += up[px] * row[px];
      g.coeffs[j * n + m] = acc;
    }
  }
  return g;
}

// dL/dphi given dL/dS; exact by linearity of polynomial evaluation.
inline CsmParams csm_gradient(const CsmParams& params,
                              const CoilMaps& upstream) {
  if (upstream.coils != params.coils)
    throw ValidationError("csm_gradient: coil count mismatch");
  const std::vector<double> B = csm_basis(params.degree, upstream.H, upstream.W);
  return csm_gradient_with_basis(params, B, upstream);
}

// Pointwise division by the root-sum-of-squares across coils, so that
// sum_j |S_j|^2 == 1 at every pixel.
inline CoilMaps normalize_rss(const CoilMaps& maps) {
  const std::size_t HW = maps.H * maps.W;
  CoilMaps out(maps.coils, maps.H, maps.W);
  for (std::size_t px = 0; px < HW; ++px) {
    double rss2 = 0.0;
    for (std::size_t j = 0; j < maps.coils; ++j)
      rss2 += std::norm(maps.v[j * HW + px]);
    if (!(rss2 > 0.0))
      throw NumericalError("normalize_rss: degenerate maps (zero RSS pixel)");
    const double inv = 1.0 / std::sqrt(rss2);
    for (std::size_t j = 0; j < maps.coils; ++j)
      out.v[j * HW + px] = maps.v[j * HW + px] * inv;
  }
  return out;
}

// Reverse-mode through normalize_rss. Cotangent convention: g.real/g.imag
// are the partials w.r.t. the real/imag parts.
inline CoilMaps normalize_rss_backward(const CoilMaps& raw,
                                       const CoilMaps& upstream) {
  const std::size_t HW = raw.H * raw.W;
  CoilMaps out(raw.coils, raw.H, raw.W);
  for (std::size_t px = 0; px < HW; ++px) {
    double rss2 = 0.0;
    for (std::size_t j = 0; j < raw.coils; ++j)
      rss2 += std::norm(raw.v[j * HW + px]);
    const double r = std::sqrt(rss2);
    // a = Re(sum_j conj(g_j) R_j)
    double a = 0.0;
    for (std::size_t j = 0; j < raw.coils; ++j) {
      const cplx g = upstream.v[j * HW + px];
      const cplx R = raw.v[j * HW + px];
      a += g.real() * R.real() + g.imag() * R.imag();
    }
    const double inv_r = 1.0 / r;
    const double scale = a / (r * r * r);
    for (std::size_t j = 0; j < raw.coils; ++j)
      out.v[j * HW + px] =
          upstream.v[j * HW + px] * inv_r - raw.v[j * HW + px] * scale;
  }
  return out;
}

}  // namespace priiner
