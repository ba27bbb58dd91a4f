#pragma once

// Image representation I(theta): multiresolution hash-grid encoding of 2D
// coordinates feeding a 3-layer ReLU MLP (in -> 64 -> 64 -> 1) with a linear
// scalar output. Parameters live in one flat vector so the optimizer and
// finite-difference checks can treat them uniformly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "priiner/common.hpp"
#include "priiner/grid.hpp"
#include "priiner/threads.hpp"

namespace priiner {

struct HashGridConfig {
  int levels = 16;
  int features_per_level = 2;
  std::size_t table_size = std::size_t(1) << 14;  // power of two
  int base_resolution = 16;
  int max_resolution = 128;

  void validate() const {
    if (levels < 1) throw ValidationError("hash config: levels must be >= 1");
    if (features_per_level < 1)
      throw ValidationError("hash config: features_per_level must be >= 1");
    if (table_size == 0 || (table_size & (table_size - 1)) != 0)
      throw ValidationError("hash config: table_size must be a power of two");
    if (base_resolution < 1 || max_resolution < base_resolution)
      throw ValidationError("hash config: need max_resolution >= base_resolution >= 1");
  }

  double growth() const {
    if (levels <= 1) return 1.0;
    return std::exp((std::log(double(max_resolution)) -
                     std::log(double(base_resolution))) /
                    double(levels - 1));
  }

  int level_resolution(int level) const {
    // The relative nudge keeps floor() faithful to the exact value when
    // b^level lands on an integer up to rounding dust (e.g. growth 2).
    const double x = double(base_resolution) * std::pow(growth(), double(level));
    return int(std::floor(x * (1.0 + 1e-12)));
  }
};

inline constexpr std::size_t kMlpHidden = 64;

// Offsets into the flat parameter vector.
struct InrLayout {
  std::size_t in_dim;
  std::size_t tables, w1, b1, w2, b2, w3, b3, total;

  explicit InrLayout(const HashGridConfig& cfg) {
    in_dim = std::size_t(cfg.levels) * std::size_t(cfg.features_per_level);
    const std::size_t table_len =
        std::size_t(cfg.levels) * cfg.table_size * cfg.features_per_level;
    tables = 0;
    w1 = tables + table_len;
    b1 = w1 + kMlpHidden * in_dim;
    w2 = b1 + kMlpHidden;
    b2 = w2 + kMlpHidden * kMlpHidden;
    w3 = b2 + kMlpHidden;
    b3 = w3 + kMlpHidden;
    total = b3 + 1;
  }
};

struct InrParams {
  std::vector<double> flat;
};

// Hash features uniform in [-1e-4, 1e-4]; MLP weights uniform +-1/sqrt(fan_in),
// biases zero.
inline InrParams init_inr_params(const HashGridConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const InrLayout L(cfg);
  InrParams p;
  p.flat.assign(L.total, 0.0);
  Rng rng(seed);
  for (std::size_t i = L.tables; i < L.w1; ++i)
    p.flat[i] = rng.uniform(-1e-4, 1e-4);
  const double s1 = 1.0 / std::sqrt(double(L.in_dim));
  for (std::size_t i = L.w1; i < L.b1; ++i) p.flat[i] = rng.uniform(-s1, s1);
  const double s2 = 1.0 / std::sqrt(double(kMlpHidden));
  for (std::size_t i = L.w2; i < L.b2; ++i) p.flat[i] = rng.uniform(-s2, s2);
  for (std::size_t i = L.w3; i < L.b3; ++i) p.flat[i] = rng.uniform(-s2, s2);
  return p;
}

namespace inr_detail {

inline std::uint32_t corner_hash(std::uint32_t x, std::uint32_t y,
                                 std::size_t table_size) {
  return (x ^ (y * 2654435761u)) & std::uint32_t(table_size - 1);
}

struct CellQuery {
  std::uint32_t i0, k0;
  double fu, fv;  // fractional offsets inside the cell
};

inline CellQuery locate(double u, double v, int resolution) {
  u = u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u);
  v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  const double pu = u * double(resolution);
  const double pv = v * double(resolution);
  CellQuery q;
  q.i0 = std::uint32_t(pu < double(resolution - 1) ? std::floor(pu)
                                                   : double(resolution - 1));
  q.k0 = std::uint32_t(pv < double(resolution - 1) ? std::floor(pv)
                                                   : double(resolution - 1));
  q.fu = pu - double(q.i0);
  q.fv = pv - double(q.k0);
  return q;
}

inline std::vector<int> level_resolutions(const HashGridConfig& cfg) {
  std::vector<int> res(std::size_t(cfg.levels));
  for (int l = 0; l < cfg.levels; ++l) res[std::size_t(l)] = cfg.level_resolution(l);
  return res;
}

}  // namespace inr_detail

// Encode a single (u,v) in [0,1]^2 (clamped); out has length levels*F.
// Per level: bilinear interpolation of the 4 hashed corner feature rows.
inline void hash_encode_point_res(const HashGridConfig& cfg, const int* res,
                                  const double* tables, double u, double v,
                                  double* out) {
  const int F = cfg.features_per_level;
  for (int l = 0; l < cfg.levels; ++l) {
    const int N = res[l];
    const auto q = inr_detail::locate(u, v, N);
    const double w00 = (1.0 - q.fu) * (1.0 - q.fv);
    const double w01 = (1.0 - q.fu) * q.fv;
    const double w10 = q.fu * (1.0 - q.fv);
    const double w11 = q.fu * q.fv;
    const double* level = tables + std::size_t(l) * cfg.table_size * F;
    const double* r00 =
        level + std::size_t(inr_detail::corner_hash(q.i0, q.k0, cfg.table_size)) * F;
    const double* r01 =
        level + std::size_t(inr_detail::corner_hash(q.i0, q.k0 + 1, cfg.table_size)) * F;
    const double* r10 =
        level + std::size_t(inr_detail::corner_hash(q.i0 + 1, q.k0, cfg.table_size)) * F;
    const double* r11 =
        level + std::size_t(inr_detail::corner_hash(q.i0 + 1, q.k0 + 1, cfg.table_size)) * F;
    double* dst = out + std::size_t(l) * F;
    for (int f = 0; f < F; ++f)
      dst[f] = w00 * r00[f] + w01 * r01[f] + w10 * r10[f] + w11 * r11[f];
  }
}

inline void hash_encode_point(const HashGridConfig& cfg, const double* tables,
                              double u, double v, double* out) {
  const std::vector<int> res = inr_detail::level_resolutions(cfg);
  hash_encode_point_res(cfg, res.data(), tables, u, v, out);
}

// Features for every pixel center of an H x W grid, pixel-major.
inline std::vector<double> hash_encode_grid(const HashGridConfig& cfg,
                                            const double* tables,
                                            std::size_t H, std::size_t W) {
  const InrLayout L(cfg);
  const std::vector<int> res = inr_detail::level_resolutions(cfg);
  std::vector<double> feats(H * W * L.in_dim);
  parallel_chunks(H, thread_count(), [&](unsigned, std::size_t r0, std::size_t r1) {
    for (std::size_t i = r0; i < r1; ++i) {
      const double u = (double(i) + 0.5) / double(H);
      for (std::size_t k = 0; k < W; ++k) {
        const double v = (double(k) + 0.5) / double(W);
        hash_encode_point_res(cfg, res.data(), tables, u, v,
                              feats.data() + (i * W + k) * L.in_dim);
      }
    }
  });
  return feats;
}

// MLP over n feature vectors; ReLU subgradient at 0 is 0 throughout.
inline std::vector<double> mlp_forward(const HashGridConfig& cfg,
                                       const std::vector<double>& flat,
                                       const std::vector<double>& features) {
  const InrLayout L(cfg);
  if (features.size() % L.in_dim != 0)
    throw ValidationError("mlp_forward: feature length not a multiple of input dim");
  const std::size_t n = features.size() / L.in_dim;
  std::vector<double> out(n);
  const double* w1 = flat.data() + L.w1;
  const double* b1 = flat.data() + L.b1;
  const double* w2 = flat.data() + L.w2;
  const double* b2 = flat.data() + L.b2;
  const double* w3 = flat.data() + L.w3;
  const double b3 = flat[L.b3];
  parallel_chunks(n, thread_count(), [&](unsigned, std::size_t p0, std::size_t p1) {
    std::vector<double> h1(kMlpHidden), h2(kMlpHidden);
    for (std::size_t p = p0; p < p1; ++p) {
      const double* f = features.data() + p * L.in_dim;
      for (std::size_t o = 0; o < kMlpHidden; ++o) {
        double acc = b1[o];
        const double* row = w1 + o * L.in_dim;
        for (std::size_t i = 0; i < L.in_dim; ++i) acc += row[i] * f[i];
        h1[o] = acc > 0.0 ? acc : 0.0;
      }
      for (std::size_t o = 0; o < kMlpHidden; ++o) {
        double acc = b2[o];
        const double* row = w2 + o * kMlpHidden;
        for (std::size_t i = 0; i < kMlpHidden; ++i) acc += row[i] * h1[i];
        h2[o] = acc > 0.0 ? acc : 0.0;
      }
      double acc = b3;
      for (std::size_t i = 0; i < kMlpHidden; ++i) acc += w3[i] * h2[i];
      out[p] = acc;
    }
  });
  return out;
}

inline std::vector<double> render_intensities(const InrParams& params,
                                              const HashGridConfig& cfg,
                                              std::size_t H, std::size_t W) {
  const InrLayout L(cfg);
  if (params.flat.size() != L.total)
    throw ValidationError("render: parameter vector size mismatch");
  const std::vector<double> feats =
      hash_encode_grid(cfg, params.flat.data() + L.tables, H, W);
  return mlp_forward(cfg, params.flat, feats);
}

// Real intensities embedded as complex with zero imaginary part.
inline ComplexGrid2D render_image(const InrParams& params,
                                  const HashGridConfig& cfg, std::size_t H,
                                  std::size_t W) {
  const std::vector<double> out = render_intensities(params, cfg, H, W);
  ComplexGrid2D img(H, W);
  for (std::size_t p = 0; p < H * W; ++p) img.v[p] = cplx{out[p], 0.0};
  return img;
}

// Exact reverse mode through the MLP and the bilinear hash interpolation.
// upstream is dL/d(intensity) per pixel; returns a flat cotangent.
inline std::vector<double> inr_gradient(const InrParams& params,
                                        const HashGridConfig& cfg,
                                        std::size_t H, std::size_t W,
                                        const std::vector<double>& upstream) {
  const InrLayout L(cfg);
  if (params.flat.size() != L.total)
    throw ValidationError("inr_gradient: parameter vector size mismatch");
  if (upstream.size() != H * W)
    throw ValidationError("inr_gradient: upstream shape mismatch");

  std::vector<double> grad(L.total, 0.0);
  const double* tables = params.flat.data() + L.tables;
  const double* w1 = params.flat.data() + L.w1;
  const double* b1 = params.flat.data() + L.b1;
  const double* w2 = params.flat.data() + L.w2;
  const double* b2 = params.flat.data() + L.b2;
  const double* w3 = params.flat.data() + L.w3;
  const double b3 = params.flat[L.b3];
  const std::vector<int> res = inr_detail::level_resolutions(cfg);
  const int F = cfg.features_per_level;

  const auto accumulate_rows = [&](std::size_t row0, std::size_t row1,
                                   double* gflat) {
  double* g_tab = gflat + L.tables;
  double* g_w1 = gflat + L.w1;
  double* g_b1 = gflat + L.b1;
  double* g_w2 = gflat + L.w2;
  double* g_b2 = gflat + L.b2;
  double* g_w3 = gflat + L.w3;
  double& g_b3 = gflat[L.b3];

  std::vector<double> f(L.in_dim), h1(kMlpHidden), h2(kMlpHidden);
  std::vector<double> d1(kMlpHidden), d2(kMlpHidden), df(L.in_dim);

  for (std::size_t i = row0; i < row1; ++i) {
    const double u = (double(i) + 0.5) / double(H);
    for (std::size_t k = 0; k < W; ++k) {
      const double v = (double(k) + 0.5) / double(W);
      const double up = upstream[i * W + k];
      hash_encode_point_res(cfg, res.data(), tables, u, v, f.data());

      // forward pass, keeping activations
      for (std::size_t o = 0; o < kMlpHidden; ++o) {
        double acc = b1[o];
        const double* row = w1 + o * L.in_dim;
        for (std::size_t m = 0; m < L.in_dim; ++m) acc += row[m] * f[m];
        h1[o] = acc > 0.0 ? acc : 0.0;
      }
      for (std::size_t o = 0; o < kMlpHidden; ++o) {
        double acc = b2[o];
        const double* row = w2 + o * kMlpHidden;
        for (std::size_t m = 0; m < kMlpHidden; ++m) acc += row[m] * h1[m];
        h2[o] = acc > 0.0 ? acc : 0.0;
      }
      (void)b3;

      // backward
      g_b3 += up;
      for (std::size_t m = 0; m < kMlpHidden; ++m) {
        g_w3[m] += up * h2[m];
        d2[m] = h2[m] > 0.0 ? up * w3[m] : 0.0;
      }
      for (std::size_t o = 0; o < kMlpHidden; ++o) {
        const double d = d2[o];
        if (d != 0.0) {
          double* row = g_w2 + o * kMlpHidden;
          for (std::size_t m = 0; m < kMlpHidden; ++m) row[m] += d * h1[m];
          g_b2[o] += d;
        }
      }
      for (std::size_t m = 0; m < kMlpHidden; ++m) d1[m] = 0.0;
      for (std::size_t o = 0; o < kMlpHidden; ++o) {
        const double d = d2[o];
        if (d != 0.0) {
          const double* row = w2 + o * kMlpHidden;
          for (std::size_t m = 0; m < kMlpHidden; ++m) d1[m] += d * row[m];
        }
      }
      for (std::size_t m = 0; m < kMlpHidden; ++m)
        if (h1[m] <= 0.0) d1[m] = 0.0;
      for (std::size_t o = 0; o < kMlpHidden; ++o) {
        const double d = d1[o];
        if (d != 0.0) {
          double* row = g_w1 + o * L.in_dim;
          for (std::size_t m = 0; m < L.in_dim; ++m) row[m] += d * f[m];
          g_b1[o] += d;
        }
      }
      for (std::size_t m = 0; m < L.in_dim; ++m) df[m] = 0.0;
      for (std::size_t o = 0; o < kMlpHidden; ++o) {
        const double d = d1[o];
        if (d != 0.0) {
          const double* row = w1 + o * L.in_dim;
          for (std::size_t m = 0; m < L.in_dim; ++m) df[m] += d * row[m];
        }
      }

      // scatter feature cotangents into the hash tables
      for (int l = 0; l < cfg.levels; ++l) {
        const int N = res[std::size_t(l)];
        const auto q = inr_detail::locate(u, v, N);
        const double w00 = (1.0 - q.fu) * (1.0 - q.fv);
        const double w01 = (1.0 - q.fu) * q.fv;
        const double w10 = q.fu * (1.0 - q.fv);
        const double w11 = q.fu * q.fv;
        double* level = g_tab + std::size_t(l) * cfg.table_size * F;
        double* r00 = level +
            std::size_t(inr_detail::corner_hash(q.i0, q.k0, cfg.table_size)) * F;
        double* r01 = level +
            std::size_t(inr_detail::corner_hash(q.i0, q.k0 + 1, cfg.table_size)) * F;
        double* r10 = level +
            std::size_t(inr_detail::corner_hash(q.i0 + 1, q.k0, cfg.table_size)) * F;
        double* r11 = level +
            std::size_t(inr_detail::corner_hash(q.i0 + 1, q.k0 + 1, cfg.table_size)) * F;
        const double* src = df.data() + std::size_t(l) * F;
        for (int ff = 0; ff < F; ++ff) {
          r00[ff] += w00 * src[ff];
          r01[ff] += w01 * src[ff];
          r10[ff] += w10 * src[ff];
          r11[ff] += w11 * src[ff];
        }
      }
    }
  }
  };

  const unsigned chunks = std::min<unsigned>(thread_count(), unsigned(H));
  if (chunks <= 1) {
    accumulate_rows(0, H, grad.data());
  } else {
    // Per-chunk buffers summed in fixed chunk order keep the result
    // reproducible for a given thread count.
    std::vector<std::vector<double>> partial(chunks,
                                             std::vector<double>(L.total, 0.0));
    parallel_chunks(H, chunks, [&](unsigned t, std::size_t r0, std::size_t r1) {
      accumulate_rows(r0, r1, partial[t].data());
    });
    for (unsigned t = 0; t < chunks; ++t)
      for (std::size_t m = 0; m < L.total; ++m) grad[m] += partial[t][m];
  }
  return grad;
}

}  // namespace priiner
