#pragma once

// Desk-scale data generation: analytic ellipse phantom (Shepp-Logan table by
// default), smooth synthetic coil profiles, and retrospective undersampled
// acquisition with optional complex Gaussian noise.

#include <vector>

#include "priiner/csm.hpp"
#include "priiner/kspace.hpp"

namespace priiner {

struct Ellipse {
  double cu, cv;      // center in [0,1]^2 (u = rows, v = cols)
  double a, b;        // semi-axes in the same normalized units
  double angle_deg;   // rotation about the center
  double intensity;   // additive
};

struct PhantomSpec {
  std::size_t size = 128;  // H == W, even
  std::vector<Ellipse> ellipses;
};

// Standard Shepp-Logan ellipse table mapped from [-1,1]^2 to [0,1]^2.
inline std::vector<Ellipse> shepp_logan_ellipses() {
  struct Raw { double v, a, b, x0, y0, phi; };
  static const Raw raw[] = {
      {1.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
      {-0.98, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
      {-0.02, 0.1100, 0.3100, 0.22, 0.0000, -18.0},
      {-0.02, 0.1600, 0.4100, -0.22, 0.0000, 18.0},
      {0.01, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
      {0.01, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
      {0.01, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
      {0.01, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
      {0.01, 0.0230, 0.0230, 0.00, -0.6060, 0.0},
      {0.01, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
  };
  std::vector<Ellipse> out;
  for (const Raw& r : raw) {
    Ellipse e;
    // classic table: x runs along columns, y along rows (y up)
    e.cv = (r.x0 + 1.0) / 2.0;
    e.cu = (1.0 - r.y0) / 2.0;
    e.a = r.a / 2.0;   // column semi-axis
    e.b = r.b / 2.0;   // row semi-axis
    e.angle_deg = r.phi;
    e.intensity = r.v;
    out.push_back(e);
  }
  return out;
}

inline PhantomSpec default_phantom(std::size_t size = 128) {
  PhantomSpec s;
  s.size = size;
  s.ellipses = shepp_logan_ellipses();
  return s;
}

inline bool ellipse_contains(const Ellipse& e, double u, double v) {
  const double t = e.angle_deg * 3.14159265358979323846 / 180.0;
  const double dv = v - e.cv;
  const double du = u - e.cu;
  // rotate into the ellipse frame (column axis first)
  const double x = std::cos(t) * dv + std::sin(t) * du;
  const double y = -std::sin(t) * dv + std::cos(t) * du;
  return (x * x) / (e.a * e.a) + (y * y) / (e.b * e.b) <= 1.0;
}

// Pixel value = sum of intensities of all ellipses containing the pixel
// center; real-valued, embedded as complex.
inline ComplexGrid2D make_phantom(const PhantomSpec& spec) {
  if (spec.size < 2 || spec.size % 2 != 0)
    throw ValidationError("phantom: size must be a positive even integer");
  const std::size_t n = spec.size;
  ComplexGrid2D img(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (double(i) + 0.5) / double(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double v = (double(k) + 0.5) / double(n);
      double val = 0.0;
      for (const Ellipse& e : spec.ellipses)
        if (ellipse_contains(e, u, v)) val += e.intensity;
      img.at(i, k) = cplx{val, 0.0};
    }
  }
  return img;
}

// Coil j: Gaussian magnitude bump centered at angle 2*pi*j/c on the image
// border with a gentle coil-specific linear phase, RSS-normalized.
inline CoilMaps make_synthetic_csm(std::size_t c, std::size_t H,
                                   std::size_t W) {
  if (c < 1) throw ValidationError("synthetic csm: need at least one coil");
  CoilMaps maps(c, H, W);
  const double pi = 3.14159265358979323846;
  const double width = 0.7;
  for (std::size_t j = 0; j < c; ++j) {
    const double ang = 2.0 * pi * double(j) / double(c);
    const double cu = 0.5 + 0.5 * std::sin(ang);
    const double cv = 0.5 + 0.5 * std::cos(ang);
    cplx* s = maps.coil(j);
    for (std::size_t i = 0; i < H; ++i) {
      const double u = (double(i) + 0.5) / double(H);
      for (std::size_t k = 0; k < W; ++k) {
        const double v = (double(k) + 0.5) / double(W);
        const double d2 = (u - cu) * (u - cu) + (v - cv) * (v - cv);
        const double mag = std::exp(-d2 / (2.0 * width * width));
        const double phase =
            0.5 * pi * ((u - 0.5) * std::cos(ang) + (v - 0.5) * std::sin(ang));
        s[i * W + k] = std::polar(mag, phase);
      }
    }
  }
  return normalize_rss(maps);
}

struct AcquisitionSpec {
  std::size_t coils = 4;
  int acceleration = 4;
  double center_fraction = 0.08;
  double noise_sigma = 0.0;  // std per real/imag component of each entry
  std::uint64_t seed = 0;
};

// y = M . F(S . x) + M . eps; noise lands only on sampled columns.
inline std::pair<MultiCoilKSpace, SamplingMask> acquire(
    const ComplexGrid2D& img, const CoilMaps& csm, const AcquisitionSpec& acq) {
  if (acq.noise_sigma < 0.0)
    throw ValidationError("acquire: noise_sigma must be nonnegative");
  SamplingMask mask =
      make_equispaced_mask(img.W, acq.acceleration, acq.center_fraction);
  MultiCoilKSpace y = forward_model(img, csm, mask);
  if (acq.noise_sigma > 0.0) {
    Rng rng(acq.seed);
    for (std::size_t j = 0; j < y.coils; ++j) {
      cplx* yj = y.coil(j);
      for (std::size_t i = 0; i < y.H; ++i)
        for (std::size_t c = 0; c < y.W; ++c)
          if (mask.sampled[c])
            yj[i * y.W + c] += cplx{acq.noise_sigma * rng.normal(),
                                    acq.noise_sigma * rng.normal()};
    }
  }
  return {std::move(y), std::move(mask)};
}

}  // namespace priiner
