#pragma once

// Core tensor types: complex 2D rasters, multi-coil stacks, sampling masks.

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "priiner/common.hpp"

namespace priiner {

struct ComplexGrid2D {
  std::size_t H = 0;
  std::size_t W = 0;
  std::vector<cplx> v;  // row-major

  ComplexGrid2D() = default;
  ComplexGrid2D(std::size_t h, std::size_t w) : H(h), W(w), v(h * w) {}

  cplx& at(std::size_t i, std::size_t k) { return v[i * W + k]; }
  const cplx& at(std::size_t i, std::size_t k) const { return v[i * W + k]; }

  bool finite() const {
    for (const auto& z : v)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }
};

struct MultiCoilKSpace {
  std::size_t coils = 0;
  std::size_t H = 0;
  std::size_t W = 0;
  std::vector<cplx> v;  // coil-major, each coil row-major H*W

  MultiCoilKSpace() = default;
  MultiCoilKSpace(std::size_t c, std::size_t h, std::size_t w)
      : coils(c), H(h), W(w), v(c * h * w) {}

  cplx* coil(std::size_t j) { return v.data() + j * H * W; }
  const cplx* coil(std::size_t j) const { return v.data() + j * H * W; }
};

// Per-coil sensitivity maps, same storage convention as MultiCoilKSpace.
struct CoilMaps {
  std::size_t coils = 0;
  std::size_t H = 0;
  std::size_t W = 0;
  std::vector<cplx> v;

  CoilMaps() = default;
  CoilMaps(std::size_t c, std::size_t h, std::size_t w)
      : coils(c), H(h), W(w), v(c * h * w) {}

  cplx* coil(std::size_t j) { return v.data() + j * H * W; }
  const cplx* coil(std::size_t j) const { return v.data() + j * H * W; }
};

// Column mask broadcast over rows.
struct SamplingMask {
  std::size_t W = 0;
  int acceleration = 1;
  double center_fraction = 0.0;
  std::vector<std::uint8_t> sampled;  // length W

  std::size_t sampled_count() const {
    std::size_t n = 0;
    for (auto s : sampled) n += s;
    return n;
  }
};

inline void require_same_shape(const ComplexGrid2D& a, const ComplexGrid2D& b,
                               const std::string& what) {
  if (a.H != b.H || a.W != b.W)
    throw ValidationError(what + ": shape mismatch");
}

}  // namespace priiner
