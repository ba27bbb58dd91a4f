#pragma once

// File-format glue for the pipeline artifacts: complex grids and coil
// stacks as NPY, masks as uint8 NPY, loss traces as CSV, binary P5 PGM
// image emission.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

#include "priiner/grid.hpp"
#include "priiner/npy.hpp"
#include "priiner/objective.hpp"

namespace priiner {

inline void save_grid(const ComplexGrid2D& g, const std::string& path,
                      npy::Dtype d = npy::Dtype::c8) {
  npy::write(npy::from_complex(g.v, {g.H, g.W}, d), path);
}

inline ComplexGrid2D load_grid(const std::string& path) {
  const npy::ArrayFile a = npy::read(path);
  if (a.shape.size() != 2)
    throw ValidationError("load_grid: expected a 2D array in " + path);
  ComplexGrid2D g(a.shape[0], a.shape[1]);
  g.v = npy::to_complex(a);
  return g;
}

inline void save_coil_stack(std::size_t coils, std::size_t H, std::size_t W,
                            const std::vector<cplx>& v,
                            const std::string& path) {
  npy::write(npy::from_complex(v, {coils, H, W}), path);
}

inline MultiCoilKSpace load_kspace(const std::string& path) {
  const npy::ArrayFile a = npy::read(path);
  if (a.shape.size() != 3)
    throw ValidationError("load_kspace: expected a coils x H x W array in " +
                          path);
  MultiCoilKSpace y(a.shape[0], a.shape[1], a.shape[2]);
  y.v = npy::to_complex(a);
  return y;
}

inline CoilMaps load_coil_maps(const std::string& path) {
  const npy::ArrayFile a = npy::read(path);
  if (a.shape.size() != 3)
    throw ValidationError("load_coil_maps: expected a coils x H x W array in " +
                          path);
  CoilMaps m(a.shape[0], a.shape[1], a.shape[2]);
  m.v = npy::to_complex(a);
  return m;
}

inline void save_mask(const SamplingMask& m, const std::string& path) {
  npy::ArrayFile a;
  a.dtype = npy::Dtype::u1;
  a.shape = {m.W};
  a.data.assign(m.sampled.begin(), m.sampled.end());
  npy::write(a, path);
}

inline SamplingMask load_mask(const std::string& path, int acceleration,
                              double center_fraction) {
  const npy::ArrayFile a = npy::read(path);
  if (a.shape.size() != 1)
    throw ValidationError("load_mask: expected a 1D array in " + path);
  SamplingMask m;
  m.W = a.shape[0];
  m.acceleration = acceleration;
  m.center_fraction = center_fraction;
  m.sampled.assign(a.data.begin(), a.data.end());
  return m;
}

inline void save_trace_csv(const std::vector<LossBreakdown>& trace,
                           const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("trace: cannot write " + path);
  f << "iteration,l_dc,l_prior,l_tv,total\n";
  f << std::setprecision(17);
  for (std::size_t i = 0; i < trace.size(); ++i)
    f << i << ',' << trace[i].l_dc << ',' << trace[i].l_prior << ','
      << trace[i].l_tv << ',' << trace[i].total << '\n';
}

// Binary P5 portable graymap; values clamped to [lo, hi] then scaled to 0..255.
inline void save_pgm(const std::vector<double>& img, std::size_t H,
                     std::size_t W, const std::string& path, double lo = 0.0,
                     double hi = 1.0) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("pgm: cannot write " + path);
  f << "P5\n" << W << " " << H << "\n255\n";
  for (std::size_t p = 0; p < H * W; ++p) {
    double x = (img[p] - lo) / (hi - lo);
    x = x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x);
    f.put(char(int(x * 255.0 + 0.5)));
  }
}

}  // namespace priiner
