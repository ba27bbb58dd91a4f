#pragma once

// Instance optimization loop: one shared Adam instance over the
// concatenation of theta (hash tables + MLP) and phi (complex polynomial
// coefficients stored as interleaved real/imag pairs).

#include <chrono>
#include <utility>
#include <vector>

#include "priiner/adam.hpp"
#include "priiner/config.hpp"
#include "priiner/objective.hpp"

namespace priiner {

struct ReconResult {
  ComplexGrid2D image;              // magnitude of the rendered intensities
  std::vector<double> intensities;  // raw (signed) INR output
  CoilMaps maps;                    // final RSS-normalized maps
  std::vector<LossBreakdown> trace;
  double wall_seconds = 0.0;
  int iterations_run = 0;
};

struct DivergenceError : NumericalError {
  std::vector<LossBreakdown> trace;
  DivergenceError(const std::string& msg, std::vector<LossBreakdown> t)
      : NumericalError(msg), trace(std::move(t)) {}
};

inline ReconResult reconstruct(const ReconConfig& cfg, const MultiCoilKSpace& y,
                               const SamplingMask& mask,
                               const ComplexGrid2D& prior) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  HashGridConfig hash = cfg.hash;
  if (hash.max_resolution < hash.base_resolution)
    hash.max_resolution = int(std::max(y.H, y.W));

  Objective obj(y, mask, prior, hash, cfg.csm_degree, cfg.alpha, cfg.lambda_tv,
                !cfg.dc_only);

  InrParams theta = init_inr_params(hash, std::uint64_t(cfg.seed));
  CsmParams phi = CsmParams::uniform_init(y.coils, cfg.csm_degree);

  const std::size_t n_theta = theta.flat.size();
  const std::size_t n_phi = 2 * phi.coeffs.size();
  std::vector<double> params(n_theta + n_phi);
  std::vector<double> grads(n_theta + n_phi);
  AdamState adam(params.size(), cfg.learning_rate);

  auto pack = [&]() {
    std::copy(theta.flat.begin(), theta.flat.end(), params.begin());
    for (std::size_t i = 0; i < phi.coeffs.size(); ++i) {
      params[n_theta + 2 * i] = phi.coeffs[i].real();
      params[n_theta + 2 * i + 1] = phi.coeffs[i].imag();
    }
  };
  auto unpack = [&]() {
    std::copy(params.begin(), params.begin() + long(n_theta), theta.flat.begin());
    for (std::size_t i = 0; i < phi.coeffs.size(); ++i)
      phi.coeffs[i] = cplx{params[n_theta + 2 * i], params[n_theta + 2 * i + 1]};
  };

  ReconResult result;
  result.trace.reserve(std::size_t(cfg.iterations));

  for (int it = 0; it < cfg.iterations; ++it) {
    LossBreakdown b;
    auto [g_theta, g_phi] = obj.gradient(theta, phi, &b);
    if (!std::isfinite(b.total))
      throw DivergenceError("reconstruct: loss diverged at iteration " +
                                std::to_string(it),
                            result.trace);
    result.trace.push_back(b);

    std::copy(g_theta.begin(), g_theta.end(), grads.begin());
    for (std::size_t i = 0; i < g_phi.coeffs.size(); ++i) {
      grads[n_theta + 2 * i] = g_phi.coeffs[i].real();
      grads[n_theta + 2 * i + 1] = g_phi.coeffs[i].imag();
    }
    pack();
    adam_step(adam, params, grads, "theta+phi");
    unpack();
    result.iterations_run = it + 1;

    if (cfg.early_stop && result.trace.size() > 50) {
      const double prev = result.trace[result.trace.size() - 51].total;
      const double cur = b.total;
      if (prev - cur < 1e-6 * std::abs(prev)) break;
    }
  }

  result.intensities = render_intensities(theta, hash, y.H, y.W);
  result.image = ComplexGrid2D(y.H, y.W);
  for (std::size_t p = 0; p < y.H * y.W; ++p)
    result.image.v[p] = cplx{std::abs(result.intensities[p]), 0.0};
  result.maps = obj.normalized_maps(phi);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

}  // namespace priiner
