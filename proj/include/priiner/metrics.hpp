#pragma once

// SSIM / PSNR on magnitude images plus a paired two-sided Wilcoxon
// signed-rank test (exact enumeration up to n = 20, normal approximation
// with tie correction beyond).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "priiner/common.hpp"

namespace priiner {

struct MetricReport {
  double ssim = 0.0;
  double psnr = 0.0;
};

// 10*log10(max(truth)^2 / MSE), capped at 100 dB for identical inputs.
inline double psnr(const std::vector<double>& test,
                   const std::vector<double>& truth) {
  if (test.size() != truth.size() || truth.empty())
    throw ValidationError("psnr: shape mismatch");
  double peak = 0.0, mse = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    peak = std::max(peak, truth[i]);
    const double d = test[i] - truth[i];
    mse += d * d;
  }
  mse /= double(truth.size());
  if (!(peak > 0.0)) throw ValidationError("psnr: truth must not be all zero");
  if (mse == 0.0) return 100.0;
  return std::min(100.0, 10.0 * std::log10(peak * peak / mse));
}

// Mean local SSIM over all positions where the full 11x11 window fits.
// Gaussian window sigma = 1.5, K1 = 0.01, K2 = 0.03. Dynamic range defaults
// to max(truth) - min(truth); pass data_range > 0 to override.
inline double ssim(const std::vector<double>& test,
                   const std::vector<double>& truth, std::size_t H,
                   std::size_t W, double data_range = 0.0) {
  if (test.size() != H * W || truth.size() != H * W)
    throw ValidationError("ssim: shape mismatch");
  if (H < 11 || W < 11)
    throw ValidationError("ssim: images must be at least 11x11");

  double range = data_range;
  if (range <= 0.0) {
    const auto [lo, hi] = std::minmax_element(truth.begin(), truth.end());
    range = *hi - *lo;
    if (range <= 0.0) range = 1.0;  // constant truth
  }
  const double c1 = (0.01 * range) * (0.01 * range);
  const double c2 = (0.03 * range) * (0.03 * range);

  constexpr int win = 11;
  constexpr int half = win / 2;
  double w[win];
  double wsum = 0.0;
  for (int i = 0; i < win; ++i) {
    const double d = double(i - half);
    w[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
    wsum += w[i];
  }
  for (auto& x : w) x /= wsum;

  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t ci = half; ci + half < H; ++ci) {
    for (std::size_t ck = half; ck + half < W; ++ck) {
      double mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
      for (int di = -half; di <= half; ++di) {
        const double wi = w[di + half];
        const std::size_t row = (ci + std::size_t(di + half) - half) * W;
        for (int dk = -half; dk <= half; ++dk) {
          const double wk = wi * w[dk + half];
          const double x = test[row + ck + std::size_t(dk + half) - half];
          const double y = truth[row + ck + std::size_t(dk + half) - half];
          mx += wk * x;
          my += wk * y;
          mxx += wk * x * x;
          myy += wk * y * y;
          mxy += wk * x * y;
        }
      }
      const double vx = mxx - mx * mx;
      const double vy = myy - my * my;
      const double cov = mxy - mx * my;
      acc += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
             ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++count;
    }
  }
  return acc / double(count);
}

// Two-sided paired Wilcoxon signed-rank p-value.
inline double wilcoxon_signed_rank(const std::vector<double>& a,
                                   const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 5)
    throw ValidationError("wilcoxon: need equal-length samples of size >= 5");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double di = b[i] - a[i];
    if (di != 0.0) d.push_back(di);
  }
  if (d.empty())
    throw ValidationError("wilcoxon: degenerate sample (all differences zero)");

  const std::size_t n = d.size();
  // average ranks of |d| with tie handling
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(d[x]) < std::abs(d[y]);
  });
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n &&
           std::abs(d[order[j + 1]]) == std::abs(d[order[i]]))
      ++j;
    const double avg = (double(i) + double(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }

  double w_plus = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    if (d[k] > 0.0) w_plus += rank[k];

  if (n <= 20) {
    // exact: enumerate all sign assignments
    const std::size_t total = std::size_t(1) << n;
    std::size_t le = 0, ge = 0;
    for (std::size_t s = 0; s < total; ++s) {
      double t = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        if (s & (std::size_t(1) << k)) t += rank[k];
      if (t <= w_plus + 1e-12) ++le;
      if (t >= w_plus - 1e-12) ++ge;
    }
    const double p =
        2.0 * std::min(double(le), double(ge)) / double(total);
    return std::min(1.0, p);
  }

  // normal approximation with tie correction and continuity correction
  const double mean = double(n) * double(n + 1) / 4.0;
  double tie_term = 0.0;
  i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n &&
           std::abs(d[order[j + 1]]) == std::abs(d[order[i]]))
      ++j;
    const double t = double(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double var =
      double(n) * double(n + 1) * double(2 * n + 1) / 24.0 - tie_term / 48.0;
  const double z = (std::abs(w_plus - mean) - 0.5) / std::sqrt(var);
  return std::erfc(z / std::sqrt(2.0));
}

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
  const double mean =
      std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  double s2 = 0.0;
  for (double x : v) s2 += (x - mean) * (x - mean);
  const double sd = v.size() > 1 ? std::sqrt(s2 / double(v.size() - 1)) : 0.0;
  return {mean, sd};
}

}  // namespace priiner
