#include <doctest.h>

#include "priiner/kspace.hpp"

using namespace priiner;

namespace {

// Brute-force centered unitary DFT, independent of the fft path.
ComplexGrid2D dft2c_oracle(const ComplexGrid2D& in) {
  const double pi = 3.14159265358979323846;
  const auto H = in.H, W = in.W;
  ComplexGrid2D out(H, W);
  const double s = 1.0 / std::sqrt(double(H) * double(W));
  for (std::size_t a = 0; a < H; ++a)
    for (std::size_t b = 0; b < W; ++b) {
      cplx acc{0.0, 0.0};
      for (std::size_t i = 0; i < H; ++i)
        for (std::size_t k = 0; k < W; ++k) {
          const double ph =
              -2.0 * pi *
              ((double(a) - double(H) / 2) * (double(i) - double(H) / 2) / double(H) +
               (double(b) - double(W) / 2) * (double(k) - double(W) / 2) / double(W));
          acc += in.at(i, k) * std::polar(1.0, ph);
        }
      out.at(a, b) = acc * s;
    }
  return out;
}

ComplexGrid2D random_grid(Rng& rng, std::size_t H, std::size_t W) {
  ComplexGrid2D g(H, W);
  for (auto& z : g.v) z = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return g;
}

CoilMaps random_maps(Rng& rng, std::size_t c, std::size_t H, std::size_t W) {
  CoilMaps m(c, H, W);
  for (auto& z : m.v) z = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return m;
}

double norm2(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

TEST_CASE("fft2c: unit delta at the center gives a flat 1/N spectrum") {
  ComplexGrid2D x(4, 4);
  x.at(2, 2) = cplx{1.0, 0.0};
  const ComplexGrid2D k = fft2c(x);
  for (const auto& z : k.v) CHECK(std::abs(z) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("ifft2c: constant k-space gives a center delta") {
  ComplexGrid2D k(4, 4);
  for (auto& z : k.v) z = cplx{0.25, 0.0};
  const ComplexGrid2D x = ifft2c(k);
  CHECK(std::abs(x.at(2, 2)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(x.at(0, 0)) < 1e-12);
}

TEST_CASE("fft2c matches the brute-force centered DFT oracle") {
  Rng rng(11);
  for (auto dims : {std::pair<std::size_t, std::size_t>{4, 4}, {8, 6}, {6, 10}}) {
    const ComplexGrid2D x = random_grid(rng, dims.first, dims.second);
    const ComplexGrid2D got = fft2c(x);
    const ComplexGrid2D want = dft2c_oracle(x);
    for (std::size_t p = 0; p < x.v.size(); ++p)
      CHECK(std::abs(got.v[p] - want.v[p]) < 1e-10);
  }
}

TEST_CASE("fft2c/ifft2c inverse identity and unitarity") {
  Rng rng(3);
  const ComplexGrid2D x = random_grid(rng, 8, 8);
  const ComplexGrid2D back = ifft2c(fft2c(x));
  for (std::size_t p = 0; p < x.v.size(); ++p)
    CHECK(std::abs(back.v[p] - x.v[p]) < 1e-12 * norm2(x.v));
  CHECK(norm2(fft2c(x).v) == doctest::Approx(norm2(x.v)).epsilon(1e-12));

  const ComplexGrid2D y = random_grid(rng, 6, 6);
  const ComplexGrid2D back2 = fft2c(ifft2c(y));
  for (std::size_t p = 0; p < y.v.size(); ++p)
    CHECK(std::abs(back2.v[p] - y.v[p]) < 1e-12 * norm2(y.v));
}

TEST_CASE("fft2c rejects odd and empty grids, zero maps to zero") {
  CHECK_THROWS_AS(fft2c(ComplexGrid2D(5, 4)), ValidationError);
  CHECK_THROWS_AS(fft2c(ComplexGrid2D(0, 0)), ValidationError);
  ComplexGrid2D z(4, 4);
  for (const auto& v : ifft2c(z).v) CHECK(v == cplx{0.0, 0.0});
}

TEST_CASE("equispaced mask: R=1 samples everything") {
  const SamplingMask m = make_equispaced_mask(320, 1, 0.08);
  CHECK(m.sampled_count() == 320);
}

TEST_CASE("equispaced mask: W=320 frozen counts and center block") {
  // frozen regression values, derived by direct enumeration
  struct Case { int R; std::size_t total; };
  for (const Case c : {Case{4, 99}, Case{6, 76}, Case{8, 63}, Case{10, 55}}) {
    const SamplingMask m = make_equispaced_mask(320, c.R, 0.08);
    // 26-column fully sampled center, indices 147..172
    for (std::size_t k = 147; k <= 172; ++k) CHECK(m.sampled[k] == 1);
    CHECK(m.sampled[146] == ((146 % c.R) == 0 ? 1 : 0));
    CHECK(m.sampled_count() == c.total);

    // independent enumeration oracle
    std::size_t expect = 0;
    for (std::size_t k = 0; k < 320; ++k)
      expect += (k % std::size_t(c.R) == 0) || (k >= 147 && k <= 172);
    CHECK(m.sampled_count() == expect);
  }
}

TEST_CASE("equispaced mask: R=10 sampled fraction bound") {
  const SamplingMask m = make_equispaced_mask(320, 10, 0.08);
  const double frac = double(m.sampled_count()) / 320.0;
  CHECK(frac >= 0.08);
  CHECK(frac <= 0.08 + 0.1 + 2.0 / 320.0);
}

TEST_CASE("equispaced mask: determinism and validation") {
  const SamplingMask a = make_equispaced_mask(64, 4, 0.08);
  const SamplingMask b = make_equispaced_mask(64, 4, 0.08);
  CHECK(a.sampled == b.sampled);
  CHECK_THROWS_AS(make_equispaced_mask(64, 0, 0.08), ValidationError);
  CHECK_THROWS_AS(make_equispaced_mask(64, 4, 0.0), ValidationError);
  CHECK_THROWS_AS(make_equispaced_mask(64, 4, 1.5), ValidationError);
}

TEST_CASE("forward_model reduces to fft2c for one uniform coil, full mask") {
  Rng rng(5);
  const ComplexGrid2D img = random_grid(rng, 8, 8);
  CoilMaps csm(1, 8, 8);
  for (auto& z : csm.v) z = cplx{1.0, 0.0};
  const SamplingMask mask = make_equispaced_mask(8, 1, 1.0);
  const MultiCoilKSpace y = forward_model(img, csm, mask);
  const ComplexGrid2D k = fft2c(img);
  for (std::size_t p = 0; p < k.v.size(); ++p)
    CHECK(std::abs(y.v[p] - k.v[p]) < 1e-12);
}

TEST_CASE("forward_model: zero image gives zero k-space, linearity") {
  Rng rng(6);
  CoilMaps csm = random_maps(rng, 2, 8, 8);
  const SamplingMask mask = make_equispaced_mask(8, 2, 0.25);
  const MultiCoilKSpace y0 = forward_model(ComplexGrid2D(8, 8), csm, mask);
  for (const auto& z : y0.v) CHECK(z == cplx{0.0, 0.0});

  const ComplexGrid2D xa = random_grid(rng, 8, 8);
  const ComplexGrid2D xb = random_grid(rng, 8, 8);
  const cplx a{0.7, -0.2}, b{-1.1, 0.4};
  ComplexGrid2D comb(8, 8);
  for (std::size_t p = 0; p < comb.v.size(); ++p)
    comb.v[p] = a * xa.v[p] + b * xb.v[p];
  const MultiCoilKSpace yc = forward_model(comb, csm, mask);
  const MultiCoilKSpace ya = forward_model(xa, csm, mask);
  const MultiCoilKSpace yb = forward_model(xb, csm, mask);
  for (std::size_t p = 0; p < yc.v.size(); ++p)
    CHECK(std::abs(yc.v[p] - (a * ya.v[p] + b * yb.v[p])) < 1e-12);
}

TEST_CASE("forward/adjoint dot-product identity over 100 random instances") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t H = 2 * (1 + rng.next_u64() % 8);
    const std::size_t W = 2 * (1 + rng.next_u64() % 8);
    const std::size_t c = 1 + rng.next_u64() % 3;
    const int R = 1 + int(rng.next_u64() % 4);
    const ComplexGrid2D x = random_grid(rng, H, W);
    const CoilMaps csm = random_maps(rng, c, H, W);
    const SamplingMask mask = make_equispaced_mask(W, R, 0.25);
    MultiCoilKSpace y(c, H, W);
    for (auto& z : y.v) z = {rng.uniform(-1, 1), rng.uniform(-1, 1)};

    const MultiCoilKSpace ax = forward_model(x, csm, mask);
    const ComplexGrid2D aty = zero_filled_adjoint(y, csm, mask);
    const cplx lhs = dot(ax.v, y.v);
    const cplx rhs = dot(x.v, aty.v);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * (norm2(x.v) * norm2(y.v) + 1e-30));
  }
}

TEST_CASE("zero_filled_adjoint: full sampling with RSS maps recovers image") {
  Rng rng(17);
  ComplexGrid2D x = random_grid(rng, 8, 8);
  CoilMaps csm = random_maps(rng, 3, 8, 8);
  // RSS-normalize so sum_j |S_j|^2 = 1 pointwise
  for (std::size_t p = 0; p < 64; ++p) {
    double r = 0.0;
    for (std::size_t j = 0; j < 3; ++j) r += std::norm(csm.v[j * 64 + p]);
    for (std::size_t j = 0; j < 3; ++j) csm.v[j * 64 + p] /= std::sqrt(r);
  }
  const SamplingMask mask = make_equispaced_mask(8, 1, 1.0);
  const MultiCoilKSpace y = forward_model(x, csm, mask);
  const ComplexGrid2D rec = zero_filled_adjoint(y, csm, mask);
  for (std::size_t p = 0; p < 64; ++p)
    CHECK(std::abs(rec.v[p] - x.v[p]) < 1e-10);
}

TEST_CASE("zero_filled_adjoint: zero k-space gives zero image") {
  CoilMaps csm(2, 4, 4);
  for (auto& z : csm.v) z = cplx{0.5, 0.0};
  const SamplingMask mask = make_equispaced_mask(4, 2, 0.25);
  const ComplexGrid2D img = zero_filled_adjoint(MultiCoilKSpace(2, 4, 4), csm, mask);
  for (const auto& z : img.v) CHECK(z == cplx{0.0, 0.0});
}

TEST_CASE("shape mismatches are rejected") {
  CoilMaps csm(1, 4, 4);
  const SamplingMask mask = make_equispaced_mask(4, 1, 1.0);
  CHECK_THROWS_AS(forward_model(ComplexGrid2D(6, 6), csm, mask), ValidationError);
  CHECK_THROWS_AS(zero_filled_adjoint(MultiCoilKSpace(2, 4, 4), csm, mask),
                  ValidationError);
}
