#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "priiner/npy.hpp"

using namespace priiner;
namespace fs = std::filesystem;

namespace {
std::string tmp_path(const std::string& name) {
  return (fs::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("npy round-trip identity for all supported dtypes") {
  Rng rng(42);
  const std::string path = tmp_path("priiner_npy_rt.npy");
  for (auto d : {npy::Dtype::f4, npy::Dtype::f8, npy::Dtype::c8,
                 npy::Dtype::c16}) {
    npy::ArrayFile a;
    a.dtype = d;
    a.shape = {3, 5};
    a.data.resize(15 * npy::dtype_size(d));
    for (auto& b : a.data) b = std::uint8_t(rng.next_u64() & 0x7f);
    npy::write(a, path);
    const npy::ArrayFile back = npy::read(path);
    CHECK(back.dtype == a.dtype);
    CHECK(back.shape == a.shape);
    CHECK(back.data == a.data);
  }
  std::remove(path.c_str());
}

TEST_CASE("npy round-trip preserves random complex values (property)") {
  Rng rng(7);
  const std::string path = tmp_path("priiner_npy_prop.npy");
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t h = 1 + rng.next_u64() % 6;
    const std::size_t w = 1 + rng.next_u64() % 6;
    std::vector<cplx> v(h * w);
    for (auto& z : v) z = {rng.uniform(-10, 10), rng.uniform(-10, 10)};
    npy::write(npy::from_complex(v, {h, w}, npy::Dtype::c16), path);
    const auto back = npy::to_complex(npy::read(path));
    REQUIRE(back.size() == v.size());
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(back[i] == v[i]);
  }
  std::remove(path.c_str());
}

TEST_CASE("npy parses a hand-constructed v1.0 header") {
  // 128-byte header + 6 complex64 elements, shape (2, 3)
  const std::string path = tmp_path("priiner_npy_hand.npy");
  std::string dict = "{'descr': '<c8', 'fortran_order': False, 'shape': (2, 3), }";
  std::string header = dict + std::string(128 - 10 - dict.size() - 1, ' ') + "\n";
  std::ofstream f(path, std::ios::binary);
  f.write("\x93NUMPY\x01\x00", 8);
  const char len[2] = {char(header.size() & 0xff), char(header.size() >> 8)};
  f.write(len, 2);
  f.write(header.data(), std::streamsize(header.size()));
  float data[12] = {1, 0, 2, 0, 3, 0, 4, 0, 5, 0, 6, 0};
  f.write(reinterpret_cast<const char*>(data), sizeof(data));
  f.close();

  const npy::ArrayFile a = npy::read(path);
  CHECK(a.dtype == npy::Dtype::c8);
  CHECK(a.shape == std::vector<std::size_t>{2, 3});
  CHECK(a.element_count() == 6);
  const auto v = npy::to_complex(a);
  CHECK(v[5] == cplx{6.0, 0.0});
  std::remove(path.c_str());
}

TEST_CASE("npy write produces the documented byte layout") {
  // 4x4 complex64 zeros: 128 header bytes + 128 data bytes
  const std::string path = tmp_path("priiner_npy_layout.npy");
  std::vector<cplx> v(16, cplx{0.0, 0.0});
  npy::write(npy::from_complex(v, {4, 4}, npy::Dtype::c8), path);
  CHECK(fs::file_size(path) == 256);

  std::ifstream f(path, std::ios::binary);
  char magic[8];
  f.read(magic, 8);
  CHECK(std::memcmp(magic, "\x93NUMPY\x01\x00", 8) == 0);
  std::remove(path.c_str());
}

TEST_CASE("npy scalar (empty shape) is a single-element file") {
  const std::string path = tmp_path("priiner_npy_scalar.npy");
  npy::ArrayFile a;
  a.dtype = npy::Dtype::f8;
  a.shape = {};
  a.data.resize(8);
  npy::write(a, path);
  const npy::ArrayFile back = npy::read(path);
  CHECK(back.element_count() == 1);
  CHECK(back.shape.empty());
  std::remove(path.c_str());
}

TEST_CASE("npy rejects corrupted magic bytes") {
  const std::string path = tmp_path("priiner_npy_bad.npy");
  std::ofstream f(path, std::ios::binary);
  const char zeros[64] = {};
  f.write(zeros, 64);
  f.close();
  CHECK_THROWS_AS(npy::read(path), FormatError);
  std::remove(path.c_str());
}

TEST_CASE("npy read errors") {
  CHECK_THROWS_AS(npy::read("/nonexistent/definitely_missing.npy"), IoError);
  npy::ArrayFile a;
  a.dtype = npy::Dtype::f4;
  a.shape = {4};
  a.data.resize(3);  // inconsistent
  CHECK_THROWS_AS(npy::write(a, tmp_path("x.npy")), ValidationError);
}
