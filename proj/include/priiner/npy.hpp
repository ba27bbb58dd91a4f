#pragma once

// NPY v1.0 reader/writer, little-endian only.
//
// Layout: \x93NUMPY, version bytes 0x01 0x00, u16 little-endian header
// length, then a Python-dict-literal header with 'descr', 'fortran_order'
// and 'shape', padded with spaces so the data section starts on a 64-byte
// boundary.

#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "priiner/common.hpp"

namespace priiner::npy {

enum class Dtype { f4, f8, c8, c16, u1 };

inline std::size_t dtype_size(Dtype d) {
  switch (d) {
    case Dtype::f4: return 4;
    case Dtype::f8: return 8;
    case Dtype::c8: return 8;
    case Dtype::c16: return 16;
    case Dtype::u1: return 1;
  }
  return 0;
}

inline std::string dtype_descr(Dtype d) {
  switch (d) {
    case Dtype::f4: return "<f4";
    case Dtype::f8: return "<f8";
    case Dtype::c8: return "<c8";
    case Dtype::c16: return "<c16";
    case Dtype::u1: return "|u1";
  }
  return "";
}

struct ArrayFile {
  Dtype dtype = Dtype::f8;
  std::vector<std::size_t> shape;
  std::vector<std::uint8_t> data;  // row-major raw bytes

  std::size_t element_count() const {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<>());
  }
};

namespace detail {

inline Dtype parse_descr(const std::string& s) {
  if (s == "<f4") return Dtype::f4;
  if (s == "<f8") return Dtype::f8;
  if (s == "<c8") return Dtype::c8;
  if (s == "<c16") return Dtype::c16;
  if (s == "|u1" || s == "<u1") return Dtype::u1;
  throw FormatError("npy: unsupported dtype descr '" + s + "'");
}

// Pulls the quoted string value following `key` in the header dict.
inline std::string dict_string(const std::string& hdr, const std::string& key) {
  auto k = hdr.find("'" + key + "'");
  if (k == std::string::npos) throw FormatError("npy: header missing key " + key);
  auto q1 = hdr.find('\'', k + key.size() + 2);
  if (q1 == std::string::npos) throw FormatError("npy: malformed header");
  auto q2 = hdr.find('\'', q1 + 1);
  if (q2 == std::string::npos) throw FormatError("npy: malformed header");
  return hdr.substr(q1 + 1, q2 - q1 - 1);
}

inline std::vector<std::size_t> dict_shape(const std::string& hdr) {
  auto k = hdr.find("'shape'");
  if (k == std::string::npos) throw FormatError("npy: header missing shape");
  auto p1 = hdr.find('(', k);
  auto p2 = hdr.find(')', p1);
  if (p1 == std::string::npos || p2 == std::string::npos)
    throw FormatError("npy: malformed shape tuple");
  std::vector<std::size_t> shape;
  std::string body = hdr.substr(p1 + 1, p2 - p1 - 1);
  std::size_t pos = 0;
  while (pos < body.size()) {
    while (pos < body.size() && (body[pos] == ' ' || body[pos] == ',')) ++pos;
    if (pos >= body.size()) break;
    std::size_t end = pos;
    while (end < body.size() && body[end] >= '0' && body[end] <= '9') ++end;
    if (end == pos) throw FormatError("npy: malformed shape tuple");
    shape.push_back(std::stoull(body.substr(pos, end - pos)));
    pos = end;
  }
  return shape;
}

}  // namespace detail

inline ArrayFile read(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("npy: cannot open " + path);
  char magic[8];
  if (!f.read(magic, 8)) throw FormatError("npy: file too short: " + path);
  if (std::memcmp(magic, "\x93NUMPY", 6) != 0)
    throw FormatError("npy: bad magic bytes in " + path);
  if (magic[6] != 1 || magic[7] != 0)
    throw FormatError("npy: only version 1.0 supported");
  std::uint8_t len_bytes[2];
  if (!f.read(reinterpret_cast<char*>(len_bytes), 2))
    throw FormatError("npy: truncated header length");
  const std::size_t header_len = len_bytes[0] | (std::size_t(len_bytes[1]) << 8);
  std::string header(header_len, '\0');
  if (!f.read(header.data(), std::streamsize(header_len)))
    throw FormatError("npy: truncated header");

  ArrayFile a;
  a.dtype = detail::parse_descr(detail::dict_string(header, "descr"));
  if (header.find("'fortran_order': True") != std::string::npos)
    throw FormatError("npy: fortran_order arrays not supported");
  a.shape = detail::dict_shape(header);

  const std::size_t nbytes = a.element_count() * dtype_size(a.dtype);
  a.data.resize(nbytes);
  if (nbytes > 0 &&
      !f.read(reinterpret_cast<char*>(a.data.data()), std::streamsize(nbytes)))
    throw FormatError("npy: truncated data section");
  return a;
}

inline void write(const ArrayFile& a, const std::string& path) {
  if (a.data.size() != a.element_count() * dtype_size(a.dtype))
    throw ValidationError("npy: buffer size inconsistent with shape/dtype");

  std::string dict = "{'descr': '" + dtype_descr(a.dtype) +
                     "', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < a.shape.size(); ++i)
    dict += std::to_string(a.shape[i]) + (a.shape.size() == 1 ? "," : (i + 1 < a.shape.size() ? ", " : ""));
  dict += "), }";

  // magic(6) + version(2) + hlen(2) + dict + pad + '\n', total multiple of 64
  std::size_t unpadded = 10 + dict.size() + 1;
  std::size_t padded = (unpadded + 63) / 64 * 64;
  std::string header = dict + std::string(padded - unpadded, ' ') + "\n";

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("npy: cannot write " + path);
  f.write("\x93NUMPY\x01\x00", 8);
  const std::size_t hlen = header.size();
  const char len_bytes[2] = {char(hlen & 0xff), char((hlen >> 8) & 0xff)};
  f.write(len_bytes, 2);
  f.write(header.data(), std::streamsize(header.size()));
  f.write(reinterpret_cast<const char*>(a.data.data()),
          std::streamsize(a.data.size()));
  if (!f) throw IoError("npy: write failed for " + path);
}

// Typed helpers; stored dtype is the narrow on-disk form, in-memory is double.

inline ArrayFile from_complex(const std::vector<cplx>& v,
                              std::vector<std::size_t> shape,
                              Dtype d = Dtype::c8) {
  ArrayFile a;
  a.dtype = d;
  a.shape = std::move(shape);
  a.data.resize(v.size() * dtype_size(d));
  if (d == Dtype::c8) {
    auto* p = reinterpret_cast<float*>(a.data.data());
    for (std::size_t i = 0; i < v.size(); ++i) {
      p[2 * i] = float(v[i].real());
      p[2 * i + 1] = float(v[i].imag());
    }
  } else if (d == Dtype::c16) {
    auto* p = reinterpret_cast<double*>(a.data.data());
    for (std::size_t i = 0; i < v.size(); ++i) {
      p[2 * i] = v[i].real();
      p[2 * i + 1] = v[i].imag();
    }
  } else {
    throw ValidationError("npy: complex data requires a complex dtype");
  }
  return a;
}

inline std::vector<cplx> to_complex(const ArrayFile& a) {
  std::vector<cplx> v(a.element_count());
  switch (a.dtype) {
    case Dtype::c8: {
      auto* p = reinterpret_cast<const float*>(a.data.data());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = {p[2 * i], p[2 * i + 1]};
      break;
    }
    case Dtype::c16: {
      auto* p = reinterpret_cast<const double*>(a.data.data());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = {p[2 * i], p[2 * i + 1]};
      break;
    }
    case Dtype::f4: {
      auto* p = reinterpret_cast<const float*>(a.data.data());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = {double(p[i]), 0.0};
      break;
    }
    case Dtype::f8: {
      auto* p = reinterpret_cast<const double*>(a.data.data());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = {p[i], 0.0};
      break;
    }
    default:
      throw FormatError("npy: cannot promote dtype to complex");
  }
  return v;
}

inline ArrayFile from_real(const std::vector<double>& v,
                           std::vector<std::size_t> shape,
                           Dtype d = Dtype::f4) {
  ArrayFile a;
  a.dtype = d;
  a.shape = std::move(shape);
  a.data.resize(v.size() * dtype_size(d));
  if (d == Dtype::f4) {
    auto* p = reinterpret_cast<float*>(a.data.data());
    for (std::size_t i = 0; i < v.size(); ++i) p[i] = float(v[i]);
  } else if (d == Dtype::f8) {
    auto* p = reinterpret_cast<double*>(a.data.data());
    for (std::size_t i = 0; i < v.size(); ++i) p[i] = v[i];
  } else {
    throw ValidationError("npy: real data requires a float dtype");
  }
  return a;
}

inline std::vector<double> to_real(const ArrayFile& a) {
  std::vector<double> v(a.element_count());
  switch (a.dtype) {
    case Dtype::f4: {
      auto* p = reinterpret_cast<const float*>(a.data.data());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = p[i];
      break;
    }
    case Dtype::f8: {
      auto* p = reinterpret_cast<const double*>(a.data.data());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = p[i];
      break;
    }
    case Dtype::u1:
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.data[i];
      break;
    default:
      throw FormatError("npy: dtype is not real-valued");
  }
  return v;
}

}  // namespace priiner::npy
