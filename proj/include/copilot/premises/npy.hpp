#pragma once

// NPY v1.0 reader/writer for row-major little-endian float32 matrices.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "copilot/error.hpp"

namespace copilot {

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error("npy format error: " + what) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error("npy shape error: " + what) {}
};

struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<float> data;  // row-major, rows * dim

  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t r, std::size_t d) : rows(r), dim(d), data(r * d, 0.0f) {}
  EmbeddingMatrix(std::size_t r, std::size_t d, std::vector<float> values)
      : rows(r), dim(d), data(std::move(values)) {
    if (data.size() != rows * dim) throw ShapeError("data size does not match shape");
  }

  float at(std::size_t r, std::size_t c) const noexcept { return data[r * dim + c]; }
  float& at(std::size_t r, std::size_t c) noexcept { return data[r * dim + c]; }
  const float* row(std::size_t r) const noexcept { return data.data() + r * dim; }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;
};

inline constexpr std::string_view kNpyMagic = "\x93NUMPY";

namespace detail {

inline std::uint32_t floatBits(float f) noexcept { return std::bit_cast<std::uint32_t>(f); }

inline std::string npyHeader(std::size_t rows, std::size_t dim) {
  std::string dict = "{'descr': '<f4', 'fortran_order': False, 'shape': (" +
                     std::to_string(rows) + ", " + std::to_string(dim) + "), }";
  // magic(6) + version(2) + length(2) + dict + padding + '\n' is a multiple of 64.
  const std::size_t unpadded = kNpyMagic.size() + 4 + dict.size() + 1;
  const std::size_t padding = (64 - unpadded % 64) % 64;
  dict.append(padding, ' ');
  dict += '\n';
  return dict;
}

inline std::string_view skipSpaces(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

// Minimal parser for the header dict written by numpy for 2-D arrays.
struct NpyHeader {
  std::string descr;
  bool fortranOrder = false;
  std::vector<std::size_t> shape;
};

inline NpyHeader parseNpyHeader(std::string_view text) {
  NpyHeader h;
  bool sawDescr = false, sawOrder = false, sawShape = false;
  while (!text.empty() && (text.back() == '\n' || text.back() == ' ')) text.remove_suffix(1);
  if (text.size() < 2 || text.front() != '{' || text.back() != '}')
    throw FormatError("header is not a dict");
  text = text.substr(1, text.size() - 2);
  while (true) {
    text = skipSpaces(text);
    if (text.empty()) break;
    if (text.front() != '\'') throw FormatError("expected quoted key");
    const auto endKey = text.find('\'', 1);
    if (endKey == std::string_view::npos) throw FormatError("unterminated key");
    const std::string key(text.substr(1, endKey - 1));
    text = skipSpaces(text.substr(endKey + 1));
    if (text.empty() || text.front() != ':') throw FormatError("expected ':'");
    text = skipSpaces(text.substr(1));
    if (key == "descr") {
      if (text.empty() || text.front() != '\'') throw FormatError("descr must be a string");
      const auto end = text.find('\'', 1);
      if (end == std::string_view::npos) throw FormatError("unterminated descr");
      h.descr = std::string(text.substr(1, end - 1));
      text = text.substr(end + 1);
      sawDescr = true;
    } else if (key == "fortran_order") {
      if (text.rfind("False", 0) == 0) {
        h.fortranOrder = false;
        text = text.substr(5);
      } else if (text.rfind("True", 0) == 0) {
        h.fortranOrder = true;
        text = text.substr(4);
      } else {
        throw FormatError("fortran_order must be True or False");
      }
      sawOrder = true;
    } else if (key == "shape") {
      if (text.empty() || text.front() != '(') throw FormatError("shape must be a tuple");
      const auto end = text.find(')');
      if (end == std::string_view::npos) throw FormatError("unterminated shape");
      std::string_view inner = text.substr(1, end - 1);
      while (true) {
        inner = skipSpaces(inner);
        if (inner.empty()) break;
        std::size_t n = 0;
        while (n < inner.size() && inner[n] >= '0' && inner[n] <= '9') ++n;
        if (n == 0) throw FormatError("bad shape entry");
        h.shape.push_back(std::stoull(std::string(inner.substr(0, n))));
        inner = skipSpaces(inner.substr(n));
        if (!inner.empty() && inner.front() == ',') inner.remove_prefix(1);
      }
      text = text.substr(end + 1);
      sawShape = true;
    } else {
      throw FormatError("unknown header key '" + key + "'");
    }
    text = skipSpaces(text);
    if (!text.empty() && text.front() == ',') text.remove_prefix(1);
  }
  if (!sawDescr || !sawOrder || !sawShape) throw FormatError("header misses a required key");
  return h;
}

}  // namespace detail

inline void writeNpy(const EmbeddingMatrix& m, std::ostream& out) {
  if (m.data.size() != m.rows * m.dim) throw ShapeError("data size does not match shape");
  const std::string header = detail::npyHeader(m.rows, m.dim);
  out.write(kNpyMagic.data(), static_cast<std::streamsize>(kNpyMagic.size()));
  const char version[2] = {1, 0};
  out.write(version, 2);
  const std::uint16_t len = static_cast<std::uint16_t>(header.size());
  const char lenBytes[2] = {static_cast<char>(len & 0xff), static_cast<char>(len >> 8)};
  out.write(lenBytes, 2);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  std::string payload(m.data.size() * 4, '\0');
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    const std::uint32_t b = detail::floatBits(m.data[i]);
    payload[4 * i + 0] = static_cast<char>(b & 0xff);
    payload[4 * i + 1] = static_cast<char>((b >> 8) & 0xff);
    payload[4 * i + 2] = static_cast<char>((b >> 16) & 0xff);
    payload[4 * i + 3] = static_cast<char>((b >> 24) & 0xff);
  }
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw Error("failed writing npy stream");
}

inline std::string toNpyBytes(const EmbeddingMatrix& m) {
  std::ostringstream ss(std::ios::binary);
  writeNpy(m, ss);
  return ss.str();
}

inline EmbeddingMatrix fromNpyBytes(std::string_view bytes) {
  if (bytes.size() < 10 || bytes.substr(0, 6) != kNpyMagic) throw FormatError("bad magic");
  if (bytes[6] != 1 || bytes[7] != 0) throw FormatError("unsupported version (need 1.0)");
  const std::size_t headerLen = static_cast<unsigned char>(bytes[8]) |
                                (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
  if (bytes.size() < 10 + headerLen) throw FormatError("truncated header");
  const detail::NpyHeader h = detail::parseNpyHeader(bytes.substr(10, headerLen));
  if (h.descr != "<f4") throw FormatError("descr must be '<f4', got '" + h.descr + "'");
  if (h.fortranOrder) throw FormatError("fortran_order must be False");
  if (h.shape.size() != 2) throw ShapeError("expected a 2-D array");
  const std::string_view payload = bytes.substr(10 + headerLen);
  const std::size_t count = h.shape[0] * h.shape[1];
  if (payload.size() != count * 4)
    throw ShapeError("payload has " + std::to_string(payload.size()) + " bytes, expected " +
                     std::to_string(count * 4));
  EmbeddingMatrix m(h.shape[0], h.shape[1]);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t b = 0;
    for (int k = 3; k >= 0; --k) b = (b << 8) | static_cast<unsigned char>(payload[4 * i + k]);
    m.data[i] = std::bit_cast<float>(b);
  }
  return m;
}

inline EmbeddingMatrix readNpy(std::istream& in) {
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fromNpyBytes(bytes);
}

inline void writeNpyFile(const EmbeddingMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  writeNpy(m, out);
}

inline EmbeddingMatrix readNpyFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  return readNpy(in);
}

}  // namespace copilot
