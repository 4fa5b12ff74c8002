#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "copilot/generation/generator.hpp"

namespace copilot {

struct Vector {
  std::vector<float> values;

  Vector() = default;
  explicit Vector(std::size_t dim) : values(dim, 0.0f) {}
  explicit Vector(std::vector<float> v) : values(std::move(v)) {}

  std::size_t dim() const noexcept { return values.size(); }
  float operator[](std::size_t i) const noexcept { return values[i]; }

  friend bool operator==(const Vector&, const Vector&) = default;
};

inline constexpr std::size_t kMinEncoderDim = 16;
inline constexpr std::size_t kDefaultEncoderDim = 256;

inline constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Byte trigram counts bucketed by FNV-1a-64 mod dim, L2-normalized. The norm
// and quotients are computed in double and rounded once to float32, so every
// conforming implementation yields the same bits.
inline Vector hashEncode(std::string_view input, std::size_t dim) {
  if (dim < kMinEncoderDim) throw InvalidParam("encoder dimension must be >= 16");
  std::vector<double> counts(dim, 0.0);
  for (std::size_t i = 0; i + 3 <= input.size(); ++i)
    counts[fnv1a64(input.substr(i, 3)) % dim] += 1.0;
  double sq = 0.0;
  for (double c : counts) sq += c * c;
  Vector v(dim);
  if (sq == 0.0) return v;
  const double norm = std::sqrt(sq);
  for (std::size_t j = 0; j < dim; ++j) v.values[j] = static_cast<float>(counts[j] / norm);
  return v;
}

// Text-to-vector encoding.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual Vector encode(std::string_view input) const = 0;
  // 0 when only known after the first call (external encoders).
  virtual std::size_t dim() const noexcept = 0;
};

using EncoderPtr = std::shared_ptr<const Encoder>;

class HashTrigramEncoder final : public Encoder {
 public:
  explicit HashTrigramEncoder(std::size_t dim = kDefaultEncoderDim) : dim_(dim) {
    if (dim_ < kMinEncoderDim) throw InvalidParam("encoder dimension must be >= 16");
  }

  Vector encode(std::string_view input) const override {
    if (input.empty()) throw EmptyInput();
    return hashEncode(input, dim_);
  }
  std::size_t dim() const noexcept override { return dim_; }

 private:
  std::size_t dim_;
};

}  // namespace copilot
