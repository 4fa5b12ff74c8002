#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

#include "copilot/error.hpp"

namespace copilot {

class InvalidParam : public Error {
 public:
  explicit InvalidParam(const std::string& what) : Error("invalid parameter: " + what) {}
};

// Beam-style decoding knobs.
struct GeneratorParams {
  std::size_t numReturnSequences = 4;
  double temperature = 1.0;
  double minScore = 0.0;
  std::size_t maxLength = 256;

  friend bool operator==(const GeneratorParams&, const GeneratorParams&) = default;
};

// Fields left empty inherit from the base configuration.
struct PartialParams {
  std::optional<std::size_t> numReturnSequences;
  std::optional<double> temperature;
  std::optional<double> minScore;
  std::optional<std::size_t> maxLength;
};

inline void validate(const GeneratorParams& p) {
  if (p.numReturnSequences < 1) throw InvalidParam("numReturnSequences must be >= 1");
  if (!(p.temperature > 0.0) || !std::isfinite(p.temperature))
    throw InvalidParam("temperature must be > 0");
  if (!(p.minScore >= 0.0 && p.minScore <= 1.0)) throw InvalidParam("minScore must be in [0, 1]");
  if (p.maxLength < 1) throw InvalidParam("maxLength must be >= 1");
}

inline GeneratorParams mergeParams(const GeneratorParams& base, const PartialParams& override) {
  GeneratorParams out = base;
  if (override.numReturnSequences) out.numReturnSequences = *override.numReturnSequences;
  if (override.temperature) out.temperature = *override.temperature;
  if (override.minScore) out.minScore = *override.minScore;
  if (override.maxLength) out.maxLength = *override.maxLength;
  validate(out);
  return out;
}

}  // namespace copilot
