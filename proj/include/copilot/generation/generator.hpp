#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "copilot/generation/params.hpp"
#include "copilot/kernel/sequent.hpp"

namespace copilot {

class ExternalUnavailable : public Error {
 public:
  explicit ExternalUnavailable(const std::string& what) : Error("external model unavailable: " + what) {}
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what) : Error("protocol error: " + what) {}
};

class EmptyInput : public Error {
 public:
  EmptyInput() : Error("empty input") {}
};

struct ScoredText {
  std::string text;
  double score = 1.0;

  friend bool operator==(const ScoredText&, const ScoredText&) = default;
};

// Result order: score descending, then text ascending.
inline bool scoredBefore(const ScoredText& a, const ScoredText& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.text < b.text;
}

// Enforces the output contract shared by every generator kind: length cap,
// prefix filter, duplicate removal (higher score wins), score floor,
// ordering and truncation to numReturnSequences.
inline std::vector<ScoredText> finalizeOutputs(std::vector<ScoredText> raw,
                                               const GeneratorParams& params,
                                               std::string_view prefix) {
  std::unordered_map<std::string, double> best;
  for (auto& c : raw) {
    if (c.text.size() > params.maxLength) c.text.resize(params.maxLength);
    if (!prefix.empty() && c.text.compare(0, prefix.size(), prefix) != 0) continue;
    if (c.score < params.minScore) continue;
    auto [it, inserted] = best.emplace(c.text, c.score);
    if (!inserted && c.score > it->second) it->second = c.score;
  }
  std::vector<ScoredText> out;
  out.reserve(best.size());
  for (auto& [text, score] : best) out.push_back({text, score});
  std::sort(out.begin(), out.end(), scoredBefore);
  if (out.size() > params.numReturnSequences) out.resize(params.numReturnSequences);
  return out;
}

// score^(1/t), rescaled so the maximum keeps its original value. Monotone,
// so order and argmax are unchanged.
inline void applyTemperature(std::vector<ScoredText>& items, double temperature) {
  if (items.empty() || temperature == 1.0) return;
  double maxOrig = 0.0;
  for (const auto& c : items) maxOrig = std::max(maxOrig, c.score);
  if (maxOrig <= 0.0) return;
  const double exponent = 1.0 / temperature;
  const double maxScaled = std::pow(maxOrig, exponent);
  for (auto& c : items) {
    if (c.score == maxOrig) continue;
    double s = std::pow(c.score, exponent) * (maxOrig / maxScaled);
    c.score = std::clamp(s, 1e-300, 1.0);
  }
}

// Text-to-text generation. Implementations are immutable and may be called
// concurrently.
class Generator {
 public:
  virtual ~Generator() = default;

  virtual std::vector<ScoredText> generate(std::string_view input,
                                           std::string_view prefix = {}) const = 0;

  // Goal-aware entry point; the input text is prettyGoal(goal).
  virtual std::vector<ScoredText> generateForGoal(const Sequent& goal,
                                                  std::string_view prefix = {}) const {
    return generate(prettyGoal(goal), prefix);
  }

  virtual const GeneratorParams& params() const noexcept = 0;
};

using GeneratorPtr = std::shared_ptr<const Generator>;

}  // namespace copilot
