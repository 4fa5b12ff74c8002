#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "copilot/kernel/formula.hpp"

namespace copilot {

struct Hypothesis {
  std::string name;
  Formula formula;

  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

// Ordered hypotheses plus a target. Hypothesis names are unique.
struct Sequent {
  std::vector<Hypothesis> hypotheses;
  Formula target;

  Sequent() = default;
  explicit Sequent(Formula t) : target(std::move(t)) {}
  Sequent(std::vector<Hypothesis> hyps, Formula t)
      : hypotheses(std::move(hyps)), target(std::move(t)) {}

  const Hypothesis* find(std::string_view name) const {
    for (const auto& h : hypotheses)
      if (h.name == name) return &h;
    return nullptr;
  }
  bool binds(std::string_view name) const { return find(name) != nullptr; }

  std::size_t hash() const noexcept {
    std::size_t h = target.hash();
    for (const auto& hyp : hypotheses) {
      h = detail::mixHash(h, std::hash<std::string>{}(hyp.name));
      h = detail::mixHash(h, hyp.formula.hash());
    }
    return h;
  }

  friend bool operator==(const Sequent& a, const Sequent& b) {
    return a.target == b.target && a.hypotheses == b.hypotheses;
  }
};

// Name -> statement of the lemmas visible to a proof.
using LemmaTable = std::map<std::string, Formula, std::less<>>;

// Proof state over an ordered goal list; the first goal is focused.
struct ProofState {
  std::vector<Sequent> goals;
  std::vector<std::string> scope;
  bool usedSorry = false;

  ProofState() = default;
  explicit ProofState(Sequent goal, std::vector<std::string> inScope = {})
      : scope(std::move(inScope)) {
    goals.push_back(std::move(goal));
  }

  bool complete() const noexcept { return goals.empty(); }

  friend bool operator==(const ProofState&, const ProofState&) = default;
};

inline std::vector<std::string> scopeNames(const LemmaTable& lemmas) {
  std::vector<std::string> out;
  out.reserve(lemmas.size());
  for (const auto& [name, f] : lemmas) out.push_back(name);
  return out;
}

// UTF-8 turnstile; appears in rendered goals only.
inline constexpr std::string_view kTurnstile = "\xE2\x8A\xA2";

// `h1 : F1, h2 : F2 ⊢ T`. Byte-stable: this is the generator/encoder input.
inline std::string prettyGoal(const Sequent& s) {
  std::string out;
  for (std::size_t i = 0; i < s.hypotheses.size(); ++i) {
    if (i) out += ", ";
    out += s.hypotheses[i].name;
    out += " : ";
    out += toString(s.hypotheses[i].formula);
  }
  if (!s.hypotheses.empty()) out += ' ';
  out += kTurnstile;
  out += ' ';
  out += toString(s.target);
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace detail

// Inverse of prettyGoal. Formulas contain no commas, so hypotheses split on ','.
inline Sequent parseSequent(std::string_view text) {
  const auto turn = text.find(kTurnstile);
  if (turn == std::string_view::npos)
    throw SyntaxError("missing turnstile", 1, 1, {"'\xE2\x8A\xA2'"});
  Sequent s;
  const std::string_view hyps = text.substr(0, turn);
  std::size_t start = 0;
  if (!detail::trim(hyps).empty()) {
    while (start <= hyps.size()) {
      std::size_t comma = hyps.find(',', start);
      if (comma == std::string_view::npos) comma = hyps.size();
      const std::string_view item = hyps.substr(start, comma - start);
      const auto colon = item.find(':');
      if (colon == std::string_view::npos)
        throw SyntaxError("hypothesis without ':'", 1, start + 1, {"':'"});
      const std::string name(detail::trim(item.substr(0, colon)));
      if (!isReferenceName(name))
        throw SyntaxError("bad hypothesis name '" + name + "'", 1, start + 1, {"identifier"});
      if (s.binds(name)) throw DuplicateName(name);
      s.hypotheses.push_back(
          {name, parseFormula(item.substr(colon + 1), {1, start + colon + 2})});
      start = comma + 1;
    }
  }
  const std::size_t targetStart = turn + kTurnstile.size();
  s.target = parseFormula(text.substr(targetStart), {1, targetStart + 1});
  return s;
}

// Fresh hypothesis name: `h`, then `h1`, `h2`, ...
inline std::string freshName(const Sequent& s, std::string_view base = "h") {
  std::string candidate(base);
  for (std::size_t i = 1; s.binds(candidate); ++i) candidate = std::string(base) + std::to_string(i);
  return candidate;
}

}  // namespace copilot

template <>
struct std::hash<copilot::Sequent> {
  std::size_t operator()(const copilot::Sequent& s) const noexcept { return s.hash(); }
};
