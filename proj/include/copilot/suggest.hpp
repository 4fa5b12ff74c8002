#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "copilot/generation/generator.hpp"
#include "copilot/kernel/apply.hpp"

namespace copilot {

enum class SuggestionCategory {
  ProofClosing,  // resulting state has no goals
  ValidStep,     // no error, goals remain
};

inline std::string_view categoryName(SuggestionCategory c) {
  return c == SuggestionCategory::ProofClosing ? "ProofClosing" : "ValidStep";
}

struct Suggestion {
  std::string tacticText;
  // Empty when checking was turned off.
  std::optional<SuggestionCategory> category;
  std::vector<Sequent> remainingGoals;
  double score = 1.0;
};

struct SuggestionSet {
  std::vector<Suggestion> suggestions;
  bool checked = true;

  bool hasProofClosing() const {
    return std::any_of(suggestions.begin(), suggestions.end(), [](const Suggestion& s) {
      return s.category == SuggestionCategory::ProofClosing;
    });
  }
};

// Categorization of one candidate against a state.
struct Rejected {
  // Empty when the text is not a single well-formed tactic.
  std::optional<TacticErrorKind> kind;
  std::string message;
};
struct ValidStep {
  std::vector<Sequent> goals;
};
struct ProofClosing {};

using Category = std::variant<Rejected, ValidStep, ProofClosing>;

// Whitespace runs collapse to one space; leading/trailing blanks dropped.
inline std::string normalizeTacticText(std::string_view text) {
  std::string out;
  bool pendingSpace = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      pendingSpace = !out.empty();
      continue;
    }
    if (pendingSpace) out += ' ';
    pendingSpace = false;
    out += c;
  }
  return out;
}

inline Category categorize(const ProofState& state, std::string_view tacticText,
                           const LemmaTable& lemmas) {
  if (state.goals.empty()) return Rejected{TacticErrorKind::NoGoals, "no goals"};
  Tactic tactic;
  try {
    tactic = parseTactic(tacticText);
  } catch (const SyntaxError& e) {
    return Rejected{std::nullopt, e.what()};
  }
  StepResult r = applyTactic(state, tactic, lemmas);
  if (!r) return Rejected{r.error().kind, r.error().message};
  if (r->goals.empty()) return ProofClosing{};
  return ValidStep{std::move(r->goals)};
}

// Orders green (proof-closing) before blue (valid step), then by score
// descending, then by text.
inline bool suggestionBefore(const Suggestion& a, const Suggestion& b) {
  const int ca = a.category == SuggestionCategory::ProofClosing ? 0 : 1;
  const int cb = b.category == SuggestionCategory::ProofClosing ? 0 : 1;
  if (ca != cb) return ca < cb;
  if (a.score != b.score) return a.score > b.score;
  return a.tacticText < b.tacticText;
}

// Generator input is the rendered first goal; candidates are checked against
// the full state. Generator exceptions propagate.
inline SuggestionSet suggestTactics(const ProofState& state, const Generator& generator,
                                    const LemmaTable& lemmas, bool check = true) {
  if (state.goals.empty()) throw NoGoalsError();
  const std::vector<ScoredText> candidates = generator.generateForGoal(state.goals.front());

  // Dedup on normalized text, keeping the higher score.
  std::vector<ScoredText> unique;
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto& c : candidates) {
    std::string key = normalizeTacticText(c.text);
    if (auto it = seen.find(key); it != seen.end()) {
      unique[it->second].score = std::max(unique[it->second].score, c.score);
      continue;
    }
    seen.emplace(key, unique.size());
    unique.push_back({std::move(key), c.score});
  }

  SuggestionSet out;
  out.checked = check;
  for (const auto& c : unique) {
    if (!check) {
      out.suggestions.push_back({c.text, std::nullopt, {}, c.score});
      continue;
    }
    Category cat = categorize(state, c.text, lemmas);
    if (std::holds_alternative<ProofClosing>(cat)) {
      out.suggestions.push_back({c.text, SuggestionCategory::ProofClosing, {}, c.score});
    } else if (auto* step = std::get_if<ValidStep>(&cat)) {
      out.suggestions.push_back(
          {c.text, SuggestionCategory::ValidStep, std::move(step->goals), c.score});
    }
  }
  if (check) {
    std::sort(out.suggestions.begin(), out.suggestions.end(), suggestionBefore);
  } else {
    std::sort(out.suggestions.begin(), out.suggestions.end(),
              [](const Suggestion& a, const Suggestion& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.tacticText < b.tacticText;
              });
  }
  return out;
}

}  // namespace copilot
