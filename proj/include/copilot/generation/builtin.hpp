#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "copilot/generation/generator.hpp"
#include "copilot/kernel/apply.hpp"

namespace copilot {

// Fixed score table of the builtin heuristic generator.
namespace builtin_scores {
inline constexpr double kTrivial = 0.99;
inline constexpr double kExactHypothesis = 0.95;
inline constexpr double kAssumption = 0.90;
inline constexpr double kIntro = 0.85;
inline constexpr double kSplit = 0.85;
inline constexpr double kApply = 0.80;
inline constexpr double kContradiction = 0.70;
inline constexpr double kCases = 0.65;
inline constexpr double kLeft = 0.60;
inline constexpr double kRight = 0.55;
inline constexpr double kExfalso = 0.10;
}  // namespace builtin_scores

namespace detail {

// Candidates before temperature and truncation.
inline std::vector<ScoredText> builtinCandidates(const Sequent& goal, const LemmaTable& lemmas) {
  namespace s = builtin_scores;
  using K = FormulaKind;
  std::vector<ScoredText> out;
  const Formula& target = goal.target;
  const ProofState state(goal);
  auto applies = [&](const Tactic& t) { return applyTactic(state, t, lemmas).has_value(); };

  if (target.is(K::True)) out.push_back({"trivial", s::kTrivial});

  bool matched = false;
  for (const auto& h : goal.hypotheses) {
    if (h.formula == target) {
      out.push_back({"exact " + h.name, s::kExactHypothesis});
      matched = true;
    }
  }
  if (matched) out.push_back({"assumption", s::kAssumption});

  if (target.is(K::Imp)) out.push_back({"intro " + freshName(goal), s::kIntro});
  if (target.is(K::And)) out.push_back({"split", s::kSplit});

  // Hypotheses whose statement already equals the target are covered by exact.
  for (const auto& h : goal.hypotheses)
    if (h.formula != target && applies(Tactic::apply(h.name)))
      out.push_back({"apply " + h.name, s::kApply});
  for (const auto& [name, f] : lemmas)
    if (!goal.binds(name) && applies(Tactic::apply(name)))
      out.push_back({"apply " + name, s::kApply});

  if (target.is(K::Or)) {
    out.push_back({"left", s::kLeft});
    out.push_back({"right", s::kRight});
  }
  if (applies(Tactic::of(TacticKind::Contradiction)))
    out.push_back({"contradiction", s::kContradiction});
  for (const auto& h : goal.hypotheses)
    if (applies(Tactic::cases(h.name))) out.push_back({"cases " + h.name, s::kCases});

  out.push_back({"exfalso", s::kExfalso});
  return out;
}

}  // namespace detail

// Deterministic goal-shape heuristic standing in for a learned tactic model.
inline std::vector<ScoredText> builtinSuggest(std::string_view goalText, const Sequent& parsedGoal,
                                              const LemmaTable& lemmas,
                                              const GeneratorParams& params,
                                              std::string_view prefix = {}) {
  if (goalText.empty()) throw EmptyInput();
  std::vector<ScoredText> raw = detail::builtinCandidates(parsedGoal, lemmas);
  applyTemperature(raw, params.temperature);
  return finalizeOutputs(std::move(raw), params, prefix);
}

class BuiltinGenerator final : public Generator {
 public:
  explicit BuiltinGenerator(GeneratorParams params = {}, LemmaTable lemmas = {})
      : params_(params), lemmas_(std::move(lemmas)) {
    validate(params_);
  }

  // Input that does not parse as a rendered goal yields no candidates.
  std::vector<ScoredText> generate(std::string_view input,
                                   std::string_view prefix = {}) const override {
    if (input.empty()) throw EmptyInput();
    Sequent goal;
    try {
      goal = parseSequent(input);
    } catch (const Error&) {
      return {};
    }
    return builtinSuggest(input, goal, lemmas_, params_, prefix);
  }

  std::vector<ScoredText> generateForGoal(const Sequent& goal,
                                          std::string_view prefix = {}) const override {
    std::vector<ScoredText> raw = detail::builtinCandidates(goal, lemmas_);
    applyTemperature(raw, params_.temperature);
    return finalizeOutputs(std::move(raw), params_, prefix);
  }

  const GeneratorParams& params() const noexcept override { return params_; }
  const LemmaTable& lemmas() const noexcept { return lemmas_; }

 private:
  GeneratorParams params_;
  LemmaTable lemmas_;
};

}  // namespace copilot
