#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "copilot/expected.hpp"
#include "copilot/kernel/sequent.hpp"
#include "copilot/kernel/tactic.hpp"

namespace copilot {

enum class TacticErrorKind : std::uint8_t {
  NoGoals,
  TargetShape,       // target has the wrong connective for the tactic
  NameClash,         // intro/cases would bind an existing name
  UnknownReference,  // no hypothesis or lemma by that name
  Mismatch,          // exact: statement differs from the target
  NoMatchingHypothesis,
  ApplyMismatch,     // no antecedent prefix ends in the target
  NotDestructible,
  NoContradiction,
};

inline constexpr std::string_view errorKindName(TacticErrorKind k) {
  switch (k) {
    case TacticErrorKind::NoGoals: return "NoGoals";
    case TacticErrorKind::TargetShape: return "TargetShape";
    case TacticErrorKind::NameClash: return "NameClash";
    case TacticErrorKind::UnknownReference: return "UnknownReference";
    case TacticErrorKind::Mismatch: return "Mismatch";
    case TacticErrorKind::NoMatchingHypothesis: return "NoMatchingHypothesis";
    case TacticErrorKind::ApplyMismatch: return "ApplyMismatch";
    case TacticErrorKind::NotDestructible: return "NotDestructible";
    case TacticErrorKind::NoContradiction: return "NoContradiction";
  }
  return "";
}

struct TacticError {
  TacticErrorKind kind;
  std::string message;

  friend bool operator==(const TacticError&, const TacticError&) = default;
};

using StepResult = Expected<ProofState, TacticError>;

namespace detail {

inline Unexpected<TacticError> tacticError(TacticErrorKind kind, std::string msg) {
  return {TacticError{kind, std::move(msg)}};
}

// Hypotheses shadow lemmas.
inline const Formula* resolve(const Sequent& goal, std::string_view ref,
                              const LemmaTable& lemmas) {
  if (const Hypothesis* h = goal.find(ref)) return &h->formula;
  if (auto it = lemmas.find(ref); it != lemmas.end()) return &it->second;
  return nullptr;
}

// Replaces the focused goal with `replacement`, keeping the rest in order.
inline ProofState replaceFirst(const ProofState& state, std::vector<Sequent> replacement) {
  ProofState next;
  next.scope = state.scope;
  next.usedSorry = state.usedSorry;
  next.goals.reserve(replacement.size() + state.goals.size() - 1);
  for (auto& g : replacement) next.goals.push_back(std::move(g));
  next.goals.insert(next.goals.end(), state.goals.begin() + 1, state.goals.end());
  return next;
}

}  // namespace detail

// Applies one tactic to the first goal. Pure: `state` is never modified.
inline StepResult applyTactic(const ProofState& state, const Tactic& tactic,
                              const LemmaTable& lemmas) {
  using detail::tacticError;
  using K = TacticErrorKind;
  if (state.goals.empty()) return tacticError(K::NoGoals, "no goals");
  const Sequent& goal = state.goals.front();
  const Formula& target = goal.target;
  const std::string kw(tacticKeyword(tactic.kind));

  switch (tactic.kind) {
    case TacticKind::Intro: {
      if (!target.is(FormulaKind::Imp))
        return tacticError(K::TargetShape, "intro: target is not an implication");
      if (goal.binds(tactic.arg))
        return tacticError(K::NameClash, "intro: '" + tactic.arg + "' is already bound");
      Sequent next = goal;
      next.hypotheses.push_back({tactic.arg, target.lhs()});
      next.target = target.rhs();
      return detail::replaceFirst(state, {std::move(next)});
    }
    case TacticKind::Exact: {
      const Formula* f = detail::resolve(goal, tactic.arg, lemmas);
      if (!f) return tacticError(K::UnknownReference, "exact: unknown '" + tactic.arg + "'");
      if (*f != target)
        return tacticError(K::Mismatch, "exact: '" + tactic.arg + "' does not match the target");
      return detail::replaceFirst(state, {});
    }
    case TacticKind::Assumption: {
      for (const auto& h : goal.hypotheses)
        if (h.formula == target) return detail::replaceFirst(state, {});
      return tacticError(K::NoMatchingHypothesis, "assumption: no hypothesis matches");
    }
    case TacticKind::Apply: {
      const Formula* f = detail::resolve(goal, tactic.arg, lemmas);
      if (!f) return tacticError(K::UnknownReference, "apply: unknown '" + tactic.arg + "'");
      std::vector<Sequent> subgoals;
      const Formula* cur = f;
      while (*cur != target) {
        if (!cur->is(FormulaKind::Imp))
          return tacticError(K::ApplyMismatch,
                             "apply: '" + tactic.arg + "' does not conclude the target");
        subgoals.emplace_back(goal.hypotheses, cur->lhs());
        cur = &cur->rhs();
      }
      return detail::replaceFirst(state, std::move(subgoals));
    }
    case TacticKind::Split: {
      if (!target.is(FormulaKind::And))
        return tacticError(K::TargetShape, "split: target is not a conjunction");
      return detail::replaceFirst(
          state, {Sequent(goal.hypotheses, target.lhs()), Sequent(goal.hypotheses, target.rhs())});
    }
    case TacticKind::Left:
    case TacticKind::Right: {
      if (!target.is(FormulaKind::Or))
        return tacticError(K::TargetShape, kw + ": target is not a disjunction");
      const Formula& side = tactic.kind == TacticKind::Left ? target.lhs() : target.rhs();
      return detail::replaceFirst(state, {Sequent(goal.hypotheses, side)});
    }
    case TacticKind::Cases: {
      std::size_t idx = goal.hypotheses.size();
      for (std::size_t i = 0; i < goal.hypotheses.size(); ++i)
        if (goal.hypotheses[i].name == tactic.arg) idx = i;
      if (idx == goal.hypotheses.size())
        return tacticError(K::UnknownReference, "cases: no hypothesis '" + tactic.arg + "'");
      const Formula& f = goal.hypotheses[idx].formula;
      switch (f.kind()) {
        case FormulaKind::And: {
          const std::string n1 = tactic.arg + ".1";
          const std::string n2 = tactic.arg + ".2";
          if (goal.binds(n1) || goal.binds(n2))
            return tacticError(K::NameClash, "cases: '" + n1 + "' or '" + n2 + "' is bound");
          Sequent next;
          next.target = target;
          next.hypotheses.reserve(goal.hypotheses.size() + 1);
          for (std::size_t i = 0; i < goal.hypotheses.size(); ++i)
            if (i != idx) next.hypotheses.push_back(goal.hypotheses[i]);
          next.hypotheses.push_back({n1, f.lhs()});
          next.hypotheses.push_back({n2, f.rhs()});
          return detail::replaceFirst(state, {std::move(next)});
        }
        case FormulaKind::Or: {
          Sequent a = goal;
          Sequent b = goal;
          a.hypotheses[idx].formula = f.lhs();
          b.hypotheses[idx].formula = f.rhs();
          return detail::replaceFirst(state, {std::move(a), std::move(b)});
        }
        case FormulaKind::False:
          return detail::replaceFirst(state, {});
        default:
          return tacticError(K::NotDestructible,
                             "cases: '" + tactic.arg + "' is not a conjunction, disjunction or False");
      }
    }
    case TacticKind::Trivial: {
      if (!target.is(FormulaKind::True))
        return tacticError(K::TargetShape, "trivial: target is not True");
      return detail::replaceFirst(state, {});
    }
    case TacticKind::Exfalso: {
      Sequent next = goal;
      next.target = Formula::falsity();
      return detail::replaceFirst(state, {std::move(next)});
    }
    case TacticKind::Contradiction: {
      for (const auto& h : goal.hypotheses) {
        if (h.formula.is(FormulaKind::False)) return detail::replaceFirst(state, {});
      }
      for (const auto& h : goal.hypotheses) {
        if (!h.formula.is(FormulaKind::Imp) || !h.formula.rhs().is(FormulaKind::False)) continue;
        for (const auto& g : goal.hypotheses)
          if (g.formula == h.formula.lhs()) return detail::replaceFirst(state, {});
      }
      return tacticError(K::NoContradiction, "contradiction: no contradictory hypotheses");
    }
    case TacticKind::Sorry: {
      ProofState next = detail::replaceFirst(state, {});
      next.usedSorry = true;
      return next;
    }
  }
  return tacticError(K::TargetShape, "unknown tactic");
}

struct ProofOutcome {
  enum class Status : std::uint8_t { Proved, Open, Failed };

  Status status = Status::Proved;
  std::vector<Sequent> remaining;  // Open only
  std::size_t failedStep = 0;      // Failed only, 0-based
  std::optional<TacticError> error;
  bool usedSorry = false;

  bool proved() const noexcept { return status == Status::Proved; }
  bool provedWithoutSorry() const noexcept { return proved() && !usedSorry; }
};

inline std::string_view statusName(ProofOutcome::Status s) {
  switch (s) {
    case ProofOutcome::Status::Proved: return "Proved";
    case ProofOutcome::Status::Open: return "Open";
    case ProofOutcome::Status::Failed: return "Failed";
  }
  return "";
}

// Folds applyTactic over the steps starting from `state`.
inline ProofOutcome runScript(ProofState state, const TacticScript& script,
                              const LemmaTable& lemmas) {
  ProofOutcome out;
  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    StepResult r = applyTactic(state, script.steps[i], lemmas);
    if (!r) {
      out.status = ProofOutcome::Status::Failed;
      out.failedStep = i;
      out.error = r.error();
      out.usedSorry = state.usedSorry;
      return out;
    }
    state = std::move(r).value();
  }
  out.usedSorry = state.usedSorry;
  if (state.goals.empty()) {
    out.status = ProofOutcome::Status::Proved;
  } else {
    out.status = ProofOutcome::Status::Open;
    out.remaining = std::move(state.goals);
  }
  return out;
}

inline ProofOutcome runScript(const Sequent& goal, const TacticScript& script,
                              const LemmaTable& lemmas) {
  return runScript(ProofState(goal, scopeNames(lemmas)), script, lemmas);
}

}  // namespace copilot
