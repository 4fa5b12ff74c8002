#pragma once

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "copilot/kernel/sequent.hpp"

namespace copilot {

// Decision procedure for intuitionistic propositional validity using
// Dyckhoff's contraction-free calculus G4ip. Invertible rules are applied
// eagerly; the non-invertible ones (right disjunction, left nested
// implication) are tried exhaustively. Contexts are sets, which is sound
// because contraction is admissible.
class G4ipProver {
 public:
  bool prove(const Sequent& s) {
    std::vector<Formula> ctx;
    ctx.reserve(s.hypotheses.size());
    for (const auto& h : s.hypotheses) ctx.push_back(h.formula);
    normalize(ctx);
    return solve(std::move(ctx), s.target);
  }

  bool prove(const std::vector<Formula>& hyps, const Formula& goal) {
    std::vector<Formula> ctx = hyps;
    normalize(ctx);
    return solve(std::move(ctx), goal);
  }

  std::size_t cacheSize() const noexcept { return memo_.size(); }

 private:
  using Context = std::vector<Formula>;  // sorted, unique

  struct Key {
    Context ctx;
    Formula goal;
    bool operator==(const Key& o) const { return goal == o.goal && ctx == o.ctx; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::size_t h = k.goal.hash();
      for (const auto& f : k.ctx) h = detail::mixHash(h, f.hash());
      return h;
    }
  };

  static void normalize(Context& ctx) {
    std::sort(ctx.begin(), ctx.end());
    ctx.erase(std::unique(ctx.begin(), ctx.end()), ctx.end());
  }

  static bool contains(const Context& ctx, const Formula& f) {
    return std::binary_search(ctx.begin(), ctx.end(), f);
  }

  static Context without(const Context& ctx, std::size_t idx, std::initializer_list<Formula> add) {
    Context out;
    out.reserve(ctx.size() + add.size());
    for (std::size_t i = 0; i < ctx.size(); ++i)
      if (i != idx) out.push_back(ctx[i]);
    for (const auto& f : add) out.push_back(f);
    normalize(out);
    return out;
  }

  static Context with(const Context& ctx, const Formula& f) {
    if (contains(ctx, f)) return ctx;
    Context out = ctx;
    out.insert(std::upper_bound(out.begin(), out.end(), f), f);
    return out;
  }

  bool solve(Context ctx, const Formula& goal) {
    Key key{std::move(ctx), goal};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const bool result = search(key.ctx, goal);
    memo_.emplace(std::move(key), result);
    return result;
  }

  bool search(const Context& ctx, const Formula& goal) {
    using K = FormulaKind;
    if (goal.is(K::True) || contains(ctx, goal) || contains(ctx, Formula::falsity())) return true;

    // Invertible left rules.
    for (std::size_t i = 0; i < ctx.size(); ++i) {
      const Formula& f = ctx[i];
      switch (f.kind()) {
        case K::True:
          return solve(without(ctx, i, {}), goal);
        case K::And:
          return solve(without(ctx, i, {f.lhs(), f.rhs()}), goal);
        case K::Or:
          return solve(without(ctx, i, {f.lhs()}), goal) &&
                 solve(without(ctx, i, {f.rhs()}), goal);
        case K::Imp: {
          const Formula& a = f.lhs();
          const Formula& b = f.rhs();
          switch (a.kind()) {
            case K::True:
              return solve(without(ctx, i, {b}), goal);
            case K::False:
              return solve(without(ctx, i, {}), goal);
            case K::And:
              return solve(without(ctx, i, {Formula::imp(a.lhs(), Formula::imp(a.rhs(), b))}),
                           goal);
            case K::Or:
              return solve(without(ctx, i, {Formula::imp(a.lhs(), b), Formula::imp(a.rhs(), b)}),
                           goal);
            case K::Atom:
              if (contains(ctx, a)) return solve(without(ctx, i, {b}), goal);
              break;
            default:
              break;
          }
          break;
        }
        default:
          break;
      }
    }

    // Invertible right rules.
    if (goal.is(K::And)) return solve(ctx, goal.lhs()) && solve(ctx, goal.rhs());
    if (goal.is(K::Imp)) return solve(with(ctx, goal.lhs()), goal.rhs());

    // Non-invertible rules.
    if (goal.is(K::Or) && (solve(ctx, goal.lhs()) || solve(ctx, goal.rhs()))) return true;
    for (std::size_t i = 0; i < ctx.size(); ++i) {
      const Formula& f = ctx[i];
      if (!f.is(K::Imp) || !f.lhs().is(K::Imp)) continue;
      const Formula& d = f.lhs().rhs();
      const Formula& b = f.rhs();
      if (solve(without(ctx, i, {Formula::imp(d, b)}), f.lhs()) &&
          solve(without(ctx, i, {b}), goal))
        return true;
    }
    return false;
  }

  std::unordered_map<Key, bool, KeyHash> memo_;
};

// True iff the sequent is intuitionistically derivable.
inline bool decideIPC(const Sequent& s) {
  G4ipProver prover;
  return prover.prove(s);
}

// Lemmas become extra hypotheses.
inline bool decideIPC(const Sequent& s, const LemmaTable& lemmas) {
  std::vector<Formula> ctx;
  for (const auto& h : s.hypotheses) ctx.push_back(h.formula);
  for (const auto& [name, f] : lemmas) ctx.push_back(f);
  G4ipProver prover;
  return prover.prove(ctx, s.target);
}

}  // namespace copilot
