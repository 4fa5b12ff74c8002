#pragma once

// Shared generators and independent oracles for the test suites.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "copilot/kernel.hpp"

namespace copilot::testing {

inline Formula randomFormula(std::mt19937_64& rng, int depth,
                             const std::vector<std::string>& atoms = {"A", "B", "C"}) {
  std::uniform_int_distribution<int> pick(0, 9);
  const int r = pick(rng);
  if (depth <= 0 || r < 3) {
    std::uniform_int_distribution<int> leaf(0, static_cast<int>(atoms.size()) + 1);
    const int l = leaf(rng);
    if (l < static_cast<int>(atoms.size())) return Formula::atom(atoms[l]);
    return l == static_cast<int>(atoms.size()) ? Formula::truth() : Formula::falsity();
  }
  Formula a = randomFormula(rng, depth - 1, atoms);
  Formula b = randomFormula(rng, depth - 1, atoms);
  if (r < 5) return Formula::conj(a, b);
  if (r < 7) return Formula::disj(a, b);
  return Formula::imp(a, b);
}

// Random tactic for the first goal; with probability `applicableBias` the
// tactic is drawn from those that apply without error.
inline Tactic randomTactic(std::mt19937_64& rng, const ProofState& state, const LemmaTable& lemmas,
                           double applicableBias = 0.8) {
  const Sequent& g = state.goals.front();
  std::vector<Tactic> pool;
  pool.push_back(Tactic::intro(freshName(g)));
  pool.push_back(Tactic::of(TacticKind::Assumption));
  pool.push_back(Tactic::of(TacticKind::Split));
  pool.push_back(Tactic::of(TacticKind::Left));
  pool.push_back(Tactic::of(TacticKind::Right));
  pool.push_back(Tactic::of(TacticKind::Trivial));
  pool.push_back(Tactic::of(TacticKind::Exfalso));
  pool.push_back(Tactic::of(TacticKind::Contradiction));
  for (const auto& h : g.hypotheses) {
    pool.push_back(Tactic::exact(h.name));
    pool.push_back(Tactic::apply(h.name));
    pool.push_back(Tactic::cases(h.name));
  }
  for (const auto& [name, f] : lemmas) {
    pool.push_back(Tactic::exact(name));
    pool.push_back(Tactic::apply(name));
  }
  std::bernoulli_distribution biased(applicableBias);
  if (biased(rng)) {
    std::vector<Tactic> ok;
    for (const auto& t : pool)
      if (applyTactic(state, t, lemmas)) ok.push_back(t);
    if (!ok.empty()) pool = std::move(ok);
  }
  std::uniform_int_distribution<std::size_t> idx(0, pool.size() - 1);
  return pool[idx(rng)];
}

// Finite Kripke semantics. A model is a partial order on n worlds plus, for
// each atom, an up-closed set of worlds. A formula forced at every world of
// every model is not refuted; a single failure is an IPC countermodel.
class KripkeOracle {
 public:
  explicit KripkeOracle(int maxWorlds = 3) { enumerateOrders(maxWorlds); }

  // True iff some model with <= maxWorlds worlds refutes `f`.
  bool refutes(const Formula& f) const {
    const std::vector<std::string> atoms = atomsOf(f);
    for (const auto& order : orders_) {
      const int n = order.n;
      std::vector<std::uint32_t> upsets;
      for (std::uint32_t s = 0; s < (1u << n); ++s)
        if (isUpSet(order, s)) upsets.push_back(s);
      std::vector<std::size_t> choice(atoms.size(), 0);
      while (true) {
        std::vector<std::uint32_t> val(atoms.size());
        for (std::size_t i = 0; i < atoms.size(); ++i) val[i] = upsets[choice[i]];
        for (int w = 0; w < n; ++w)
          if (!forced(order, atoms, val, f, w)) return true;
        std::size_t i = 0;
        while (i < choice.size() && ++choice[i] == upsets.size()) choice[i++] = 0;
        if (i == choice.size()) break;
      }
    }
    return false;
  }

 private:
  struct Order {
    int n;
    std::vector<std::uint32_t> above;  // bitmask of worlds >= w
  };

  static bool isUpSet(const Order& o, std::uint32_t s) {
    for (int w = 0; w < o.n; ++w)
      if ((s >> w & 1u) && (o.above[w] & ~s)) return false;
    return true;
  }

  void enumerateOrders(int maxWorlds) {
    for (int n = 1; n <= maxWorlds; ++n) {
      const int pairs = n * n;
      for (std::uint32_t rel = 0; rel < (1u << pairs); ++rel) {
        auto le = [&](int a, int b) { return (rel >> (a * n + b) & 1u) != 0; };
        bool ok = true;
        for (int a = 0; a < n && ok; ++a) {
          if (!le(a, a)) ok = false;
          for (int b = 0; b < n && ok; ++b) {
            if (a != b && le(a, b) && le(b, a)) ok = false;
            for (int c = 0; c < n && ok; ++c)
              if (le(a, b) && le(b, c) && !le(a, c)) ok = false;
          }
        }
        if (!ok) continue;
        Order o{n, std::vector<std::uint32_t>(n, 0)};
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            if (le(a, b)) o.above[a] |= 1u << b;
        orders_.push_back(std::move(o));
      }
    }
  }

  static bool forced(const Order& o, const std::vector<std::string>& atoms,
                     const std::vector<std::uint32_t>& val, const Formula& f, int w) {
    switch (f.kind()) {
      case FormulaKind::True: return true;
      case FormulaKind::False: return false;
      case FormulaKind::Atom: {
        for (std::size_t i = 0; i < atoms.size(); ++i)
          if (atoms[i] == f.name()) return (val[i] >> w & 1u) != 0;
        return false;
      }
      case FormulaKind::And:
        return forced(o, atoms, val, f.lhs(), w) && forced(o, atoms, val, f.rhs(), w);
      case FormulaKind::Or:
        return forced(o, atoms, val, f.lhs(), w) || forced(o, atoms, val, f.rhs(), w);
      case FormulaKind::Imp:
        for (int v = 0; v < o.n; ++v) {
          if (!(o.above[w] >> v & 1u)) continue;
          if (forced(o, atoms, val, f.lhs(), v) && !forced(o, atoms, val, f.rhs(), v)) return false;
        }
        return true;
    }
    return false;
  }

  std::vector<Order> orders_;
};

// Every tactic the kernel could meaningfully try on the first goal, with all
// hypothesis and lemma arguments enumerated.
inline std::vector<Tactic> allTactics(const Sequent& g, const LemmaTable& lemmas) {
  std::vector<Tactic> out{Tactic::intro(freshName(g)),          Tactic::of(TacticKind::Assumption),
                          Tactic::of(TacticKind::Split),        Tactic::of(TacticKind::Left),
                          Tactic::of(TacticKind::Right),        Tactic::of(TacticKind::Trivial),
                          Tactic::of(TacticKind::Exfalso),      Tactic::of(TacticKind::Contradiction)};
  for (const auto& h : g.hypotheses) {
    out.push_back(Tactic::exact(h.name));
    out.push_back(Tactic::apply(h.name));
    out.push_back(Tactic::cases(h.name));
  }
  for (const auto& [name, f] : lemmas) {
    out.push_back(Tactic::exact(name));
    out.push_back(Tactic::apply(name));
  }
  return out;
}

// Plain depth-bounded exhaustive search over scripts, with no memo and no
// pruning: true iff some sorry-free script of at most `depth` steps closes
// every goal of `state`.
inline bool provableWithin(const ProofState& state, const LemmaTable& lemmas, int depth) {
  if (state.goals.empty()) return true;
  if (depth == 0) return false;
  for (const auto& t : allTactics(state.goals.front(), lemmas)) {
    auto r = applyTactic(state, t, lemmas);
    // Each remaining goal needs at least one more step.
    if (r && r->goals.size() <= static_cast<std::size_t>(depth - 1) &&
        provableWithin(*r, lemmas, depth - 1))
      return true;
  }
  return false;
}

// Every canonical formula with at most `maxSize` nodes over the given atoms
// plus True and False, grouped by size.
inline std::vector<Formula> enumerateFormulas(std::size_t maxSize,
                                              const std::vector<std::string>& atoms = {"A", "B", "C"}) {
  std::vector<std::vector<Formula>> bySize(maxSize + 1);
  for (const auto& a : atoms) bySize[1].push_back(Formula::atom(a));
  bySize[1].push_back(Formula::truth());
  bySize[1].push_back(Formula::falsity());
  for (std::size_t n = 3; n <= maxSize; ++n)
    for (std::size_t l = 1; l + 1 < n; ++l)
      for (const auto& a : bySize[l])
        for (const auto& b : bySize[n - 1 - l]) {
          bySize[n].push_back(Formula::conj(a, b));
          bySize[n].push_back(Formula::disj(a, b));
          bySize[n].push_back(Formula::imp(a, b));
        }
  std::vector<Formula> out;
  for (const auto& group : bySize) out.insert(out.end(), group.begin(), group.end());
  return out;
}

// The sequent as a single implication h1 -> h2 -> ... -> target.
inline Formula asImplication(const Sequent& s) {
  Formula f = s.target;
  for (auto it = s.hypotheses.rbegin(); it != s.hypotheses.rend(); ++it)
    f = Formula::imp(it->formula, f);
  return f;
}

}  // namespace copilot::testing
