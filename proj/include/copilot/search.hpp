#pragma once

// Best-first search over an AND-OR tree. OR-nodes are goals, AND-nodes are
// tactic applications. A goal is proved when any tactic child is proved; a
// tactic is proved when all of its subgoals are (vacuously when it closes the
// goal outright). Child priority is the parent's priority times the score of
// the tactic that produced it.

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "copilot/generation/spec.hpp"
#include "copilot/kernel/apply.hpp"
#include "copilot/suggest.hpp"

namespace copilot {

enum class ArgStrategy { None, Fixed, EachHypothesis, EachLemma, FreshName };

struct Rule {
  TacticKind kind;
  ArgStrategy strategy = ArgStrategy::None;
  double priority = 1.0;
  std::string fixedArg;
};

struct RuleSet {
  std::vector<Rule> rules;
  bool useGenerator = false;
};

inline RuleSet defaultRuleSet() {
  using A = ArgStrategy;
  using T = TacticKind;
  return RuleSet{{
                     {T::Assumption, A::None, 0.9},
                     {T::Trivial, A::None, 0.9},
                     {T::Contradiction, A::None, 0.8},
                     {T::Intro, A::FreshName, 0.8},
                     {T::Split, A::None, 0.8},
                     {T::Cases, A::EachHypothesis, 0.6},
                     {T::Apply, A::EachHypothesis, 0.6},
                     {T::Apply, A::EachLemma, 0.5},
                     {T::Left, A::None, 0.4},
                     {T::Right, A::None, 0.4},
                     {T::Exfalso, A::None, 0.1},
                 },
                 false};
}

struct SearchLimits {
  std::size_t maxExpansions = 400;
  std::size_t maxDepth = 20;
  std::int64_t timeoutMillis = 5000;
};

enum class NodeStatus : std::uint8_t { Unexpanded, Expanded, Proved, Failed };

inline constexpr std::size_t kNoNode = static_cast<std::size_t>(-1);

struct GoalNode {
  Sequent sequent;
  std::size_t sequentHash = 0;
  double priority = 1.0;
  NodeStatus status = NodeStatus::Unexpanded;
  std::vector<std::size_t> children;  // TacticNode ids
  std::size_t parent = kNoNode;       // TacticNode id
  std::size_t depth = 0;
  std::uint64_t sequence = 0;
  std::size_t provedBy = kNoNode;     // TacticNode id that proved this goal
  std::size_t memoSource = kNoNode;   // identical goal proved elsewhere
};

struct TacticNode {
  Tactic tactic;
  double ruleScore = 1.0;
  std::vector<std::size_t> children;  // GoalNode ids
  std::size_t parent = kNoNode;       // GoalNode id
  NodeStatus status = NodeStatus::Expanded;
};

// A successful candidate tactic for one goal.
struct Expansion {
  Tactic tactic;
  double score = 1.0;
  std::vector<Sequent> subgoals;
};

class NotProved : public Error {
 public:
  NotProved() : Error("search tree root is not proved") {}
};

namespace detail {

inline void instantiate(const Rule& rule, const Sequent& goal, const LemmaTable& lemmas,
                        const std::function<void(Tactic, double)>& emit) {
  switch (rule.strategy) {
    case ArgStrategy::None:
      emit(Tactic{rule.kind, {}}, rule.priority);
      break;
    case ArgStrategy::Fixed:
      emit(Tactic{rule.kind, rule.fixedArg}, rule.priority);
      break;
    case ArgStrategy::FreshName:
      emit(Tactic{rule.kind, freshName(goal)}, rule.priority);
      break;
    case ArgStrategy::EachHypothesis:
      for (const auto& h : goal.hypotheses) emit(Tactic{rule.kind, h.name}, rule.priority);
      break;
    case ArgStrategy::EachLemma:
      for (const auto& [name, f] : lemmas)
        if (!goal.binds(name)) emit(Tactic{rule.kind, name}, rule.priority);
      break;
  }
}

}  // namespace detail

// Per-search generator front end: caches suggestions per goal text and turns
// itself off after the model becomes unreachable.
class GeneratorCache {
 public:
  explicit GeneratorCache(const Generator* gen) : gen_(gen) {}

  const std::vector<ScoredText>& lookup(const Sequent& goal, std::vector<std::string>& warnings) {
    static const std::vector<ScoredText> kEmpty;
    if (!gen_ || disabled_) return kEmpty;
    std::string key = prettyGoal(goal);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    std::vector<ScoredText> out;
    try {
      out = gen_->generateForGoal(goal);
    } catch (const ExternalUnavailable& e) {
      warnings.push_back(std::string("generator disabled: ") + e.what());
      disabled_ = true;
      return kEmpty;
    } catch (const Error& e) {
      warnings.push_back(std::string("generator error on '") + key + "': " + e.what());
    }
    return cache_.emplace(std::move(key), std::move(out)).first->second;
  }

 private:
  const Generator* gen_;
  bool disabled_ = false;
  std::unordered_map<std::string, std::vector<ScoredText>> cache_;
};

// Candidate tactics for one goal: the instantiated rule set plus (optionally)
// parsed generator suggestions, max-merged on tactic text. Only candidates
// that apply without error are returned, ordered by score then text.
inline std::vector<Expansion> expandGoal(const Sequent& goal, const RuleSet& rules,
                                         GeneratorCache* generator, const LemmaTable& lemmas,
                                         std::vector<std::string>& warnings) {
  struct Candidate {
    Tactic tactic;
    double score;
  };
  std::vector<Candidate> candidates;
  std::unordered_map<std::string, std::size_t> byText;
  auto add = [&](Tactic t, double score) {
    std::string key = toString(t);
    if (auto it = byText.find(key); it != byText.end()) {
      candidates[it->second].score = std::max(candidates[it->second].score, score);
      return;
    }
    byText.emplace(std::move(key), candidates.size());
    candidates.push_back({std::move(t), score});
  };
  for (const auto& rule : rules.rules) detail::instantiate(rule, goal, lemmas, add);
  if (rules.useGenerator && generator) {
    for (const auto& s : generator->lookup(goal, warnings)) {
      try {
        add(parseTactic(s.text), s.score);
      } catch (const SyntaxError&) {
      }
    }
  }

  std::vector<Expansion> out;
  const ProofState state(goal);
  for (auto& c : candidates) {
    StepResult r = applyTactic(state, c.tactic, lemmas);
    if (!r) continue;
    out.push_back({std::move(c.tactic), c.score, std::move(r->goals)});
  }
  std::stable_sort(out.begin(), out.end(), [](const Expansion& a, const Expansion& b) {
    if (a.score != b.score) return a.score > b.score;
    return toString(a.tactic) < toString(b.tactic);
  });
  return out;
}

struct SearchResult {
  enum class Status : std::uint8_t { ProofFound, Exhausted, TimedOut };

  Status status = Status::Exhausted;
  TacticScript script;  // ProofFound only
  std::size_t expansions = 0;
  std::int64_t elapsedMillis = 0;
  std::vector<std::string> warnings;

  bool found() const noexcept { return status == Status::ProofFound; }
};

inline std::string_view statusName(SearchResult::Status s) {
  switch (s) {
    case SearchResult::Status::ProofFound: return "ProofFound";
    case SearchResult::Status::Exhausted: return "Exhausted";
    case SearchResult::Status::TimedOut: return "TimedOut";
  }
  return "";
}

// Owns one search tree. Single-writer; build a new instance per search.
class ProofSearch {
 public:
  struct Observer {
    // Called with the id of each goal just popped for expansion.
    std::function<void(const ProofSearch&, std::size_t)> onPop;
    // Called after each expansion and status propagation.
    std::function<void(const ProofSearch&)> onExpanded;
  };

  ProofSearch(Sequent goal, RuleSet rules, const Generator* generator, LemmaTable lemmas,
              SearchLimits limits)
      : rules_(std::move(rules)),
        generator_(generator),
        lemmas_(std::move(lemmas)),
        limits_(limits),
        cache_(generator) {
    GoalNode root;
    root.sequentHash = goal.hash();
    root.sequent = std::move(goal);
    root.priority = 1.0;
    root.sequence = nextSequence_++;
    goals_.push_back(std::move(root));
    frontier_.push({1.0, goals_[0].sequence, 0});
  }

  SearchResult run(const Observer* observer = nullptr) {
    const auto start = std::chrono::steady_clock::now();
    const auto deadline = start + std::chrono::milliseconds(limits_.timeoutMillis);
    SearchResult result;
    auto finish = [&](SearchResult::Status status) {
      result.status = status;
      result.expansions = expansions_;
      result.elapsedMillis = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
      result.warnings = warnings_;
      if (status == SearchResult::Status::ProofFound) result.script = extractScript();
      return result;
    };
    while (true) {
      if (goals_[0].status == NodeStatus::Proved) return finish(SearchResult::Status::ProofFound);
      if (goals_[0].status == NodeStatus::Failed) return finish(SearchResult::Status::Exhausted);
      const std::size_t id = popLive();
      if (id == kNoNode) return finish(SearchResult::Status::Exhausted);
      if (auto it = proved_.find(goals_[id].sequent); it != proved_.end()) {
        goals_[id].memoSource = it->second;
        resolveGoal(id, NodeStatus::Proved, kNoNode);
        continue;
      }
      if (expansions_ >= limits_.maxExpansions || std::chrono::steady_clock::now() >= deadline) {
        frontier_.push({goals_[id].priority, goals_[id].sequence, id});
        return finish(SearchResult::Status::TimedOut);
      }
      if (observer && observer->onPop) observer->onPop(*this, id);
      expand(id);
      ++expansions_;
      if (observer && observer->onExpanded) observer->onExpanded(*this);
    }
  }

  // Depth-first, left-to-right linearization of the proof below the root.
  TacticScript extractScript() const {
    if (goals_[0].status != NodeStatus::Proved) throw NotProved();
    std::vector<Tactic> steps;
    emit(0, steps);
    return makeScript(std::move(steps));
  }

  const std::vector<GoalNode>& goals() const noexcept { return goals_; }
  const std::vector<TacticNode>& tactics() const noexcept { return tactics_; }
  const GoalNode& root() const noexcept { return goals_[0]; }
  std::size_t expansions() const noexcept { return expansions_; }

  // Unexpanded and not below an already-resolved goal or tactic.
  bool isLive(std::size_t goalId) const {
    if (goals_[goalId].status != NodeStatus::Unexpanded) return false;
    std::size_t t = goals_[goalId].parent;
    while (t != kNoNode) {
      if (tactics_[t].status != NodeStatus::Expanded) return false;
      const std::size_t g = tactics_[t].parent;
      if (goals_[g].status != NodeStatus::Expanded) return false;
      t = goals_[g].parent;
    }
    return true;
  }

 private:
  struct FrontierEntry {
    double priority;
    std::uint64_t sequence;
    std::size_t id;
    // Max-heap: highest priority first, then lowest sequence.
    bool operator<(const FrontierEntry& o) const {
      if (priority != o.priority) return priority < o.priority;
      return sequence > o.sequence;
    }
  };

  std::size_t popLive() {
    while (!frontier_.empty()) {
      const FrontierEntry top = frontier_.top();
      frontier_.pop();
      if (isLive(top.id)) return top.id;
    }
    return kNoNode;
  }

  bool repeatsAncestor(std::size_t parentGoal, const Sequent& s, std::size_t hash) const {
    std::size_t g = parentGoal;
    while (true) {
      if (goals_[g].sequentHash == hash && goals_[g].sequent == s) return true;
      const std::size_t t = goals_[g].parent;
      if (t == kNoNode) return false;
      g = tactics_[t].parent;
    }
  }

  void expand(std::size_t id) {
    std::vector<Expansion> expansions =
        expandGoal(goals_[id].sequent, rules_, &cache_, lemmas_, warnings_);
    goals_[id].status = NodeStatus::Expanded;
    for (auto& e : expansions) {
      const std::size_t tid = tactics_.size();
      tactics_.push_back({std::move(e.tactic), e.score, {}, id, NodeStatus::Expanded});
      goals_[id].children.push_back(tid);
      const double childPriority = goals_[id].priority * e.score;
      const std::size_t childDepth = goals_[id].depth + 1;
      bool failed = false;
      bool allProved = true;
      std::vector<std::size_t> pending;
      for (auto& sub : e.subgoals) {
        GoalNode child;
        child.sequentHash = sub.hash();
        child.priority = childPriority;
        child.parent = tid;
        child.depth = childDepth;
        child.sequence = nextSequence_++;
        if (childDepth > limits_.maxDepth || repeatsAncestor(id, sub, child.sequentHash)) {
          child.status = NodeStatus::Failed;
          failed = true;
        } else if (auto it = proved_.find(sub); it != proved_.end()) {
          child.status = NodeStatus::Proved;
          child.memoSource = it->second;
        } else {
          allProved = false;
        }
        child.sequent = std::move(sub);
        const std::size_t gid = goals_.size();
        if (child.status == NodeStatus::Unexpanded) pending.push_back(gid);
        goals_.push_back(std::move(child));
        tactics_[tid].children.push_back(gid);
      }
      if (failed) {
        tactics_[tid].status = NodeStatus::Failed;
      } else if (allProved) {
        tactics_[tid].status = NodeStatus::Proved;
      } else {
        for (std::size_t gid : pending)
          frontier_.push({goals_[gid].priority, goals_[gid].sequence, gid});
      }
    }
    // Settle the expanded goal from its children, then propagate upward.
    for (std::size_t tid : goals_[id].children) {
      if (tactics_[tid].status == NodeStatus::Proved) {
        resolveGoal(id, NodeStatus::Proved, tid);
        return;
      }
    }
    if (allChildrenFailed(id)) resolveGoal(id, NodeStatus::Failed, kNoNode);
  }

  bool allChildrenFailed(std::size_t goalId) const {
    for (std::size_t tid : goals_[goalId].children)
      if (tactics_[tid].status != NodeStatus::Failed) return false;
    return true;
  }

  void resolveGoal(std::size_t goalId, NodeStatus status, std::size_t provedBy) {
    GoalNode& g = goals_[goalId];
    if (g.status == NodeStatus::Proved || g.status == NodeStatus::Failed) return;
    g.status = status;
    if (status == NodeStatus::Proved) {
      g.provedBy = provedBy;
      proved_.emplace(g.sequent, goalId);
    }
    const std::size_t tid = g.parent;
    if (tid == kNoNode) return;
    TacticNode& t = tactics_[tid];
    if (t.status != NodeStatus::Expanded) return;
    if (status == NodeStatus::Failed) {
      t.status = NodeStatus::Failed;
      const std::size_t parentGoal = t.parent;
      if (goals_[parentGoal].status == NodeStatus::Expanded && allChildrenFailed(parentGoal))
        resolveGoal(parentGoal, NodeStatus::Failed, kNoNode);
      return;
    }
    for (std::size_t c : t.children)
      if (goals_[c].status != NodeStatus::Proved) return;
    t.status = NodeStatus::Proved;
    resolveGoal(t.parent, NodeStatus::Proved, tid);
  }

  void emit(std::size_t goalId, std::vector<Tactic>& steps) const {
    const GoalNode& g = goals_[goalId];
    if (g.memoSource != kNoNode) {
      emit(g.memoSource, steps);
      return;
    }
    const TacticNode& t = tactics_[g.provedBy];
    steps.push_back(t.tactic);
    for (std::size_t c : t.children) emit(c, steps);
  }

  RuleSet rules_;
  const Generator* generator_;
  LemmaTable lemmas_;
  SearchLimits limits_;
  GeneratorCache cache_;
  std::vector<GoalNode> goals_;
  std::vector<TacticNode> tactics_;
  std::priority_queue<FrontierEntry> frontier_;
  std::unordered_map<Sequent, std::size_t> proved_;
  std::uint64_t nextSequence_ = 0;
  std::size_t expansions_ = 0;
  std::vector<std::string> warnings_;
};

inline SearchResult bestFirstSearch(const Sequent& goal, const RuleSet& rules,
                                    const Generator* generator, const LemmaTable& lemmas,
                                    const SearchLimits& limits = {}) {
  if (rules.useGenerator && !generator)
    throw InvalidParam("rule set requests a generator but none was given");
  ProofSearch search(goal, rules, generator, lemmas, limits);
  return search.run();
}

}  // namespace copilot
