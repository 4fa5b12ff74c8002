#include <gtest/gtest.h>

#include <random>

#include "copilot/generation/spec.hpp"
#include "copilot/suggest.hpp"
#include "test_support.hpp"

namespace copilot {
namespace {

ProofState stateOf(std::string_view pretty) { return ProofState(parseSequent(pretty)); }

ScriptedGenerator scripted(std::string goal, std::vector<ScoredText> outs, std::size_t k = 8) {
  ScriptedGenerator::Table t;
  t[std::move(goal)] = std::move(outs);
  GeneratorParams p;
  p.numReturnSequences = k;
  return ScriptedGenerator(std::move(t), p);
}

TEST(Categorize, Examples) {
  const Category c1 = categorize(stateOf("\xE2\x8A\xA2 A /\\ A"), "split", {});
  ASSERT_TRUE(std::holds_alternative<ValidStep>(c1));
  EXPECT_EQ(std::get<ValidStep>(c1).goals,
            (std::vector<Sequent>{parseSequent("\xE2\x8A\xA2 A"), parseSequent("\xE2\x8A\xA2 A")}));
  EXPECT_TRUE(std::holds_alternative<ProofClosing>(categorize(stateOf("\xE2\x8A\xA2 True"), "trivial", {})));
  const Category c3 = categorize(stateOf("\xE2\x8A\xA2 A"), "left", {});
  ASSERT_TRUE(std::holds_alternative<Rejected>(c3));
  EXPECT_EQ(std::get<Rejected>(c3).kind, TacticErrorKind::TargetShape);
  const Category syntax = categorize(stateOf("\xE2\x8A\xA2 A"), "intro", {});
  ASSERT_TRUE(std::holds_alternative<Rejected>(syntax));
  EXPECT_FALSE(std::get<Rejected>(syntax).kind.has_value());
  EXPECT_TRUE(std::holds_alternative<Rejected>(categorize(stateOf("\xE2\x8A\xA2 A"), "split; left", {})));
}

TEST(Categorize, ClosingRequiresAllGoals) {
  ProofState s = stateOf("\xE2\x8A\xA2 True");
  s.goals.push_back(parseSequent("\xE2\x8A\xA2 True"));
  const Category c = categorize(s, "trivial", {});
  ASSERT_TRUE(std::holds_alternative<ValidStep>(c));
  EXPECT_EQ(std::get<ValidStep>(c).goals.size(), 1u);
}

TEST(SuggestTactics, BuiltinPutsClosingFirst) {
  const BuiltinGenerator gen;
  const SuggestionSet set = suggestTactics(stateOf("h : A \xE2\x8A\xA2 A"), gen, {});
  ASSERT_FALSE(set.suggestions.empty());
  EXPECT_TRUE(set.checked);
  EXPECT_EQ(set.suggestions[0].tacticText, "exact h");
  EXPECT_EQ(set.suggestions[0].category, SuggestionCategory::ProofClosing);
  EXPECT_TRUE(set.hasProofClosing());
}

TEST(SuggestTactics, DiscardsErrorsAndDuplicates) {
  const auto gen = scripted("\xE2\x8A\xA2 A -> A", {{"intro h", 0.5}, {"split", 0.9}, {"intro  h", 0.7}});
  const SuggestionSet set = suggestTactics(stateOf("\xE2\x8A\xA2 A -> A"), gen, {});
  ASSERT_EQ(set.suggestions.size(), 1u);
  const Suggestion& s = set.suggestions[0];
  EXPECT_EQ(s.tacticText, "intro h");
  EXPECT_EQ(s.category, SuggestionCategory::ValidStep);
  EXPECT_DOUBLE_EQ(s.score, 0.7);
  ASSERT_EQ(s.remainingGoals.size(), 1u);
  EXPECT_EQ(prettyGoal(s.remainingGoals[0]), "h : A \xE2\x8A\xA2 A");
}

TEST(SuggestTactics, EmptyAndUnchecked) {
  const auto none = scripted("\xE2\x8A\xA2 B", {{"exact b", 1.0}});
  const SuggestionSet empty = suggestTactics(stateOf("\xE2\x8A\xA2 A"), none, {});
  EXPECT_TRUE(empty.suggestions.empty());
  EXPECT_TRUE(empty.checked);

  const auto gen = scripted("\xE2\x8A\xA2 A", {{"split", 0.9}, {"nonsense x y", 0.2}, {"exfalso", 0.4}});
  const SuggestionSet raw = suggestTactics(stateOf("\xE2\x8A\xA2 A"), gen, {}, false);
  EXPECT_FALSE(raw.checked);
  ASSERT_EQ(raw.suggestions.size(), 3u);
  EXPECT_EQ(raw.suggestions[0].tacticText, "split");
  for (const auto& s : raw.suggestions) EXPECT_FALSE(s.category.has_value());
  EXPECT_THROW(suggestTactics(ProofState(), gen, {}), NoGoalsError);
}

// Candidate texts for random pairs: mostly real tactics, some malformed.
std::string randomCandidate(std::mt19937_64& rng, const ProofState& s) {
  switch (rng() % 10) {
    case 0: return "frobnicate";
    case 1: return "intro";
    case 2: return "exact nowhere";
    case 3: return "split   ";
    default: return toString(testing::randomTactic(rng, s, {}, 0.5));
  }
}

ProofState randomState(std::mt19937_64& rng) {
  ProofState s;
  const int n = 1 + static_cast<int>(rng() % 2);
  for (int k = 0; k < n; ++k) {
    Sequent g(testing::randomFormula(rng, 3));
    for (const char* name : {"h", "g"})
      if (rng() % 2) g.hypotheses.push_back({name, testing::randomFormula(rng, 2)});
    s.goals.push_back(g);
  }
  return s;
}

TEST(SuggestProperties, CategorizeAgreesWithKernel) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 2000; ++i) {
    const ProofState s = randomState(rng);
    const std::string text = randomCandidate(rng, s);
    const Category c = categorize(s, text, {});
    std::optional<StepResult> direct;
    try {
      direct = applyTactic(s, parseTactic(text), {});
    } catch (const SyntaxError&) {
    }
    if (!direct || !*direct) {
      ASSERT_TRUE(std::holds_alternative<Rejected>(c)) << text;
      if (direct) EXPECT_EQ(std::get<Rejected>(c).kind, direct->error().kind);
    } else if ((*direct)->goals.empty()) {
      ASSERT_TRUE(std::holds_alternative<ProofClosing>(c)) << text;
    } else {
      ASSERT_TRUE(std::holds_alternative<ValidStep>(c)) << text;
      ASSERT_EQ(std::get<ValidStep>(c).goals, (*direct)->goals);
    }
  }
}

TEST(SuggestProperties, ReplayStabilityOrderingAndClosingIff) {
  std::mt19937_64 rng(22);
  GeneratorParams p;
  p.numReturnSequences = 16;
  const BuiltinGenerator gen(p);
  for (int i = 0; i < 500; ++i) {
    const ProofState s = randomState(rng);
    const SuggestionSet set = suggestTactics(s, gen, {});
    bool seenBlue = false;
    for (std::size_t k = 0; k < set.suggestions.size(); ++k) {
      const Suggestion& sg = set.suggestions[k];
      const StepResult r = applyTactic(s, parseTactic(sg.tacticText), {});
      ASSERT_TRUE(r) << sg.tacticText;
      ASSERT_EQ(r->goals, sg.remainingGoals);
      ASSERT_EQ(sg.category == SuggestionCategory::ProofClosing, r->goals.empty());
      if (sg.category == SuggestionCategory::ValidStep) seenBlue = true;
      else ASSERT_FALSE(seenBlue);
      if (k && set.suggestions[k - 1].category == sg.category)
        ASSERT_GE(set.suggestions[k - 1].score, sg.score);
    }
    bool anyCloses = false;
    for (const auto& c : gen.generateForGoal(s.goals.front()))
      if (auto r = applyTactic(s, parseTactic(c.text), {}); r && r->goals.empty()) anyCloses = true;
    ASSERT_EQ(set.hasProofClosing(), anyCloses);
  }
}

}  // namespace
}  // namespace copilot
