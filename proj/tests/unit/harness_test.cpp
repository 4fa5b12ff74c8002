#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "copilot/harness.hpp"

namespace copilot {
namespace {

CollabRecord record(std::size_t len, std::size_t manual) {
  CollabRecord r;
  r.theoremName = "t";
  r.groundTruthLen = len;
  r.manualTactics = manual;
  r.toolSucceeded = manual < len;
  if (r.toolSucceeded) r.solvedAtStep = manual;
  return r;
}

TEST(ComputeMetrics, Fixture) {
  const MetricsTable m =
      computeMetrics({record(2, 0), record(4, 1), record(1, 0), record(5, 5)});
  EXPECT_EQ(m.avgManualTactics, 1.5);
  EXPECT_EQ(m.pctAutonomous, 50.0);
  EXPECT_EQ(m.avgPctAutomated, 68.75);
}

TEST(ComputeMetrics, Extremes) {
  EXPECT_EQ(computeMetrics({record(3, 0), record(7, 0)}), (MetricsTable{0.0, 100.0, 100.0}));
  EXPECT_EQ(computeMetrics({record(6, 6)}), (MetricsTable{6.0, 0.0, 0.0}));
  EXPECT_THROW(computeMetrics({}), EmptyInput);
  EXPECT_THROW(computeMetrics({record(0, 0)}), InvalidParam);
}

TEST(ComputeMetrics, PermutationInvariant) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<CollabRecord> rs;
    const int n = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      const std::size_t len = 1 + rng() % 8;
      rs.push_back(record(len, rng() % (len + 1)));
    }
    const MetricsTable base = computeMetrics(rs);
    std::shuffle(rs.begin(), rs.end(), rng);
    const MetricsTable shuffled = computeMetrics(rs);
    EXPECT_NEAR(base.avgManualTactics, shuffled.avgManualTactics, 1e-12);
    EXPECT_NEAR(base.pctAutonomous, shuffled.pctAutonomous, 1e-12);
    EXPECT_NEAR(base.avgPctAutomated, shuffled.avgPctAutomated, 1e-12);
  }
}

TheoremEntry theorem(const std::string& name, std::string_view statement, std::string_view script) {
  TheoremEntry t;
  t.name = name;
  t.statement = parseFormula(statement);
  t.script = parseScript(script);
  return t;
}

void expectConsistent(const CollabRecord& r) {
  EXPECT_LE(r.manualTactics, r.groundTruthLen);
  EXPECT_EQ(r.toolSucceeded, r.solvedAtStep.has_value());
  if (r.toolSucceeded) EXPECT_EQ(*r.solvedAtStep, r.manualTactics);
  else EXPECT_EQ(r.manualTactics, r.groundTruthLen);
  EXPECT_GE(r.automatedFraction(), 0.0);
  EXPECT_LE(r.automatedFraction(), 1.0);
}

TEST(SimulateCollaboration, ProtocolExamples) {
  const TheoremEntry id = theorem("id", "A -> A", "intro h; exact h");
  const CollabRecord rules = simulateCollaboration(id, ToolSpec::rulesOnly(), {});
  EXPECT_EQ(rules.manualTactics, 0u);
  EXPECT_TRUE(rules.toolSucceeded);

  // Nothing in the tool's view can close a goal that needs the lemma.
  const LemmaTable lemmas{{"ab", parseFormula("A -> B")}, {"a", parseFormula("A")},
                          {"bc", parseFormula("B -> C")}, {"cd", parseFormula("C -> D")}};
  const TheoremEntry chain = theorem("chain", "D", "apply cd; apply bc; apply ab; exact a");
  const CollabRecord never = simulateCollaboration(chain, ToolSpec::rulesOnly(), lemmas);
  EXPECT_FALSE(never.toolSucceeded);
  EXPECT_EQ(never.manualTactics, 4u);
  expectConsistent(never);

  ScriptedGenerator::Table table;
  table["h : A \xE2\x8A\xA2 A"] = {{"exact h", 0.9}};
  const ScriptedGenerator closer(table);
  const CollabRecord one =
      simulateCollaboration(id, ToolSpec::suggestOnly(GeneratorSpec::scripted("inline")), {}, &closer);
  EXPECT_EQ(one.manualTactics, 1u);
  EXPECT_EQ(one.solvedAtStep, std::optional<std::size_t>(1));

  ToolSpec missing = ToolSpec::suggestOnly();
  missing.generator.reset();
  EXPECT_THROW(simulateCollaboration(id, missing, {}), InvalidParam);
}

TEST(SimulateCollaboration, InvalidPrefixPropagates) {
  const TheoremEntry bad = theorem("bad", "A -> A", "intro h; split; exact h");
  const ToolSpec never = ToolSpec::suggestOnly(GeneratorSpec::scripted("inline"));
  const ScriptedGenerator silent({});
  EXPECT_THROW(simulateCollaboration(bad, never, {}, &silent), InvalidPrefix);
}

TEST(SimulateCollaboration, SuggestOnlyNeedsEveryGoalClosed) {
  // After split both conjuncts are closable by one suggestion each.
  const TheoremEntry t = theorem("pair", "A -> B -> A /\\ B", "intro a; intro b; split; exact a; exact b");
  const CollabRecord r = simulateCollaboration(t, ToolSpec::suggestOnly(), {});
  EXPECT_EQ(r.manualTactics, 3u);
  expectConsistent(r);
}

std::vector<TheoremEntry> smallCorpus() {
  return {theorem("zeta", "A /\\ B -> B /\\ A", "intro h; cases h; split; exact h.2; exact h.1"),
          theorem("alpha", "B", "apply ab; exact a"),
          theorem("mid", "A -> A \\/ B", "intro h; left; exact h")};
}

TEST(RunBenchmark, RecordsOrderingAndDeterminism) {
  const LemmaTable lemmas{{"ab", parseFormula("A -> B")}, {"a", parseFormula("A")}};
  const auto entries = smallCorpus();
  std::vector<BenchTheorem> corpus;
  for (const auto& e : entries) corpus.push_back({&e, lemmas});

  const std::vector<ToolSpec> tools{ToolSpec::searchWithGenerator(), ToolSpec::rulesOnly()};
  const BenchReport report = runBenchmark(corpus, tools);
  ASSERT_EQ(report.tools.size(), 2u);
  EXPECT_EQ(report.tools[0].tool.kind, ToolSpec::Kind::RulesOnly);
  EXPECT_EQ(report.tools[1].tool.kind, ToolSpec::Kind::SearchWithGenerator);
  std::size_t records = 0;
  for (const auto& t : report.tools) {
    records += t.records.size();
    ASSERT_EQ(t.records.size(), 3u);
    EXPECT_EQ(t.records[0].theoremName, "alpha");
    EXPECT_EQ(t.records[2].theoremName, "zeta");
    for (const auto& r : t.records) expectConsistent(r);
  }
  EXPECT_EQ(records, 6u);
  // Lemma-blind rules cannot use ab; the generator-backed search can.
  EXPECT_EQ(report.tools[0].records[0].manualTactics, 2u);
  EXPECT_EQ(report.tools[1].records[0].manualTactics, 0u);

  const std::string json = toJson(report);
  EXPECT_EQ(json, toJson(runBenchmark(corpus, tools)));
  const auto parsed = nlohmann::json::parse(json);
  EXPECT_EQ(parsed["tools"][0]["name"], "RulesOnly");
  EXPECT_EQ(parsed["tools"][1]["records"].size(), 3u);
  EXPECT_NE(renderTable(report).find("SearchWithGenerator"), std::string::npos);
}

TEST(RunBenchmark, ErrorsBecomeFailures) {
  const TheoremEntry bad = theorem("bad", "A \\/ B -> B \\/ A", "intro h; split; exact h");
  const BenchReport report = runBenchmark(std::vector<BenchTheorem>{{&bad, {}}}, {ToolSpec::suggestOnly()});
  ASSERT_EQ(report.tools[0].records.size(), 1u);
  const CollabRecord& r = report.tools[0].records[0];
  EXPECT_TRUE(r.error.has_value());
  EXPECT_EQ(r.manualTactics, 3u);
  EXPECT_NE(toJson(report).find("\"error\""), std::string::npos);
}

// With the same lemmas and limits, a search whose generator proposes every
// rule instantiation never needs more human steps than the rules alone.
TEST(HarnessProperties, GeneratorSearchMonotoneOverRules) {
  const Library lib = loadLibraryDir(COPILOT_DATA_DIR "/corpus");
  GeneratorParams wide;
  wide.numReturnSequences = 64;
  SearchLimits limits;
  limits.maxExpansions = 300;
  ToolSpec rules = ToolSpec::rulesOnly(limits);
  rules.useLemmas = true;
  const ToolSpec swg = ToolSpec::searchWithGenerator(GeneratorSpec::builtin(wide), limits);
  for (const auto& t : benchTheorems(lib)) {
    const CollabRecord r = simulateCollaboration(*t.entry, rules, t.lemmas);
    const CollabRecord g = simulateCollaboration(*t.entry, swg, t.lemmas);
    expectConsistent(r);
    expectConsistent(g);
    EXPECT_LE(g.manualTactics, r.manualTactics) << t.entry->name;
  }
}

}  // namespace
}  // namespace copilot
