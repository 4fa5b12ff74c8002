#pragma once

// Human-collaboration benchmark: replay ground-truth tactics one at a time and
// after each prefix ask a tool to finish the proof.

#include <algorithm>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "copilot/corpus.hpp"
#include "copilot/search.hpp"
#include "copilot/suggest.hpp"
#include "json.hpp"

namespace copilot {

struct ToolSpec {
  enum class Kind { RulesOnly, SuggestOnly, SearchWithGenerator };

  Kind kind = Kind::RulesOnly;
  SearchLimits limits;
  std::optional<GeneratorSpec> generator;
  // Whether the tool may use the library lemmas in scope. Off for RulesOnly by
  // default: an unconfigured rule set knows nothing about the library.
  bool useLemmas = true;

  static ToolSpec rulesOnly(SearchLimits limits = {}) {
    return {Kind::RulesOnly, limits, std::nullopt, false};
  }
  static ToolSpec suggestOnly(GeneratorSpec gen = GeneratorSpec::builtin()) {
    return {Kind::SuggestOnly, {}, std::move(gen), true};
  }
  static ToolSpec searchWithGenerator(GeneratorSpec gen = GeneratorSpec::builtin(),
                                      SearchLimits limits = {}) {
    return {Kind::SearchWithGenerator, limits, std::move(gen), true};
  }
};

inline std::string_view toolName(ToolSpec::Kind k) {
  switch (k) {
    case ToolSpec::Kind::RulesOnly: return "RulesOnly";
    case ToolSpec::Kind::SuggestOnly: return "SuggestOnly";
    case ToolSpec::Kind::SearchWithGenerator: return "SearchWithGenerator";
  }
  return "";
}

inline void validate(const ToolSpec& tool) {
  if (tool.kind != ToolSpec::Kind::RulesOnly && !tool.generator)
    throw InvalidParam(std::string(toolName(tool.kind)) + " needs a generator");
  if (tool.generator) validate(*tool.generator);
}

struct CollabRecord {
  std::string theoremName;
  std::size_t groundTruthLen = 0;
  std::size_t manualTactics = 0;
  std::optional<std::size_t> solvedAtStep;
  bool toolSucceeded = false;
  std::optional<std::string> error;  // set when the simulation itself failed

  double automatedFraction() const {
    return 1.0 - static_cast<double>(manualTactics) / static_cast<double>(groundTruthLen);
  }
};

struct MetricsTable {
  double avgManualTactics = 0.0;
  double pctAutonomous = 0.0;
  double avgPctAutomated = 0.0;

  friend bool operator==(const MetricsTable&, const MetricsTable&) = default;
};

inline MetricsTable computeMetrics(const std::vector<CollabRecord>& records) {
  if (records.empty()) throw EmptyInput();
  double manual = 0.0, autonomous = 0.0, automated = 0.0;
  for (const auto& r : records) {
    if (r.groundTruthLen == 0) throw InvalidParam("ground-truth length must be >= 1");
    manual += static_cast<double>(r.manualTactics);
    autonomous += r.manualTactics == 0 ? 1.0 : 0.0;
    automated += r.automatedFraction();
  }
  const double n = static_cast<double>(records.size());
  return {manual / n, 100.0 * autonomous / n, 100.0 * automated / n};
}

namespace detail {

// Whether the tool proves every goal of `state`, each attempted on its own.
inline bool toolProvesAll(const ProofState& state, const ToolSpec& tool, const Generator* gen,
                          const LemmaTable& lemmas) {
  for (const Sequent& goal : state.goals) {
    if (tool.kind == ToolSpec::Kind::SuggestOnly) {
      const SuggestionSet set = suggestTactics(ProofState(goal, state.scope), *gen, lemmas);
      if (!set.hasProofClosing()) return false;
      continue;
    }
    RuleSet rules = defaultRuleSet();
    rules.useGenerator = tool.kind == ToolSpec::Kind::SearchWithGenerator;
    if (!bestFirstSearch(goal, rules, rules.useGenerator ? gen : nullptr, lemmas, tool.limits)
             .found())
      return false;
  }
  return true;
}

}  // namespace detail

// `generator`, when given, overrides the one built from tool.generator.
inline CollabRecord simulateCollaboration(const TheoremEntry& entry, const ToolSpec& tool,
                                          const LemmaTable& lemmas,
                                          const Generator* generator = nullptr) {
  validate(tool);
  const LemmaTable none;
  const LemmaTable& visible = tool.useLemmas ? lemmas : none;
  GeneratorPtr owned;
  if (!generator && tool.generator) {
    owned = makeGenerator(*tool.generator, visible);
    generator = owned.get();
  }
  CollabRecord rec;
  rec.theoremName = entry.name;
  rec.groundTruthLen = entry.script.size();
  for (std::size_t i = 0; i < rec.groundTruthLen; ++i) {
    // The human's replay always sees the full library.
    const ProofState state = replayPrefix(entry, i, lemmas);
    if (state.goals.empty()) break;
    if (detail::toolProvesAll(state, tool, generator, visible)) {
      rec.manualTactics = i;
      rec.solvedAtStep = i;
      rec.toolSucceeded = true;
      return rec;
    }
  }
  rec.manualTactics = rec.groundTruthLen;
  return rec;
}

struct ToolReport {
  ToolSpec tool;
  MetricsTable metrics;
  std::vector<CollabRecord> records;  // sorted by theorem name
};

struct BenchReport {
  std::vector<ToolReport> tools;  // RulesOnly, SuggestOnly, SearchWithGenerator

  const ToolReport* find(ToolSpec::Kind k) const {
    for (const auto& t : tools)
      if (t.tool.kind == k) return &t;
    return nullptr;
  }
};

struct BenchTheorem {
  const TheoremEntry* entry;
  LemmaTable lemmas;
};

inline std::vector<BenchTheorem> benchTheorems(const Library& lib) {
  std::vector<BenchTheorem> out;
  for (const auto& f : lib.files) {
    const LemmaTable lemmas = lib.lemmasFor(f);
    for (const auto& t : f.theorems) out.push_back({&t, lemmas});
  }
  return out;
}

inline BenchReport runBenchmark(const std::vector<BenchTheorem>& corpus, std::vector<ToolSpec> tools) {
  std::stable_sort(tools.begin(), tools.end(),
                   [](const ToolSpec& a, const ToolSpec& b) { return a.kind < b.kind; });
  std::vector<const BenchTheorem*> order;
  for (const auto& t : corpus) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](const BenchTheorem* a, const BenchTheorem* b) {
    return a->entry->name < b->entry->name;
  });
  BenchReport report;
  for (const auto& tool : tools) {
    ToolReport tr{tool, {}, {}};
    for (const BenchTheorem* t : order) {
      try {
        tr.records.push_back(simulateCollaboration(*t->entry, tool, t->lemmas));
      } catch (const Error& e) {
        CollabRecord failed;
        failed.theoremName = t->entry->name;
        failed.groundTruthLen = t->entry->script.size();
        failed.manualTactics = failed.groundTruthLen;
        failed.error = e.what();
        tr.records.push_back(std::move(failed));
      }
    }
    tr.metrics = computeMetrics(tr.records);
    report.tools.push_back(std::move(tr));
  }
  return report;
}

inline BenchReport runBenchmark(const Library& lib, std::vector<ToolSpec> tools) {
  return runBenchmark(benchTheorems(lib), std::move(tools));
}

// bench_report.json. No timings, so reruns are byte-identical.
inline std::string toJson(const BenchReport& report) {
  nlohmann::ordered_json tools = nlohmann::ordered_json::array();
  for (const auto& t : report.tools) {
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    for (const auto& r : t.records) {
      nlohmann::ordered_json j;
      j["theorem"] = r.theoremName;
      j["groundTruthLen"] = r.groundTruthLen;
      j["manualTactics"] = r.manualTactics;
      j["solvedAtStep"] = r.solvedAtStep ? nlohmann::ordered_json(*r.solvedAtStep) : nullptr;
      j["toolSucceeded"] = r.toolSucceeded;
      if (r.error) j["error"] = *r.error;
      records.push_back(std::move(j));
    }
    nlohmann::ordered_json j;
    j["name"] = toolName(t.tool.kind);
    j["avgManualTactics"] = t.metrics.avgManualTactics;
    j["pctAutonomous"] = t.metrics.pctAutonomous;
    j["avgPctAutomated"] = t.metrics.avgPctAutomated;
    j["records"] = std::move(records);
    tools.push_back(std::move(j));
  }
  nlohmann::ordered_json root;
  root["tools"] = std::move(tools);
  return root.dump(2) + "\n";
}

inline std::string renderTable(const BenchReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(22) << "Tool" << std::right << std::setw(20)
      << "Avg manual tactics" << std::setw(16) << "% autonomous" << std::setw(20)
      << "% steps automated" << "\n";
  out << std::fixed << std::setprecision(2);
  for (const auto& t : report.tools) {
    out << std::left << std::setw(22) << toolName(t.tool.kind) << std::right << std::setw(20)
        << t.metrics.avgManualTactics << std::setw(16) << t.metrics.pctAutonomous << std::setw(20)
        << t.metrics.avgPctAutomated << "\n";
  }
  return out.str();
}

}  // namespace copilot
