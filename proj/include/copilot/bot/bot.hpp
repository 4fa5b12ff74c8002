#pragma once

// Sorry-repair bot: find `sorry` steps, search for a replacement proof,
// verify the splice through the kernel and package the result as a diff and a
// pull-request payload.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "copilot/bot/diff.hpp"
#include "copilot/corpus.hpp"
#include "copilot/generation/spec.hpp"
#include "copilot/search.hpp"
#include "json.hpp"

namespace copilot {

class SearchFailed : public Error {
 public:
  explicit SearchFailed(SearchResult::Status status)
      : Error("search failed: " + std::string(statusName(status))), status_(status) {}
  SearchResult::Status status() const noexcept { return status_; }

 private:
  SearchResult::Status status_;
};

class VerificationFailed : public Error {
 public:
  explicit VerificationFailed(const std::string& why) : Error("verification failed: " + why) {}
};

class UnverifiedPatch : public Error {
 public:
  UnverifiedPatch() : Error("refusing to use an unverified patch") {}
};

class NoPatches : public Error {
 public:
  NoPatches() : Error("no patches") {}
};

struct SorrySite {
  std::string path;
  std::string theoremName;
  std::size_t stepIndex = 0;
  Sequent goal;
  ByteSpan span;  // the `sorry` token
};

struct ScanIssue {
  std::string path;
  std::string theorem;
  std::string message;
};

// Sites in (path, offset) order. A theorem whose prefix replay fails makes the
// whole file unusable: it is reported in `issues` and contributes no sites.
inline std::vector<SorrySite> scanSorries(const Library& lib, std::vector<ScanIssue>* issues = nullptr) {
  std::vector<SorrySite> sites;
  for (const auto& f : lib.files) {
    const LemmaTable lemmas = lib.lemmasFor(f);
    std::vector<SorrySite> local;
    try {
      for (const auto& t : f.theorems) {
        for (std::size_t i = 0; i < t.script.size(); ++i) {
          if (t.script.steps[i].kind != TacticKind::Sorry) continue;
          const ProofState before = replayPrefix(t, i, lemmas);
          const SourceSpan& s = t.script.spans[i];
          local.push_back({f.path, t.name, i, before.goals.front(), {s.offset, s.length}});
        }
      }
    } catch (const InvalidPrefix& e) {
      if (issues) issues->push_back({f.path, "", e.what()});
      continue;
    }
    sites.insert(sites.end(), local.begin(), local.end());
  }
  std::stable_sort(sites.begin(), sites.end(), [](const SorrySite& a, const SorrySite& b) {
    return a.path != b.path ? a.path < b.path : a.span.offset < b.span.offset;
  });
  return sites;
}

struct Patch {
  std::string path;
  std::string theoremName;
  std::size_t stepIndex = 0;
  ByteSpan span;
  std::string replacementText;
  bool verified = false;
  Sequent goal;
  std::size_t expansions = 0;
};

inline std::string splice(std::string_view text, ByteSpan span, std::string_view replacement) {
  std::string out(text.substr(0, span.offset));
  out += replacement;
  out += text.substr(span.end());
  return out;
}

namespace detail {

inline std::size_t sorryCount(const TacticScript& s) {
  return static_cast<std::size_t>(std::count_if(
      s.steps.begin(), s.steps.end(), [](const Tactic& t) { return t.kind == TacticKind::Sorry; }));
}

}  // namespace detail

// Throws VerificationFailed unless `script` is a sorry-free proof of the
// site's goal that leaves the rest of the theorem exactly as the sorry did,
// and the spliced file still replays with sorries only at the other sites.
inline void verifyRepair(const CorpusFile& file, const SorrySite& site, const TacticScript& script,
                         const LemmaTable& lemmas) {
  if (script.empty() || script.containsSorry()) throw VerificationFailed("script is empty or uses sorry");
  const TheoremEntry* entry = file.findTheorem(site.theoremName);
  if (!entry) throw VerificationFailed("theorem " + site.theoremName + " not found");
  const ProofState before = replayPrefix(*entry, site.stepIndex, lemmas);
  if (before.goals.empty() || before.goals.front() != site.goal)
    throw VerificationFailed("site goal no longer matches the file");

  if (!runScript(ProofState(site.goal, before.scope), script, lemmas).provedWithoutSorry())
    throw VerificationFailed("script does not close the site goal");
  const ProofOutcome rest = runScript(before, script, lemmas);
  const ProofState after = replayPrefix(*entry, site.stepIndex + 1, lemmas);
  if (rest.status == ProofOutcome::Status::Failed ||
      (rest.proved() ? std::vector<Sequent>{} : rest.remaining) != after.goals)
    throw VerificationFailed("script disturbs the remaining goals");

  const std::string text = splice(file.text, site.span, toString(script));
  const CorpusFile patched = parseTheoremFile(text, file.path);
  const TheoremEntry* repaired = patched.findTheorem(site.theoremName);
  if (!repaired) throw VerificationFailed("patched file lost the theorem");
  const ProofOutcome full = runScript(repaired->goal(), repaired->script, lemmas);
  const std::size_t others = detail::sorryCount(entry->script) - 1;
  if (!full.proved() || detail::sorryCount(repaired->script) != others ||
      full.usedSorry != (others > 0))
    throw VerificationFailed("patched theorem does not replay");
}

// Throws SearchFailed when no proof is found and VerificationFailed when the
// found proof does not survive splicing.
inline Patch attemptRepair(const CorpusFile& file, const SorrySite& site, const RuleSet& rules,
                           const Generator* generator, const LemmaTable& lemmas,
                           const SearchLimits& limits = {}) {
  const SearchResult r = bestFirstSearch(site.goal, rules, generator, lemmas, limits);
  if (!r.found()) throw SearchFailed(r.status);
  verifyRepair(file, site, r.script, lemmas);
  return {site.path, site.theoremName, site.stepIndex, site.span, toString(r.script), true,
          site.goal, r.expansions};
}

inline Patch attemptRepair(const CorpusFile& file, const SorrySite& site, const RuleSet& rules,
                           const GeneratorSpec& gen, const LemmaTable& lemmas,
                           const SearchLimits& limits = {}) {
  const GeneratorPtr g = rules.useGenerator ? makeGenerator(gen, lemmas) : nullptr;
  return attemptRepair(file, site, rules, g.get(), lemmas, limits);
}

// Applies this file's patches to its original text. Spans refer to the
// original text, so splicing runs from the last offset backwards.
inline std::string applyPatches(std::string_view text, std::vector<Patch> patches) {
  std::sort(patches.begin(), patches.end(),
            [](const Patch& a, const Patch& b) { return a.span.offset > b.span.offset; });
  std::string out(text);
  std::size_t limit = text.size();
  for (const auto& p : patches) {
    if (!p.verified) throw UnverifiedPatch();
    if (p.span.end() > limit) throw Error("overlapping patches in " + p.path);
    out = splice(out, p.span, p.replacementText);
    limit = p.span.offset;
  }
  return out;
}

inline std::map<std::string, std::vector<Patch>> patchesByPath(const std::vector<Patch>& patches) {
  std::map<std::string, std::vector<Patch>> out;
  for (const auto& p : patches) {
    if (!p.verified) throw UnverifiedPatch();
    out[p.path].push_back(p);
  }
  return out;
}

inline std::string relativePath(const std::string& path, const std::string& root) {
  if (root.empty()) return std::filesystem::path(path).generic_string();
  return std::filesystem::path(path).lexically_relative(root).generic_string();
}

// One file section per patched path, in path order.
inline std::string renderDiff(const std::vector<Patch>& patches,
                              const std::map<std::string, std::string>& originals,
                              const std::string& root = {}) {
  std::string out;
  for (const auto& [path, ps] : patchesByPath(patches)) {
    const std::string& before = originals.at(path);
    out += unifiedDiff(relativePath(path, root), before, applyPatches(before, ps));
  }
  return out;
}

struct RepoMeta {
  std::string root;
  std::string date;  // YYYY-MM-DD, UTC
  std::string baseBranch = "main";
};

inline std::string utcDate(std::chrono::system_clock::time_point t = std::chrono::system_clock::now()) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[16];
  std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
  return buf;
}

struct PrPayload {
  std::string title;
  std::string body;
  std::string branchName;
  std::string baseBranch;
  std::vector<std::pair<std::string, std::string>> files;  // relative path, new content
};

inline PrPayload buildPrPayload(const std::vector<Patch>& patches,
                                const std::map<std::string, std::string>& originals,
                                const RepoMeta& meta) {
  if (patches.empty()) throw NoPatches();
  const auto grouped = patchesByPath(patches);
  PrPayload pr;
  pr.branchName = "copilot/fix-sorries-" + meta.date;
  pr.baseBranch = meta.baseBranch;
  pr.title = "Fill in " + std::to_string(patches.size()) + " sorry proof" +
             (patches.size() == 1 ? "" : "s");
  std::size_t expansions = 0;
  std::string list;
  for (const auto& [path, ps] : grouped) {
    const std::string rel = relativePath(path, meta.root);
    std::string content = applyPatches(originals.at(path), ps);
    parseTheoremFile(content, path);
    for (const auto& p : ps) {
      expansions += p.expansions;
      list += "- `" + p.theoremName + "` in `" + rel + "`\n";
      list += "  - goal: `" + prettyGoal(p.goal) + "`\n";
      list += "  - proof: `" + p.replacementText + "`\n";
      list += "  - expansions: " + std::to_string(p.expansions) + "\n";
    }
    pr.files.emplace_back(rel, std::move(content));
  }
  pr.body = "Replaces `sorry` placeholders with proofs found by best-first search and "
            "re-checked by the kernel.\n\n" +
            list + "\nSearch statistics: " + std::to_string(patches.size()) + " sites repaired, " +
            std::to_string(expansions) + " expansions in total.\n";
  return pr;
}

inline std::string toJson(const PrPayload& pr) {
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& [path, content] : pr.files) files.push_back({{"path", path}, {"content", content}});
  nlohmann::ordered_json j;
  j["title"] = pr.title;
  j["body"] = pr.body;
  j["branchName"] = pr.branchName;
  j["baseBranch"] = pr.baseBranch;
  j["files"] = std::move(files);
  return j.dump(2) + "\n";
}

struct BotOptions {
  RuleSet rules = [] {
    RuleSet r = defaultRuleSet();
    r.useGenerator = true;
    return r;
  }();
  GeneratorSpec generator = GeneratorSpec::builtin();
  SearchLimits limits;
  std::string date;  // empty means today
};

struct RepairFailure {
  SorrySite site;
  std::string reason;
};

struct BotReport {
  std::string root;
  std::vector<SorrySite> sites;
  std::vector<Patch> patches;
  std::vector<RepairFailure> failures;
  std::vector<ScanIssue> issues;
  std::map<std::string, std::string> originals;  // every scanned file
  std::map<std::string, std::string> patched;    // changed files only
  std::string diff;
  std::optional<PrPayload> payload;              // absent without patches
};

// Full pass over every `.thy` file under `root`. Nothing is written.
inline BotReport runBot(const std::string& root, const BotOptions& options = {}) {
  BotReport report;
  report.root = root;
  std::vector<CorpusFile> files;
  for (const auto& path : listTheoremFiles(root)) {
    try {
      files.push_back(loadTheoremFile(path));
    } catch (const SyntaxError& e) {
      report.issues.push_back({path, "", e.what()});
    }
  }
  const Library lib = buildLibrary(std::move(files));
  for (const auto& f : lib.files) report.originals[f.path] = f.text;
  report.sites = scanSorries(lib, &report.issues);

  std::map<std::string, std::pair<LemmaTable, GeneratorPtr>> perFile;
  for (const auto& site : report.sites) {
    const CorpusFile& file = *std::find_if(lib.files.begin(), lib.files.end(),
                                           [&](const CorpusFile& f) { return f.path == site.path; });
    auto it = perFile.find(file.path);
    if (it == perFile.end()) {
      LemmaTable lemmas = lib.lemmasFor(file);
      GeneratorPtr gen = options.rules.useGenerator ? makeGenerator(options.generator, lemmas) : nullptr;
      it = perFile.emplace(file.path, std::make_pair(std::move(lemmas), std::move(gen))).first;
    }
    try {
      report.patches.push_back(attemptRepair(file, site, options.rules, it->second.second.get(),
                                             it->second.first, options.limits));
    } catch (const Error& e) {
      report.failures.push_back({site, e.what()});
    }
  }

  // The combined splice must still load and replay: every theorem whose sorries
  // were all replaced has to be proved outright.
  for (const auto& [path, ps] : patchesByPath(report.patches)) {
    std::string text = applyPatches(report.originals.at(path), ps);
    const CorpusFile after = parseTheoremFile(text, path);
    const LemmaTable& lemmas = perFile.at(path).first;
    for (const auto& t : after.theorems) {
      const ProofOutcome o = runScript(t.goal(), t.script, lemmas);
      if (!o.proved() || o.usedSorry != t.script.containsSorry())
        throw VerificationFailed("combined patches break " + t.name);
    }
    report.patched.emplace(path, std::move(text));
  }
  report.diff = renderDiff(report.patches, report.originals, root);
  if (!report.patches.empty())
    report.payload = buildPrPayload(report.patches, report.originals,
                                    {root, options.date.empty() ? utcDate() : options.date});
  return report;
}

// Overwrites each changed file in place.
inline void writePatchedFiles(const BotReport& report) {
  for (const auto& [path, text] : report.patched) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << text;
  }
}

}  // namespace copilot
