#pragma once

// `.thy` theorem files:
//
//   import <module>            -- zero or more, before any declaration
//   lemma <name> : <formula>
//   doc "<string>"             -- optional, directly after a lemma
//   theorem <name> : <formula>
//   proof
//     <tactic lines>
//   end
//
// `--` starts a line comment. The module name of a file is its stem.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "copilot/kernel/apply.hpp"
#include "copilot/premises/index.hpp"

namespace copilot {

struct ByteSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
  std::size_t end() const noexcept { return offset + length; }

  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

struct TheoremEntry {
  std::string name;
  Formula statement;
  TacticScript script;  // spans are absolute byte offsets in the file
  ByteSpan body;        // text strictly between `proof` and `end`
  std::size_t line = 0; // line of the `theorem` keyword

  Sequent goal() const { return Sequent(statement); }
};

struct CorpusFile {
  std::string path;
  std::string module;
  std::vector<std::string> imports;
  std::vector<PremiseRecord> lemmas;
  std::vector<std::size_t> lemmaOffsets;  // byte offset of each lemma block
  std::vector<TheoremEntry> theorems;
  std::string text;

  const TheoremEntry* findTheorem(std::string_view name) const {
    for (const auto& t : theorems)
      if (t.name == name) return &t;
    return nullptr;
  }
};

class InvalidPrefix : public Error {
 public:
  InvalidPrefix(std::size_t step, TacticError err)
      : Error("ground-truth step " + std::to_string(step) + " fails: " + err.message),
        step_(step),
        error_(std::move(err)) {}
  std::size_t step() const noexcept { return step_; }
  const TacticError& tacticError() const noexcept { return error_; }

 private:
  std::size_t step_;
  TacticError error_;
};

inline std::string moduleNameOf(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

namespace detail {

struct Line {
  std::string_view text;  // without newline
  std::size_t offset;
  std::size_t number;     // 1-based
};

inline std::vector<Line> splitLines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  std::size_t number = 1;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    lines.push_back({text.substr(pos, eol - pos), pos, number++});
    pos = eol + 1;
  }
  return lines;
}

inline std::string_view stripComment(std::string_view s) {
  const auto c = s.find("--");
  return c == std::string_view::npos ? s : s.substr(0, c);
}

inline std::size_t leadingBlanks(std::string_view s) {
  std::size_t n = 0;
  while (n < s.size() && (s[n] == ' ' || s[n] == '\t')) ++n;
  return n;
}

inline bool startsWithWord(std::string_view s, std::string_view word) {
  return s.substr(0, word.size()) == word &&
         (s.size() == word.size() || s[word.size()] == ' ' || s[word.size()] == '\t');
}

// `<name> : <formula>` after a declaration keyword.
inline std::pair<std::string, Formula> parseDeclaration(const Line& line, std::size_t keywordLen) {
  const std::string_view content = stripComment(line.text);
  std::size_t i = leadingBlanks(content) + keywordLen;
  i += leadingBlanks(content.substr(i));
  std::size_t n = 0;
  while (i + n < content.size() && isIdentChar(content[i + n])) ++n;
  const std::string name(content.substr(i, n));
  if (!isAtomName(name)) throw SyntaxError("expected a declaration name", line.number, i + 1, {"identifier"});
  i += n;
  i += leadingBlanks(content.substr(i));
  if (i >= content.size() || content[i] != ':')
    throw SyntaxError("expected ':'", line.number, i + 1, {"':'"});
  ++i;
  return {name, parseFormula(content.substr(i), {line.number, i + 1})};
}

inline std::string parseDocString(const Line& line) {
  const std::string_view content = trim(stripComment(line.text));
  const std::size_t col0 = leadingBlanks(line.text);
  std::size_t i = 3;
  while (i < content.size() && content[i] == ' ') ++i;
  if (i >= content.size() || content[i] != '"')
    throw SyntaxError("expected a string literal", line.number, col0 + i + 1, {"'\"'"});
  std::string out;
  for (++i; i < content.size(); ++i) {
    const char c = content[i];
    if (c == '\\' && i + 1 < content.size()) {
      out += content[++i];
    } else if (c == '"') {
      if (i + 1 != content.size())
        throw SyntaxError("trailing text after string", line.number, col0 + i + 2, {"newline"});
      return out;
    } else {
      out += c;
    }
  }
  throw SyntaxError("unterminated string", line.number, col0 + content.size() + 1, {"'\"'"});
}

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline CorpusFile parseTheoremFile(std::string_view text, const std::string& path) {
  using detail::Line;
  CorpusFile file;
  file.path = path;
  file.module = moduleNameOf(path);
  file.text = std::string(text);
  const std::vector<Line> lines = detail::splitLines(text);
  std::set<std::string> names;
  bool sawDeclaration = false;

  auto declare = [&](const std::string& name) {
    if (!names.insert(name).second) throw DuplicateName(name + " in " + path);
  };

  for (std::size_t li = 0; li < lines.size(); ++li) {
    const Line& line = lines[li];
    const std::string_view content = detail::trim(detail::stripComment(line.text));
    if (content.empty()) continue;
    const std::size_t col = detail::leadingBlanks(line.text) + 1;

    if (detail::startsWithWord(content, "import")) {
      if (sawDeclaration)
        throw SyntaxError("imports must precede declarations", line.number, col, {"declaration"});
      const std::string mod(detail::trim(content.substr(6)));
      if (!isAtomName(mod))
        throw SyntaxError("expected a module name", line.number, col + 7, {"identifier"});
      file.imports.push_back(mod);
      continue;
    }

    if (detail::startsWithWord(content, "lemma")) {
      sawDeclaration = true;
      auto [name, statement] = detail::parseDeclaration(line, 5);
      declare(name);
      std::optional<std::string> doc;
      std::size_t lastLine = li;
      if (li + 1 < lines.size() &&
          detail::startsWithWord(detail::trim(lines[li + 1].text), "doc")) {
        doc = detail::parseDocString(lines[li + 1]);
        lastLine = li + 1;
      }
      const std::size_t begin = line.offset;
      const std::size_t end = lines[lastLine].offset + lines[lastLine].text.size();
      file.lemmas.push_back(PremiseRecord::make(name, file.module, statement, doc,
                                                std::string(text.substr(begin, end - begin))));
      file.lemmaOffsets.push_back(begin);
      li = lastLine;
      continue;
    }

    if (detail::startsWithWord(content, "theorem")) {
      sawDeclaration = true;
      TheoremEntry entry;
      auto [name, statement] = detail::parseDeclaration(line, 7);
      declare(name);
      entry.name = name;
      entry.statement = statement;
      entry.line = line.number;
      std::size_t pi = li + 1;
      while (pi < lines.size() && detail::trim(detail::stripComment(lines[pi].text)).empty()) ++pi;
      if (pi >= lines.size() || detail::trim(detail::stripComment(lines[pi].text)) != "proof") {
        const std::size_t at = pi < lines.size() ? lines[pi].number : lines.size() + 1;
        throw SyntaxError("expected 'proof'", at, 1, {"'proof'"});
      }
      const Line& proofLine = lines[pi];
      const std::size_t bodyStart =
          proofLine.offset + proofLine.text.find("proof") + std::string_view("proof").size();
      std::size_t ei = pi + 1;
      while (ei < lines.size() && detail::trim(detail::stripComment(lines[ei].text)) != "end") {
        const std::string_view c = detail::trim(detail::stripComment(lines[ei].text));
        if (detail::startsWithWord(c, "theorem") || detail::startsWithWord(c, "lemma"))
          throw SyntaxError("missing 'end' before next declaration", lines[ei].number, 1, {"'end'"});
        ++ei;
      }
      if (ei >= lines.size()) {
        const std::size_t lastCol = lines.empty() ? 1 : lines.back().text.size() + 1;
        throw SyntaxError("missing 'end'", lines.empty() ? 1 : lines.back().number, lastCol,
                          {"'end'"});
      }
      const std::size_t bodyEnd = lines[ei].offset + lines[ei].text.find("end");
      entry.body = {bodyStart, bodyEnd - bodyStart};
      const std::size_t bodyCol = proofLine.text.find("proof") + 6;
      entry.script = parseScript(text.substr(bodyStart, bodyEnd - bodyStart),
                                 {proofLine.number, bodyCol}, bodyStart);
      file.theorems.push_back(std::move(entry));
      li = ei;
      continue;
    }

    throw SyntaxError("unexpected line", line.number, col, {"'import'", "'lemma'", "'theorem'"});
  }
  return file;
}

inline std::string readTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline CorpusFile loadTheoremFile(const std::string& path) {
  return parseTheoremFile(readTextFile(path), path);
}

// Canonical rendering; parseTheoremFile followed by renderTheoremFile is the
// identity on files already in this form.
inline std::string renderTheoremFile(const CorpusFile& file) {
  std::string out;
  for (const auto& m : file.imports) out += "import " + m + "\n";
  // Declarations in source order.
  struct Decl {
    std::size_t offset;
    std::string text;
  };
  std::vector<Decl> decls;
  for (std::size_t i = 0; i < file.lemmas.size(); ++i) {
    const PremiseRecord& l = file.lemmas[i];
    std::string d = "lemma " + l.name + " : " + l.signatureText + "\n";
    if (l.docstring) d += "doc " + detail::quote(*l.docstring) + "\n";
    decls.push_back({i < file.lemmaOffsets.size() ? file.lemmaOffsets[i] : 0, std::move(d)});
  }
  for (const auto& t : file.theorems) {
    std::string d = "theorem " + t.name + " : " + toString(t.statement) + "\nproof\n";
    for (const auto& step : t.script.steps) d += "  " + toString(step) + "\n";
    d += "end\n";
    decls.push_back({t.body.offset, std::move(d)});
  }
  std::stable_sort(decls.begin(), decls.end(),
                   [](const Decl& a, const Decl& b) { return a.offset < b.offset; });
  for (std::size_t i = 0; i < decls.size(); ++i) {
    if (i > 0 || !file.imports.empty()) out += "\n";
    out += decls[i].text;
  }
  return out;
}

// State after the first `steps` ground-truth tactics.
inline ProofState replayPrefix(const TheoremEntry& entry, std::size_t steps,
                               const LemmaTable& lemmas) {
  if (steps > entry.script.size())
    throw Error("prefix length " + std::to_string(steps) + " exceeds script length " +
                std::to_string(entry.script.size()));
  ProofState state(entry.goal(), scopeNames(lemmas));
  for (std::size_t i = 0; i < steps; ++i) {
    StepResult r = applyTactic(state, entry.script.steps[i], lemmas);
    if (!r) throw InvalidPrefix(i, r.error());
    state = std::move(r).value();
  }
  return state;
}

// Every loaded file plus the aggregated lemma library.
struct Library {
  std::vector<CorpusFile> files;
  std::vector<PremiseRecord> records;
  LemmaTable lemmas;
  std::map<std::string, std::string> lemmaModule;

  // Lemmas of the file's own module and its imports.
  LemmaTable lemmasFor(const CorpusFile& file) const {
    std::set<std::string> modules(file.imports.begin(), file.imports.end());
    modules.insert(file.module);
    LemmaTable out;
    for (const auto& r : records)
      if (modules.count(r.module)) out.emplace(r.name, r.statement);
    return out;
  }

  std::set<std::string> importedModules(const CorpusFile& file) const {
    std::set<std::string> modules(file.imports.begin(), file.imports.end());
    modules.insert(file.module);
    return modules;
  }

  const CorpusFile* findFile(std::string_view module) const {
    for (const auto& f : files)
      if (f.module == module) return &f;
    return nullptr;
  }

  std::pair<const CorpusFile*, const TheoremEntry*> findTheorem(std::string_view name) const {
    for (const auto& f : files)
      if (const TheoremEntry* t = f.findTheorem(name)) return {&f, t};
    return {nullptr, nullptr};
  }

  std::size_t theoremCount() const {
    std::size_t n = 0;
    for (const auto& f : files) n += f.theorems.size();
    return n;
  }
};

inline Library buildLibrary(std::vector<CorpusFile> files) {
  std::sort(files.begin(), files.end(),
            [](const CorpusFile& a, const CorpusFile& b) { return a.path < b.path; });
  Library lib;
  std::map<std::string, std::string> modulePath;
  std::map<std::string, std::string> declaredIn;
  for (const auto& f : files) {
    if (auto [it, ok] = modulePath.emplace(f.module, f.path); !ok)
      throw DuplicateName("module " + f.module + " (" + it->second + ", " + f.path + ")");
    auto claim = [&](const std::string& name) {
      if (auto [it, ok] = declaredIn.emplace(name, f.path); !ok)
        throw DuplicateName(name + " (" + it->second + ", " + f.path + ")");
    };
    for (const auto& l : f.lemmas) claim(l.name);
    for (const auto& t : f.theorems) claim(t.name);
  }
  for (const auto& f : files) {
    for (const auto& m : f.imports)
      if (!modulePath.count(m)) throw Error(f.path + ": unknown module '" + m + "'");
    for (const auto& l : f.lemmas) {
      lib.records.push_back(l);
      lib.lemmas.emplace(l.name, l.statement);
      lib.lemmaModule.emplace(l.name, l.module);
    }
  }
  lib.files = std::move(files);
  return lib;
}

inline Library loadLibrary(std::vector<std::string> paths) {
  std::sort(paths.begin(), paths.end());
  std::vector<CorpusFile> files;
  for (const auto& p : paths) files.push_back(loadTheoremFile(p));
  return buildLibrary(std::move(files));
}

inline std::vector<std::string> listTheoremFiles(const std::string& dir) {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".thy") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

inline Library loadLibraryDir(const std::string& dir) { return loadLibrary(listTheoremFiles(dir)); }

struct ValidationIssue {
  std::string path;
  std::string theorem;
  std::string message;
};

// Full-script replay of every theorem. Without `allowSorry` each proof must
// close with no sorry; with it, sorry-closed theorems are accepted.
inline std::vector<ValidationIssue> validateLibrary(const Library& lib, bool allowSorry) {
  std::vector<ValidationIssue> issues;
  for (const auto& f : lib.files) {
    const LemmaTable lemmas = lib.lemmasFor(f);
    for (const auto& t : f.theorems) {
      const ProofOutcome o = runScript(t.goal(), t.script, lemmas);
      if (o.status == ProofOutcome::Status::Failed) {
        issues.push_back({f.path, t.name,
                          "step " + std::to_string(o.failedStep) + ": " + o.error->message});
      } else if (o.status == ProofOutcome::Status::Open) {
        issues.push_back({f.path, t.name, std::to_string(o.remaining.size()) + " goals remain"});
      } else if (o.usedSorry && !allowSorry) {
        issues.push_back({f.path, t.name, "proof uses sorry"});
      }
    }
  }
  return issues;
}

}  // namespace copilot
