#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "copilot/kernel/formula.hpp"

namespace copilot {

enum class TacticKind : std::uint8_t {
  Intro,
  Exact,
  Assumption,
  Apply,
  Split,
  Left,
  Right,
  Cases,
  Trivial,
  Exfalso,
  Contradiction,
  Sorry,
};

inline constexpr std::string_view tacticKeyword(TacticKind k) {
  switch (k) {
    case TacticKind::Intro: return "intro";
    case TacticKind::Exact: return "exact";
    case TacticKind::Assumption: return "assumption";
    case TacticKind::Apply: return "apply";
    case TacticKind::Split: return "split";
    case TacticKind::Left: return "left";
    case TacticKind::Right: return "right";
    case TacticKind::Cases: return "cases";
    case TacticKind::Trivial: return "trivial";
    case TacticKind::Exfalso: return "exfalso";
    case TacticKind::Contradiction: return "contradiction";
    case TacticKind::Sorry: return "sorry";
  }
  return "";
}

inline constexpr bool takesArgument(TacticKind k) {
  return k == TacticKind::Intro || k == TacticKind::Exact || k == TacticKind::Apply ||
         k == TacticKind::Cases;
}

struct Tactic {
  TacticKind kind = TacticKind::Sorry;
  // Bound name for intro, reference for exact/apply/cases; empty otherwise.
  std::string arg;

  static Tactic intro(std::string name) { return {TacticKind::Intro, std::move(name)}; }
  static Tactic exact(std::string ref) { return {TacticKind::Exact, std::move(ref)}; }
  static Tactic apply(std::string ref) { return {TacticKind::Apply, std::move(ref)}; }
  static Tactic cases(std::string ref) { return {TacticKind::Cases, std::move(ref)}; }
  static Tactic of(TacticKind k) { return {k, {}}; }

  friend bool operator==(const Tactic&, const Tactic&) = default;
};

inline std::string toString(const Tactic& t) {
  std::string out(tacticKeyword(t.kind));
  if (takesArgument(t.kind)) {
    out += ' ';
    out += t.arg;
  }
  return out;
}

// Location of one step in the parsed text. Line and column are 1-based,
// offset is the 0-based byte offset of the step's first character.
struct SourceSpan {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t offset = 0;
  std::size_t length = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

struct TacticScript {
  std::vector<Tactic> steps;
  std::vector<SourceSpan> spans;

  std::size_t size() const noexcept { return steps.size(); }
  bool empty() const noexcept { return steps.empty(); }

  bool containsSorry() const {
    for (const auto& t : steps)
      if (t.kind == TacticKind::Sorry) return true;
    return false;
  }

  friend bool operator==(const TacticScript&, const TacticScript&) = default;
};

// Steps joined with the given separator.
inline std::string toString(const TacticScript& script, std::string_view sep = "; ") {
  std::string out;
  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    if (i) out += sep;
    out += toString(script.steps[i]);
  }
  return out;
}

inline TacticScript makeScript(std::vector<Tactic> steps) {
  TacticScript s;
  s.steps = std::move(steps);
  s.spans.resize(s.steps.size());
  return s;
}

namespace detail {

inline std::optional<TacticKind> keywordKind(std::string_view word) {
  for (int k = 0; k <= static_cast<int>(TacticKind::Sorry); ++k) {
    const auto kind = static_cast<TacticKind>(k);
    if (tacticKeyword(kind) == word) return kind;
  }
  return std::nullopt;
}

inline bool isRefChar(char c) { return isIdentChar(c) || c == '.'; }

}  // namespace detail

// Steps split on newline or `;`; `--` starts a line comment. Positions are
// reported relative to `origin` (line/column) and `baseOffset` (bytes).
inline TacticScript parseScript(std::string_view text, SourcePos origin = {},
                                std::size_t baseOffset = 0) {
  TacticScript script;
  std::size_t line = origin.line;
  std::size_t col = origin.column;
  std::size_t i = 0;

  auto bump = [&] {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  auto skipBlank = [&] {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r')) bump();
  };
  auto skipComment = [&] {
    if (i + 1 < text.size() && text[i] == '-' && text[i + 1] == '-')
      while (i < text.size() && text[i] != '\n') bump();
  };
  auto atStepEnd = [&] {
    return i >= text.size() || text[i] == '\n' || text[i] == ';' ||
           (i + 1 < text.size() && text[i] == '-' && text[i + 1] == '-');
  };
  auto readWord = [&] {
    const std::size_t start = i;
    while (i < text.size() && detail::isRefChar(text[i])) bump();
    return text.substr(start, i - start);
  };

  while (i < text.size()) {
    skipBlank();
    skipComment();
    if (i >= text.size()) break;
    if (text[i] == '\n' || text[i] == ';') {
      bump();
      continue;
    }
    const SourcePos stepPos{line, col};
    const std::size_t stepStart = i;
    if (!isIdentStart(text[i]))
      throw SyntaxError("unexpected character '" + std::string(1, text[i]) + "'", line, col,
                        {"tactic"});
    const std::string_view word = readWord();
    const auto kind = detail::keywordKind(word);
    if (!kind)
      throw SyntaxError("unknown tactic '" + std::string(word) + "'", stepPos.line,
                        stepPos.column, {"tactic"});
    Tactic tactic{*kind, {}};
    skipBlank();
    if (takesArgument(*kind)) {
      if (atStepEnd())
        throw SyntaxError("missing argument for '" + std::string(word) + "'", line, col,
                          {"identifier"});
      const SourcePos argPos{line, col};
      const std::string_view arg = readWord();
      const bool ok = *kind == TacticKind::Intro ? isAtomName(arg) : isReferenceName(arg);
      if (!ok)
        throw SyntaxError("bad argument for '" + std::string(word) + "'", argPos.line,
                          argPos.column, {"identifier"});
      tactic.arg = std::string(arg);
      skipBlank();
    }
    const std::size_t stepEnd = i;
    if (!atStepEnd())
      throw SyntaxError("unexpected extra argument", line, col, {"';'", "newline"});
    script.steps.push_back(std::move(tactic));
    // Trailing blanks are excluded from the span.
    std::size_t len = stepEnd - stepStart;
    while (len > 0 && (text[stepStart + len - 1] == ' ' || text[stepStart + len - 1] == '\t' ||
                       text[stepStart + len - 1] == '\r'))
      --len;
    script.spans.push_back({stepPos.line, stepPos.column, baseOffset + stepStart, len});
  }
  return script;
}

inline Tactic parseTactic(std::string_view text) {
  TacticScript s = parseScript(text);
  if (s.steps.size() != 1)
    throw SyntaxError(s.steps.empty() ? "empty tactic" : "expected a single tactic", 1, 1,
                      {"tactic"});
  return s.steps.front();
}

}  // namespace copilot
