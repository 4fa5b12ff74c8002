#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "copilot/error.hpp"

namespace copilot {

enum class FormulaKind : std::uint8_t { Atom, True, False, And, Or, Imp };

// Immutable, structurally shared propositional formula in canonical form
// (negation and biconditional are desugared by the parser). Copies are cheap.
class Formula {
 public:
  // The default formula is True.
  Formula();

  static Formula atom(std::string name);
  static Formula truth();
  static Formula falsity();
  static Formula conj(Formula lhs, Formula rhs);
  static Formula disj(Formula lhs, Formula rhs);
  static Formula imp(Formula lhs, Formula rhs);
  static Formula negation(Formula f) { return imp(std::move(f), falsity()); }

  FormulaKind kind() const noexcept;
  bool is(FormulaKind k) const noexcept { return kind() == k; }
  bool isBinary() const noexcept {
    return kind() == FormulaKind::And || kind() == FormulaKind::Or ||
           kind() == FormulaKind::Imp;
  }
  // Atom name; empty for non-atoms.
  const std::string& name() const noexcept;
  // Children of binary connectives. Undefined for leaves.
  const Formula& lhs() const noexcept;
  const Formula& rhs() const noexcept;

  std::size_t hash() const noexcept;
  // Node count of the canonical tree.
  std::size_t size() const noexcept;

  friend bool operator==(const Formula& a, const Formula& b) noexcept;
  friend bool operator!=(const Formula& a, const Formula& b) noexcept { return !(a == b); }

  // Total order: kind, then atom name, then children left to right.
  static int compare(const Formula& a, const Formula& b) noexcept;
  friend bool operator<(const Formula& a, const Formula& b) noexcept {
    return compare(a, b) < 0;
  }

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula binary(FormulaKind kind, Formula lhs, Formula rhs);

  std::shared_ptr<const Node> node_;
};

struct Formula::Node {
  FormulaKind kind;
  std::string name;
  Formula lhs;
  Formula rhs;
  std::size_t hash;
  std::size_t size;
};

namespace detail {

inline std::size_t mixHash(std::size_t seed, std::size_t v) noexcept {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace detail

inline bool isReservedWord(std::string_view word) {
  return word == "True" || word == "False";
}

inline bool isIdentStart(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

inline bool isIdentChar(char c) {
  return isIdentStart(c) || (c >= '0' && c <= '9') || c == '_';
}

inline bool isAtomName(std::string_view s) {
  if (s.empty() || !isIdentStart(s.front())) return false;
  for (char c : s)
    if (!isIdentChar(c)) return false;
  return !isReservedWord(s);
}

// Hypothesis and lemma references may carry `.` segments such as `h.1`.
inline bool isReferenceName(std::string_view s) {
  if (s.empty() || !isIdentStart(s.front())) return false;
  bool afterDot = false;
  for (char c : s) {
    if (c == '.') {
      if (afterDot) return false;
      afterDot = true;
      continue;
    }
    if (!isIdentChar(c)) return false;
    afterDot = false;
  }
  return !afterDot && !isReservedWord(s);
}

// ---------------------------------------------------------------------------
// Construction

inline Formula::Formula() : Formula(truth()) {}

inline Formula Formula::truth() {
  static const auto node = std::make_shared<const Node>(
      Node{FormulaKind::True, {}, Formula(nullptr), Formula(nullptr),
           detail::mixHash(0x51, 1), 1});
  return Formula(node);
}

inline Formula Formula::falsity() {
  static const auto node = std::make_shared<const Node>(
      Node{FormulaKind::False, {}, Formula(nullptr), Formula(nullptr),
           detail::mixHash(0x51, 2), 1});
  return Formula(node);
}

inline Formula Formula::atom(std::string name) {
  const std::size_t h = detail::mixHash(0x51, std::hash<std::string>{}(name));
  return Formula(std::make_shared<const Node>(
      Node{FormulaKind::Atom, std::move(name), Formula(nullptr), Formula(nullptr), h, 1}));
}

inline Formula Formula::binary(FormulaKind kind, Formula lhs, Formula rhs) {
  std::size_t h = detail::mixHash(static_cast<std::size_t>(kind) * 7919, lhs.hash());
  h = detail::mixHash(h, rhs.hash());
  const std::size_t sz = 1 + lhs.size() + rhs.size();
  return Formula(std::make_shared<const Node>(
      Node{kind, {}, std::move(lhs), std::move(rhs), h, sz}));
}

inline Formula Formula::conj(Formula lhs, Formula rhs) {
  return binary(FormulaKind::And, std::move(lhs), std::move(rhs));
}
inline Formula Formula::disj(Formula lhs, Formula rhs) {
  return binary(FormulaKind::Or, std::move(lhs), std::move(rhs));
}
inline Formula Formula::imp(Formula lhs, Formula rhs) {
  return binary(FormulaKind::Imp, std::move(lhs), std::move(rhs));
}

inline FormulaKind Formula::kind() const noexcept { return node_->kind; }
inline const std::string& Formula::name() const noexcept { return node_->name; }
inline const Formula& Formula::lhs() const noexcept { return node_->lhs; }
inline const Formula& Formula::rhs() const noexcept { return node_->rhs; }
inline std::size_t Formula::hash() const noexcept { return node_->hash; }
inline std::size_t Formula::size() const noexcept { return node_->size; }

inline bool operator==(const Formula& a, const Formula& b) noexcept {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.size() != b.size() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case FormulaKind::Atom:
      return a.name() == b.name();
    case FormulaKind::True:
    case FormulaKind::False:
      return true;
    default:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

inline int Formula::compare(const Formula& a, const Formula& b) noexcept {
  if (a.node_ == b.node_) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case FormulaKind::Atom:
      return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
    case FormulaKind::True:
    case FormulaKind::False:
      return 0;
    default: {
      const int c = compare(a.lhs(), b.lhs());
      return c != 0 ? c : compare(a.rhs(), b.rhs());
    }
  }
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

// Binding strength of the printed connectives; leaves bind tightest.
inline int precedence(FormulaKind k) {
  switch (k) {
    case FormulaKind::Imp: return 1;
    case FormulaKind::Or: return 2;
    case FormulaKind::And: return 3;
    default: return 4;
  }
}

inline const char* connective(FormulaKind k) {
  switch (k) {
    case FormulaKind::Imp: return " -> ";
    case FormulaKind::Or: return " \\/ ";
    case FormulaKind::And: return " /\\ ";
    default: return "";
  }
}

inline void render(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case FormulaKind::Atom: out += f.name(); return;
    case FormulaKind::True: out += "True"; return;
    case FormulaKind::False: out += "False"; return;
    default: break;
  }
  // All binary connectives are right-associative.
  const int p = precedence(f.kind());
  const bool wrapLeft = precedence(f.lhs().kind()) <= p;
  const bool wrapRight = precedence(f.rhs().kind()) < p;
  if (wrapLeft) out += '(';
  render(f.lhs(), out);
  if (wrapLeft) out += ')';
  out += connective(f.kind());
  if (wrapRight) out += '(';
  render(f.rhs(), out);
  if (wrapRight) out += ')';
}

}  // namespace detail

// Minimal-parenthesis rendering; parseFormula(toString(f)) == f.
inline std::string toString(const Formula& f) {
  std::string out;
  detail::render(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;
};

namespace detail {

enum class Tok { Ident, True, False, Not, And, Or, Imp, Iff, LParen, RParen, End };

inline const char* tokName(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::True: return "'True'";
    case Tok::False: return "'False'";
    case Tok::Not: return "'~'";
    case Tok::And: return "'/\\'";
    case Tok::Or: return "'\\/'";
    case Tok::Imp: return "'->'";
    case Tok::Iff: return "'<->'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::End: return "end of input";
  }
  return "?";
}

class FormulaParser {
 public:
  FormulaParser(std::string_view text, SourcePos origin)
      : text_(text), line_(origin.line), col_(origin.column) {
    advance();
  }

  Formula parseAll() {
    Formula f = parseIff();
    if (tok_ != Tok::End)
      fail("unexpected " + std::string(tokName(tok_)),
           {"'->'", "'/\\'", "'\\/'", "'<->'", "')'", "end of input"});
    return f;
  }

 private:
  Formula parseIff() {
    Formula lhs = parseImp();
    if (tok_ == Tok::Iff) {
      advance();
      Formula rhs = parseIff();
      return Formula::conj(Formula::imp(lhs, rhs), Formula::imp(rhs, lhs));
    }
    return lhs;
  }

  Formula parseImp() {
    Formula lhs = parseOr();
    if (tok_ == Tok::Imp) {
      advance();
      return Formula::imp(std::move(lhs), parseImp());
    }
    return lhs;
  }

  Formula parseOr() {
    Formula lhs = parseAnd();
    if (tok_ == Tok::Or) {
      advance();
      return Formula::disj(std::move(lhs), parseOr());
    }
    return lhs;
  }

  Formula parseAnd() {
    Formula lhs = parseUnary();
    if (tok_ == Tok::And) {
      advance();
      return Formula::conj(std::move(lhs), parseAnd());
    }
    return lhs;
  }

  Formula parseUnary() {
    switch (tok_) {
      case Tok::Not:
        advance();
        return Formula::negation(parseUnary());
      case Tok::True:
        advance();
        return Formula::truth();
      case Tok::False:
        advance();
        return Formula::falsity();
      case Tok::Ident: {
        Formula f = Formula::atom(std::string(ident_));
        advance();
        return f;
      }
      case Tok::LParen: {
        const SourcePos open = tokPos_;
        advance();
        Formula f = parseIff();
        if (tok_ != Tok::RParen) {
          fail(tok_ == Tok::End ? "unclosed '(' opened at " + std::to_string(open.line) +
                                      ":" + std::to_string(open.column)
                                : "unexpected " + std::string(tokName(tok_)),
               {"')'"});
        }
        advance();
        return f;
      }
      default:
        fail("unexpected " + std::string(tokName(tok_)),
             {"identifier", "'True'", "'False'", "'~'", "'('"});
    }
  }

  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) const {
    throw SyntaxError(msg, tokPos_.line, tokPos_.column, std::move(expected));
  }

  void bump(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void advance() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r'))
      bump(1);
    tokPos_ = {line_, col_};
    if (pos_ >= text_.size()) {
      tok_ = Tok::End;
      return;
    }
    const std::string_view rest = text_.substr(pos_);
    auto lit = [&](std::string_view s, Tok t) {
      if (rest.substr(0, s.size()) != s) return false;
      tok_ = t;
      bump(s.size());
      return true;
    };
    if (lit("<->", Tok::Iff) || lit("->", Tok::Imp) || lit("/\\", Tok::And) ||
        lit("\\/", Tok::Or) || lit("~", Tok::Not) || lit("(", Tok::LParen) ||
        lit(")", Tok::RParen))
      return;
    if (isIdentStart(rest.front())) {
      std::size_t n = 1;
      while (n < rest.size() && isIdentChar(rest[n])) ++n;
      ident_ = rest.substr(0, n);
      tok_ = ident_ == "True" ? Tok::True : ident_ == "False" ? Tok::False : Tok::Ident;
      bump(n);
      return;
    }
    throw SyntaxError("unexpected character '" + std::string(1, rest.front()) + "'",
                      tokPos_.line, tokPos_.column,
                      {"identifier", "connective", "'('", "')'"});
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t col_;
  Tok tok_ = Tok::End;
  SourcePos tokPos_;
  std::string_view ident_;
};

}  // namespace detail

// Grammar: `~` > `/\` > `\/` > `->` > `<->`, binary connectives right-assoc.
inline Formula parseFormula(std::string_view text, SourcePos origin = {}) {
  bool blank = true;
  for (char c : text)
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') blank = false;
  if (blank) throw SyntaxError("empty formula", origin.line, origin.column, {"formula"});
  return detail::FormulaParser(text, origin).parseAll();
}

// Distinct atom names, sorted.
inline std::vector<std::string> atomsOf(const Formula& f) {
  std::vector<std::string> out;
  std::vector<const Formula*> stack{&f};
  while (!stack.empty()) {
    const Formula* cur = stack.back();
    stack.pop_back();
    if (cur->is(FormulaKind::Atom)) {
      out.push_back(cur->name());
    } else if (cur->isBinary()) {
      stack.push_back(&cur->lhs());
      stack.push_back(&cur->rhs());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace copilot

template <>
struct std::hash<copilot::Formula> {
  std::size_t operator()(const copilot::Formula& f) const noexcept { return f.hash(); }
};
