#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace copilot {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lexical or grammatical failure in formula, script, sequent or corpus text.
// Line and column are 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(std::string message, std::size_t line, std::size_t column,
              std::vector<std::string> expected = {})
      : Error(format(message, line, column, expected)),
        line_(line),
        column_(column),
        detail_(std::move(message)),
        expected_(std::move(expected)) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string format(const std::string& message, std::size_t line,
                            std::size_t column,
                            const std::vector<std::string>& expected) {
    std::string out = std::to_string(line) + ":" + std::to_string(column) +
                      ": " + message;
    if (!expected.empty()) {
      out += " (expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) out += ", ";
        out += expected[i];
      }
      out += ")";
    }
    return out;
  }

  std::size_t line_;
  std::size_t column_;
  std::string detail_;
  std::vector<std::string> expected_;
};

class DuplicateName : public Error {
 public:
  explicit DuplicateName(const std::string& what) : Error("duplicate name: " + what) {}
};

class NoGoalsError : public Error {
 public:
  NoGoalsError() : Error("no goals") {}
};

}  // namespace copilot
