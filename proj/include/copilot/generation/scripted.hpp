#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "copilot/generation/generator.hpp"

namespace copilot {

// Fixture lookup generator: exact goal text -> candidate list.
// File format: one `<goal text>\t<tactic>\t<score>` record per line.
class ScriptedGenerator final : public Generator {
 public:
  using Table = std::map<std::string, std::vector<ScoredText>, std::less<>>;

  explicit ScriptedGenerator(Table table, GeneratorParams params = {})
      : table_(std::move(table)), params_(params) {
    validate(params_);
  }

  static Table parseFixture(std::string_view text) {
    Table table;
    std::size_t lineNo = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      std::string_view line = text.substr(pos, eol - pos);
      pos = eol + 1;
      ++lineNo;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) continue;
      const auto t1 = line.find('\t');
      const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
      if (t2 == std::string_view::npos)
        throw SyntaxError("expected <goal>\\t<tactic>\\t<score>", lineNo, 1, {"tab"});
      const std::string_view goal = line.substr(0, t1);
      const std::string_view tactic = line.substr(t1 + 1, t2 - t1 - 1);
      const std::string scoreText(line.substr(t2 + 1));
      double score = 0.0;
      std::size_t used = 0;
      try {
        score = std::stod(scoreText, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != scoreText.size() || !(score > 0.0 && score <= 1.0))
        throw SyntaxError("score must be a number in (0, 1]", lineNo, t2 + 2, {"score"});
      if (goal.empty() || tactic.empty())
        throw SyntaxError("empty goal or tactic", lineNo, 1, {"text"});
      table[std::string(goal)].push_back({std::string(tactic), score});
    }
    return table;
  }

  static ScriptedGenerator fromFile(const std::string& path, GeneratorParams params = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open scripted fixture '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ScriptedGenerator(parseFixture(ss.str()), params);
  }

  std::vector<ScoredText> generate(std::string_view input,
                                   std::string_view prefix = {}) const override {
    if (input.empty()) throw EmptyInput();
    auto it = table_.find(input);
    if (it == table_.end()) return {};
    return finalizeOutputs(it->second, params_, prefix);
  }

  const GeneratorParams& params() const noexcept override { return params_; }

 private:
  Table table_;
  GeneratorParams params_;
};

}  // namespace copilot
