#pragma once

// Line-based unified diffs in the format accepted by `patch -p1`.

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

namespace copilot {

namespace detail {

struct DiffLine {
  std::string_view text;  // without the newline
  bool newline;           // false only for an unterminated last line

  friend bool operator==(const DiffLine&, const DiffLine&) = default;
};

inline std::vector<DiffLine> diffLines(std::string_view s) {
  std::vector<DiffLine> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t eol = s.find('\n', pos);
    if (eol == std::string_view::npos) {
      out.push_back({s.substr(pos), false});
      break;
    }
    out.push_back({s.substr(pos, eol - pos), true});
    pos = eol + 1;
  }
  return out;
}

enum class Op : char { Keep = ' ', Del = '-', Add = '+' };

struct Edit {
  Op op;
  std::size_t a;  // index into old lines (Keep/Del)
  std::size_t b;  // index into new lines (Keep/Add)
};

// Common prefix and suffix are matched directly; the middle goes through a
// quadratic LCS table, which is fine for edits confined to a few lines.
inline std::vector<Edit> diffEdits(const std::vector<DiffLine>& x, const std::vector<DiffLine>& y) {
  std::size_t pre = 0;
  while (pre < x.size() && pre < y.size() && x[pre] == y[pre]) ++pre;
  std::size_t suf = 0;
  while (suf < x.size() - pre && suf < y.size() - pre &&
         x[x.size() - 1 - suf] == y[y.size() - 1 - suf])
    ++suf;
  const std::size_t n = x.size() - pre - suf, m = y.size() - pre - suf;
  std::vector<std::vector<std::size_t>> lcs(n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      lcs[i][j] = x[pre + i] == y[pre + j] ? lcs[i + 1][j + 1] + 1
                                           : std::max(lcs[i + 1][j], lcs[i][j + 1]);
  std::vector<Edit> edits;
  for (std::size_t k = 0; k < pre; ++k) edits.push_back({Op::Keep, k, k});
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && x[pre + i] == y[pre + j]) {
      edits.push_back({Op::Keep, pre + i++, pre + j++});
    } else if (j < m && (i == n || lcs[i][j + 1] >= lcs[i + 1][j])) {
      edits.push_back({Op::Add, pre + i, pre + j++});
    } else {
      edits.push_back({Op::Del, pre + i++, pre + j});
    }
  }
  for (std::size_t k = 0; k < suf; ++k)
    edits.push_back({Op::Keep, x.size() - suf + k, y.size() - suf + k});
  // Deletions before additions inside each change block, as diff(1) prints them.
  for (std::size_t s = 0; s < edits.size();) {
    if (edits[s].op == Op::Keep) {
      ++s;
      continue;
    }
    std::size_t e = s;
    while (e < edits.size() && edits[e].op != Op::Keep) ++e;
    std::stable_partition(edits.begin() + static_cast<std::ptrdiff_t>(s),
                          edits.begin() + static_cast<std::ptrdiff_t>(e),
                          [](const Edit& d) { return d.op == Op::Del; });
    s = e;
  }
  return edits;
}

inline std::string hunkRange(std::size_t start, std::size_t count) {
  // An empty range names the line before it.
  const std::size_t shown = count == 0 ? start : start + 1;
  return std::to_string(shown) + "," + std::to_string(count);
}

}  // namespace detail

// Empty when the texts are equal.
inline std::string unifiedDiff(std::string_view path, std::string_view before,
                               std::string_view after, std::size_t context = 3) {
  using detail::Op;
  const auto x = detail::diffLines(before);
  const auto y = detail::diffLines(after);
  const auto edits = detail::diffEdits(x, y);

  std::vector<std::size_t> changed;
  for (std::size_t k = 0; k < edits.size(); ++k)
    if (edits[k].op != Op::Keep) changed.push_back(k);
  if (changed.empty()) return {};

  std::string out = "--- a/" + std::string(path) + "\n+++ b/" + std::string(path) + "\n";
  auto emit = [&](const detail::DiffLine& l, char tag) {
    out += tag;
    out += l.text;
    out += '\n';
    if (!l.newline) out += "\\ No newline at end of file\n";
  };
  std::size_t c = 0;
  while (c < changed.size()) {
    // Extend the hunk while the next change is within two context windows.
    std::size_t last = c;
    while (last + 1 < changed.size() && changed[last + 1] - changed[last] <= 2 * context + 1) ++last;
    const std::size_t from = changed[c] >= context ? changed[c] - context : 0;
    const std::size_t to = std::min(edits.size(), changed[last] + context + 1);
    std::size_t oldCount = 0, newCount = 0;
    for (std::size_t k = from; k < to; ++k) {
      if (edits[k].op != Op::Add) ++oldCount;
      if (edits[k].op != Op::Del) ++newCount;
    }
    out += "@@ -" + detail::hunkRange(edits[from].a, oldCount) + " +" +
           detail::hunkRange(edits[from].b, newCount) + " @@\n";
    for (std::size_t k = from; k < to; ++k) {
      const auto& e = edits[k];
      if (e.op == Op::Add) emit(y[e.b], '+');
      else emit(x[e.a], static_cast<char>(e.op));
    }
    c = last + 1;
  }
  return out;
}

}  // namespace copilot
