#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "copilot/generation/spec.hpp"
#include "copilot/kernel/sequent.hpp"
#include "copilot/premises/npy.hpp"
#include "json.hpp"

namespace copilot {

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(got)) {}
};

struct PremiseRecord {
  std::string name;
  std::string module;
  Formula statement;
  std::string signatureText;  // toString(statement)
  std::optional<std::string> docstring;
  std::string definitionSource;

  static PremiseRecord make(std::string name, std::string module, Formula statement,
                            std::optional<std::string> doc, std::string source) {
    PremiseRecord r{std::move(name), std::move(module), statement, toString(statement),
                    std::move(doc), std::move(source)};
    return r;
  }
};

struct PremiseIndex {
  std::vector<PremiseRecord> records;
  EmbeddingMatrix matrix;
  EncoderSpec encoderSpec;
};

struct ScoredRow {
  std::size_t row;
  float score;

  friend bool operator==(const ScoredRow&, const ScoredRow&) = default;
};

// Row i is the encoding of record i's signature text.
inline PremiseIndex buildIndex(std::vector<PremiseRecord> records, const EncoderSpec& spec) {
  if (records.empty()) throw Error("cannot index an empty premise list");
  std::unordered_set<std::string> names;
  for (const auto& r : records)
    if (!names.insert(r.name).second) throw DuplicateName(r.name);
  const EncoderPtr encoder = makeEncoder(spec);
  PremiseIndex index;
  index.encoderSpec = spec;
  for (std::size_t i = 0; i < records.size(); ++i) {
    Vector v = encoder->encode(records[i].signatureText);
    if (i == 0) index.matrix = EmbeddingMatrix(records.size(), v.dim());
    if (v.dim() != index.matrix.dim) throw DimensionMismatch(index.matrix.dim, v.dim());
    std::copy(v.values.begin(), v.values.end(), index.matrix.data.begin() + i * v.dim());
  }
  index.records = std::move(records);
  return index;
}

// Scores accumulate in double and round once to float.
inline float rowScore(const EmbeddingMatrix& m, std::size_t row, const Vector& v) {
  const float* r = m.row(row);
  double acc = 0.0;
  for (std::size_t j = 0; j < m.dim; ++j)
    acc += static_cast<double>(r[j]) * static_cast<double>(v.values[j]);
  return static_cast<float>(acc);
}

// min(k, rows) best rows by score, ties to the lower row index.
inline std::vector<ScoredRow> topK(const EmbeddingMatrix& m, const Vector& v, std::size_t k) {
  if (v.dim() != m.dim) throw DimensionMismatch(m.dim, v.dim());
  if (k < 1) throw InvalidParam("k must be >= 1");
  std::vector<ScoredRow> all(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) all[i] = {i, rowScore(m, i, v)};
  const std::size_t n = std::min(k, m.rows);
  auto better = [](const ScoredRow& a, const ScoredRow& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.row < b.row;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), better);
  all.resize(n);
  return all;
}

struct AnnotatedPremise {
  PremiseRecord record;
  float score = 0.0f;
  bool inScope = false;
  // In scope: signature and docstring. Out of scope: the module to import and
  // the verbatim definition.
  std::string signatureText;
  std::optional<std::string> docstring;
  std::string requiredImport;
  std::string definitionSource;
};

inline constexpr std::size_t kDefaultPremiseCount = 4;

inline std::vector<AnnotatedPremise> selectPremises(const PremiseIndex& index,
                                                    const ProofState& state,
                                                    const std::set<std::string>& importedModules,
                                                    std::size_t k = kDefaultPremiseCount) {
  if (state.goals.empty()) throw NoGoalsError();
  const Vector goal = encode(index.encoderSpec, prettyGoal(state.goals.front()));
  std::vector<AnnotatedPremise> out;
  for (const auto& [row, score] : topK(index.matrix, goal, k)) {
    const PremiseRecord& rec = index.records[row];
    AnnotatedPremise a;
    a.record = rec;
    a.score = score;
    a.inScope = importedModules.count(rec.module) > 0;
    if (a.inScope) {
      a.signatureText = rec.signatureText;
      a.docstring = rec.docstring;
    } else {
      a.requiredImport = rec.module;
      a.definitionSource = rec.definitionSource;
    }
    out.push_back(std::move(a));
  }
  return out;
}

// premises.jsonl: one object per line with keys in the fixed order
// name, module, statement, docstring, definitionSource.
inline std::string toJsonl(const std::vector<PremiseRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["module"] = r.module;
    j["statement"] = r.signatureText;
    j["docstring"] = r.docstring ? nlohmann::ordered_json(*r.docstring) : nlohmann::ordered_json();
    j["definitionSource"] = r.definitionSource;
    out += j.dump();
    out += '\n';
  }
  return out;
}

inline std::vector<PremiseRecord> fromJsonl(std::string_view text) {
  std::vector<PremiseRecord> out;
  std::size_t pos = 0;
  std::size_t lineNo = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineNo;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      std::optional<std::string> doc;
      if (!j.at("docstring").is_null()) doc = j.at("docstring").get<std::string>();
      out.push_back(PremiseRecord::make(j.at("name").get<std::string>(),
                                        j.at("module").get<std::string>(),
                                        parseFormula(j.at("statement").get<std::string>()), doc,
                                        j.at("definitionSource").get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
      throw SyntaxError(std::string("bad premise record: ") + e.what(), lineNo, 1, {"object"});
    }
  }
  return out;
}

inline void saveIndex(const PremiseIndex& index, const std::string& npyPath,
                      const std::string& jsonlPath) {
  writeNpyFile(index.matrix, npyPath);
  std::ofstream out(jsonlPath, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + jsonlPath + "'");
  out << toJsonl(index.records);
}

inline PremiseIndex loadIndex(const std::string& npyPath, const std::string& jsonlPath,
                              EncoderSpec spec = EncoderSpec::hashTrigram()) {
  PremiseIndex index;
  index.matrix = readNpyFile(npyPath);
  std::ifstream in(jsonlPath, std::ios::binary);
  if (!in) throw Error("cannot read '" + jsonlPath + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  index.records = fromJsonl(ss.str());
  if (index.records.size() != index.matrix.rows)
    throw ShapeError("premise count does not match embedding rows");
  if (spec.kind == EncoderSpec::Kind::HashTrigram && spec.dim != index.matrix.dim)
    throw DimensionMismatch(spec.dim, index.matrix.dim);
  index.encoderSpec = spec;
  return index;
}

}  // namespace copilot
