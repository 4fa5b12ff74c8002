#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "copilot/premises/index.hpp"
#include "test_support.hpp"

namespace copilot {
namespace {

std::string readBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EmbeddingMatrix goldenMatrix() {
  EmbeddingMatrix m(4, 8);
  for (std::size_t i = 0; i < 32; ++i) m.data[i] = (static_cast<float>(i) - 7.5f) / 4.0f;
  m.at(1, 3) = 1e-7f;
  m.at(2, 5) = -0.0f;
  m.at(3, 7) = 3.4e38f;
  return m;
}

// Naive oracle: every dot product, then a stable sort by descending score.
std::vector<ScoredRow> bruteForceTopK(const EmbeddingMatrix& m, const Vector& v, std::size_t k) {
  std::vector<ScoredRow> all;
  for (std::size_t i = 0; i < m.rows; ++i) {
    double d = 0;
    for (std::size_t j = 0; j < m.dim; ++j) d += double(m.at(i, j)) * double(v[j]);
    all.push_back({i, static_cast<float>(d)});
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const ScoredRow& a, const ScoredRow& b) { return a.score > b.score; });
  all.resize(std::min(k, all.size()));
  return all;
}

TEST(Npy, PayloadBytes) {
  const std::string bytes = toNpyBytes(EmbeddingMatrix(1, 2, {1.0f, 2.0f}));
  ASSERT_EQ(bytes.size() % 64, 8u);
  EXPECT_EQ(bytes.substr(0, 8), std::string("\x93NUMPY\x01\x00", 8));
  EXPECT_EQ(bytes.substr(bytes.size() - 8), std::string("\x00\x00\x80\x3F\x00\x00\x00\x40", 8));
  const std::size_t headerLen = static_cast<unsigned char>(bytes[8]) | (static_cast<unsigned char>(bytes[9]) << 8);
  EXPECT_EQ((10 + headerLen) % 64, 0u);
  EXPECT_EQ(bytes[9 + headerLen], '\n');
}

TEST(Npy, GoldenFileMatches) {
  const std::string golden = readBytes(std::string(COPILOT_FIXTURE_DIR) + "/golden_4x8.npy");
  ASSERT_EQ(golden.size(), 256u);
  EXPECT_EQ(toNpyBytes(goldenMatrix()), golden);
  const EmbeddingMatrix m = fromNpyBytes(golden);
  EXPECT_EQ(m.rows, 4u);
  EXPECT_EQ(m.dim, 8u);
  EXPECT_EQ(toNpyBytes(m), golden);
  EXPECT_TRUE(std::signbit(m.at(2, 5)));
}

TEST(Npy, RoundTripIsByteIdentical) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<float> u(-1e6f, 1e6f);
  for (int i = 0; i < 30; ++i) {
    EmbeddingMatrix m(1 + rng() % 40, 16 + rng() % 300);
    for (auto& x : m.data) x = u(rng);
    const std::string bytes = toNpyBytes(m);
    const EmbeddingMatrix back = fromNpyBytes(bytes);
    ASSERT_EQ(back, m);
    ASSERT_EQ(toNpyBytes(back), bytes);
  }
  const auto path = std::filesystem::temp_directory_path() / "copilot_npy_roundtrip.npy";
  writeNpyFile(goldenMatrix(), path.string());
  EXPECT_EQ(readNpyFile(path.string()), goldenMatrix());
  std::filesystem::remove(path);
}

TEST(Npy, Rejections) {
  const std::string good = toNpyBytes(goldenMatrix());
  std::string bigEndian = good;
  bigEndian.replace(bigEndian.find("<f4"), 3, ">f4");
  EXPECT_THROW(fromNpyBytes(bigEndian), FormatError);
  std::string fortran = good;
  fortran.replace(fortran.find("False"), 5, "True ");
  EXPECT_THROW(fromNpyBytes(fortran), FormatError);
  std::string magic = good;
  magic[1] = 'X';
  EXPECT_THROW(fromNpyBytes(magic), FormatError);
  std::string version = good;
  version[6] = 2;
  EXPECT_THROW(fromNpyBytes(version), FormatError);
  EXPECT_THROW(fromNpyBytes(good.substr(0, good.size() - 4)), ShapeError);
  EXPECT_THROW(fromNpyBytes(good + "xxxx"), ShapeError);
  std::string oneDim = good;
  oneDim.replace(oneDim.find("(4, 8)"), 6, "(32,) ");
  EXPECT_THROW(fromNpyBytes(oneDim), ShapeError);
}

TEST(TopK, Examples) {
  EmbeddingMatrix id(3, 3);
  for (std::size_t i = 0; i < 3; ++i) id.at(i, i) = 1.0f;
  const Vector v(std::vector<float>{0.0f, 1.0f, 0.0f});
  EXPECT_EQ(topK(id, v, 2), (std::vector<ScoredRow>{{1, 1.0f}, {0, 0.0f}}));
  EXPECT_EQ(topK(id, v, 10).size(), 3u);
  EXPECT_THROW(topK(id, Vector(4), 1), DimensionMismatch);
  EXPECT_THROW(topK(id, v, 0), InvalidParam);
}

TEST(TopK, MatchesBruteForce) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 60; ++i) {
    const std::size_t rows = 1 + rng() % 120, dim = 16 + rng() % 100;
    EmbeddingMatrix m(rows, dim);
    // Small integer grid so that ties are frequent.
    for (auto& x : m.data) x = static_cast<float>(static_cast<int>(rng() % 5) - 2);
    Vector v(dim);
    for (auto& x : v.values) x = static_cast<float>(static_cast<int>(rng() % 3) - 1);
    const std::size_t k = 1 + rng() % (rows + 5);
    ASSERT_EQ(topK(m, v, k), bruteForceTopK(m, v, k));
  }
}

std::vector<PremiseRecord> fixtureRecords() {
  std::vector<PremiseRecord> out;
  const char* statements[] = {"A -> B", "B -> C", "A /\\ B -> A", "C \\/ D", "D -> D",
                              "E -> F", "F /\\ E", "G", "H -> H", "A -> B -> A"};
  for (int i = 0; i < 10; ++i)
    out.push_back(PremiseRecord::make("p" + std::to_string(i), i < 5 ? "Basic" : "Extra",
                                      parseFormula(statements[i]),
                                      i % 2 ? std::optional<std::string>("doc " + std::to_string(i))
                                            : std::nullopt,
                                      std::string("lemma p") + std::to_string(i) + " : " + statements[i]));
  return out;
}

TEST(BuildIndex, ShapeAndDeterminism) {
  auto records = fixtureRecords();
  records.resize(3);
  const PremiseIndex index = buildIndex(records, EncoderSpec::hashTrigram());
  EXPECT_EQ(index.matrix.rows, 3u);
  EXPECT_EQ(index.matrix.dim, 256u);
  EXPECT_EQ(toNpyBytes(buildIndex(records, EncoderSpec::hashTrigram()).matrix), toNpyBytes(index.matrix));

  auto twins = records;
  twins.push_back(PremiseRecord::make("twin", "M", records[0].statement, std::nullopt, ""));
  const PremiseIndex t = buildIndex(twins, EncoderSpec::hashTrigram(32));
  EXPECT_TRUE(std::equal(t.matrix.row(0), t.matrix.row(0) + 32, t.matrix.row(3)));

  twins.push_back(PremiseRecord::make("twin", "M", records[1].statement, std::nullopt, ""));
  EXPECT_THROW(buildIndex(twins, EncoderSpec::hashTrigram()), DuplicateName);
  EXPECT_THROW(buildIndex({}, EncoderSpec::hashTrigram()), Error);
}

TEST(SelectPremises, AnnotationAndOracleOrder) {
  const PremiseIndex index = buildIndex(fixtureRecords(), EncoderSpec::hashTrigram());
  const ProofState state(parseSequent("h : A \xE2\x8A\xA2 A -> B"));
  const Vector goal = hashEncode(prettyGoal(state.goals[0]), 256);
  const auto oracle = bruteForceTopK(index.matrix, goal, 4);

  const auto all = selectPremises(index, state, {"Basic", "Extra"});
  ASSERT_EQ(all.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(all[i].record.name, index.records[oracle[i].row].name);
    EXPECT_EQ(all[i].score, oracle[i].score);
    EXPECT_TRUE(all[i].inScope);
    EXPECT_EQ(all[i].signatureText, all[i].record.signatureText);
    EXPECT_EQ(all[i].docstring, all[i].record.docstring);
    EXPECT_TRUE(all[i].requiredImport.empty());
  }
  for (const auto& p : selectPremises(index, state, {})) {
    EXPECT_FALSE(p.inScope);
    EXPECT_EQ(p.requiredImport, p.record.module);
    EXPECT_EQ(p.definitionSource, p.record.definitionSource);
  }
  for (const auto& p : selectPremises(index, state, {"Basic"}, 10))
    EXPECT_EQ(p.inScope, p.record.module == "Basic");
  EXPECT_THROW(selectPremises(index, ProofState(), {}), NoGoalsError);
}

TEST(SelectPremises, IndexAlignmentWithPlantedRows) {
  // Row i is one-hot at column i; the goal vector is then just its encoding,
  // so each record's score must equal the goal component at its own column.
  auto records = fixtureRecords();
  PremiseIndex index = buildIndex(records, EncoderSpec::hashTrigram(16));
  for (std::size_t i = 0; i < index.matrix.rows; ++i)
    for (std::size_t j = 0; j < 16; ++j) index.matrix.at(i, j) = i == j ? 1.0f : 0.0f;
  const ProofState state(parseSequent("\xE2\x8A\xA2 A /\\ B -> A"));
  const Vector goal = hashEncode(prettyGoal(state.goals[0]), 16);
  for (const auto& p : selectPremises(index, state, {}, 10)) {
    const std::size_t row = std::stoul(p.record.name.substr(1));
    EXPECT_EQ(p.score, goal[row]);
  }
}

TEST(PremiseFiles, JsonlFieldOrderAndRoundTrip) {
  const auto records = fixtureRecords();
  const std::string jsonl = toJsonl({records[0], records[1]});
  EXPECT_EQ(jsonl,
            "{\"name\":\"p0\",\"module\":\"Basic\",\"statement\":\"A -> B\",\"docstring\":null,"
            "\"definitionSource\":\"lemma p0 : A -> B\"}\n"
            "{\"name\":\"p1\",\"module\":\"Basic\",\"statement\":\"B -> C\",\"docstring\":\"doc 1\","
            "\"definitionSource\":\"lemma p1 : B -> C\"}\n");
  const auto back = fromJsonl(toJsonl(records));
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].name, records[i].name);
    EXPECT_EQ(back[i].statement, records[i].statement);
    EXPECT_EQ(back[i].docstring, records[i].docstring);
    EXPECT_EQ(back[i].definitionSource, records[i].definitionSource);
  }
  EXPECT_THROW(fromJsonl("{\"name\": 1}\n"), SyntaxError);

  const auto dir = std::filesystem::temp_directory_path();
  const PremiseIndex index = buildIndex(records, EncoderSpec::hashTrigram());
  saveIndex(index, (dir / "p.npy").string(), (dir / "p.jsonl").string());
  const PremiseIndex loaded = loadIndex((dir / "p.npy").string(), (dir / "p.jsonl").string());
  EXPECT_EQ(loaded.matrix, index.matrix);
  EXPECT_EQ(loaded.records.size(), index.records.size());
  EXPECT_THROW(loadIndex((dir / "p.npy").string(), (dir / "p.jsonl").string(), EncoderSpec::hashTrigram(64)),
               DimensionMismatch);
}

}  // namespace
}  // namespace copilot
