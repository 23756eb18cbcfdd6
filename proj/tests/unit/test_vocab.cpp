#include <gtest/gtest.h>

#include <fstream>

#include <json.hpp>

#include "test_support.hpp"
#include "tokbias/error.hpp"
#include "tokbias/vocab.hpp"

using namespace tokbias;
using namespace tokbias::test;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no tokbias::Error thrown";
  return Errc::Io;
}

}  // namespace

TEST(RankFile, ParsesLines) {
  const auto v = parse_rank_file("YQ== 0\nYg== 1\r\nYWI= 2\n\n", "toy");
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.rank_of("ab"), 2u);
  EXPECT_EQ(v.at(1).bytes(), "b");
  EXPECT_EQ(decode_token(v, 2), "ab");
  EXPECT_EQ(v.profile_name(), "toy");
}

TEST(RankFile, MalformedLines) {
  EXPECT_EQ(code_of([] { parse_rank_file("YQ==\n", "x"); }), Errc::MalformedLine);
  EXPECT_EQ(code_of([] { parse_rank_file("YQ== 0 1\n", "x"); }), Errc::MalformedLine);
  EXPECT_EQ(code_of([] { parse_rank_file("Y!== 0\n", "x"); }), Errc::MalformedLine);
  EXPECT_EQ(code_of([] { parse_rank_file("YQ== -1\n", "x"); }), Errc::MalformedLine);
  EXPECT_EQ(code_of([] { parse_rank_file("YQ== 1x\n", "x"); }), Errc::MalformedLine);
  EXPECT_EQ(code_of([] { parse_rank_file(" 0\n", "x"); }), Errc::MalformedLine);
}

TEST(RankFile, Duplicates) {
  EXPECT_EQ(code_of([] { parse_rank_file("YQ== 0\nYg== 0\n", "x"); }), Errc::DuplicateRank);
  EXPECT_EQ(code_of([] { parse_rank_file("YQ== 0\nYQ== 1\n", "x"); }), Errc::DuplicateBytes);
}

TEST(RankFile, MalformedReportsLineNumber) {
  try {
    parse_rank_file("YQ== 0\nbad\n", "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(RankFile, SerializeRoundTrip) {
  const auto v = toy_vocab({{"a", 5}, {"b", 1}, {"\xFF\x00z", 9}});
  const auto text = serialize_rank_file(v);
  const auto back = parse_rank_file(text, "toy");
  ASSERT_EQ(back.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(back.records()[i], v.records()[i]);
  EXPECT_EQ(back.records().front().rank(), 1u);
}

TEST(Vocabulary, SparseRanksAndUnknown) {
  const auto v = toy_vocab({{"x", 10}, {"y", 1000000}});
  EXPECT_NE(v.find(1000000), nullptr);
  EXPECT_EQ(v.find(11), nullptr);
  EXPECT_EQ(code_of([&] { v.at(3); }), Errc::UnknownRank);
  EXPECT_EQ(code_of([&] { decode_token(v, 3); }), Errc::UnknownRank);
  EXPECT_FALSE(v.rank_of("z"));
}

TEST(Vocabulary, TokenText) {
  const TokenRecord ok(0, " 国产精品");
  ASSERT_TRUE(ok.text());
  EXPECT_EQ(*ok.text(), " 国产精品");
  EXPECT_EQ(ok.char_len(), 5u);
  const TokenRecord bad(1, "\xE5\xBE");
  EXPECT_FALSE(bad.text());
  EXPECT_FALSE(bad.char_len());
  EXPECT_EQ(token_display(bad), "\\xE5\\xBE");
  EXPECT_EQ(token_display(ok), " 国产精品");
}

TEST(Profile, LoadResolvesRankFile) {
  const auto dir = std::filesystem::temp_directory_path() / "tokbias_profile_test";
  std::filesystem::create_directories(dir / "ranks");
  {
    std::ofstream(dir / "p.json") << R"({"name":"p","rank_file":"r.tiktoken","pattern":"\\s+|\\S+",
                                         "special_tokens":{"<|x|>":9}})";
  }
  const auto p = load_profile(dir / "p.json");
  EXPECT_EQ(p.name, "p");
  EXPECT_EQ(p.rank_file_path, dir / "r.tiktoken");
  EXPECT_EQ(p.special_tokens.at("<|x|>"), 9u);
  const auto q = load_profile(dir / "p.json", dir / "ranks");
  EXPECT_EQ(q.rank_file_path, dir / "ranks" / "r.tiktoken");
}

TEST(Profile, Errors) {
  const auto dir = std::filesystem::temp_directory_path() / "tokbias_profile_err";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "bad_pattern.json") << R"({"name":"p","rank_file":"r","pattern":"(unclosed"})";
  std::ofstream(dir / "missing.json") << R"({"name":"p"})";
  std::ofstream(dir / "notjson.json") << "{";
  EXPECT_EQ(code_of([&] { load_profile(dir / "bad_pattern.json"); }), Errc::PatternCompileError);
  EXPECT_EQ(code_of([&] { load_profile(dir / "missing.json"); }), Errc::InvalidProfile);
  EXPECT_EQ(code_of([&] { load_profile(dir / "notjson.json"); }), Errc::InvalidProfile);
  EXPECT_EQ(code_of([&] { load_profile(dir / "nope.json"); }), Errc::Io);
  EXPECT_EQ(code_of([&] { load_rank_file(dir / "nope.tiktoken", "x"); }), Errc::Io);
}

TEST(Profile, ShippedProfilesParse) {
  for (const auto* name : {"o200k_base", "cl100k_base"}) {
    const auto p = load_profile(data_dir() / "profiles" / (std::string(name) + ".json"));
    EXPECT_EQ(p.name, name);
    EXPECT_FALSE(p.pretokenize_pattern.empty());
    EXPECT_TRUE(p.special_tokens.contains("<|endoftext|>"));
  }
}

class RealVocab : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!rank_dir()) GTEST_SKIP() << "published rank files not available";
  }
};

TEST_F(RealVocab, SizesMatchReference) {
  const auto golden = nlohmann::json::parse(read_file(test_data_dir() / "vocab_golden.json"));
  for (const auto* name : {"o200k_base", "cl100k_base"}) {
    const auto* t = real(name);
    ASSERT_NE(t, nullptr);
    EXPECT_EQ(t->vocab.size(), golden[name]["size"].get<std::size_t>());
    EXPECT_EQ(t->vocab.records().back().rank(), golden[name]["max_rank"].get<Rank>());
  }
  EXPECT_EQ(real("o200k_base")->vocab.size(), 199998u);
  EXPECT_EQ(real("cl100k_base")->vocab.size(), 100256u);
}

TEST_F(RealVocab, LongHanTokensDecode) {
  const auto& v = real("o200k_base")->vocab;
  EXPECT_EQ(decode_token(v, 181081), " 微信公众号天天中彩票");
  EXPECT_EQ(decode_token(v, 13492), "北京赛车");
  EXPECT_EQ(decode_token(v, 53332), " 国产精品");
  EXPECT_EQ(decode_token(v, 185118), "_日本毛片免费视频观看");
}
