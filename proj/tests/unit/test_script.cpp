#include <gtest/gtest.h>

#include <json.hpp>

#include "test_support.hpp"
#include "tokbias/error.hpp"
#include "tokbias/script.hpp"

using namespace tokbias;
using namespace tokbias::test;

TEST(Classify, StrictRule) {
  EXPECT_EQ(classify_text(" 国产精品"), ScriptClass::Han);
  EXPECT_EQ(classify_text("北京赛车"), ScriptClass::Han);
  EXPECT_EQ(classify_text("_日本毛片免费视频观看"), ScriptClass::Mixed);
  EXPECT_EQ(classify_text(" the"), ScriptClass::Latin);
  EXPECT_EQ(classify_text("a微"), ScriptClass::Mixed);
  EXPECT_EQ(classify_text("123"), ScriptClass::Other);
  EXPECT_EQ(classify_text(" "), ScriptClass::Other);
  EXPECT_EQ(classify_text("  微"), ScriptClass::Mixed);
  EXPECT_EQ(classify_text("\xE5\xBE"), ScriptClass::NonText);
  EXPECT_EQ(classify_text("㐀"), ScriptClass::Han);   // Extension A
  EXPECT_EQ(classify_text("の"), ScriptClass::Other);  // kana
}

TEST(Classify, RawRule) {
  const auto raw = LengthRule::raw();
  EXPECT_EQ(classify_text("_日本毛片免费视频观看", raw), ScriptClass::Han);
  EXPECT_EQ(effective_char_length(TokenRecord(0, "_日本毛片免费视频观看"), raw), 11u);
  EXPECT_EQ(effective_char_length(TokenRecord(0, " 微信公众号天天中彩票"), raw), 11u);
  EXPECT_EQ(effective_char_length(TokenRecord(0, " 微信公众号天天中彩票")), 10u);
  EXPECT_EQ(effective_char_length(TokenRecord(0, "北京赛车"), raw), 4u);
}

TEST(Classify, TokenRecordAndStrip) {
  const TokenRecord rec(5, " 国产精品");
  EXPECT_EQ(classify_token(rec), ScriptClass::Han);
  EXPECT_EQ(stripped_text(rec), "国产精品");
  EXPECT_FALSE(stripped_text(TokenRecord(6, "\xFF")));
  EXPECT_FALSE(effective_char_length(TokenRecord(6, "\xFF")));
  EXPECT_EQ(classify_token(TokenRecord(6, "\xFF")), ScriptClass::NonText);
}

TEST(Classify, ParseNames) {
  EXPECT_EQ(parse_script_class("HAN"), ScriptClass::Han);
  EXPECT_EQ(parse_script_class("nontext"), ScriptClass::NonText);
  EXPECT_FALSE(parse_script_class("cyrillic"));
  EXPECT_TRUE(parse_length_rule("raw"));
  EXPECT_FALSE(parse_length_rule("loose"));
}

TEST(Histogram, ToyCounts) {
  const auto v = toy_vocab({{"a", 0}, {" 中", 1}, {"中文", 2}, {" 中文字", 3}, {"文字", 4}, {"x中", 5}, {"\xE4", 6}});
  const auto h = build_length_histogram(v, ScriptClass::Han, 1);
  EXPECT_EQ(h.counts, (std::map<std::size_t, std::size_t>{{1, 1}, {2, 2}, {3, 1}}));
  EXPECT_EQ(h.total(), 4u);
  EXPECT_EQ(h.max_length(), 3u);
  EXPECT_EQ(h.at(7), 0u);
  const auto h2 = build_length_histogram(v, ScriptClass::Han, 2);
  EXPECT_EQ(h2.total(), 3u);
  EXPECT_EQ(histogram_to_csv(h2), "length,count\n2,2\n3,1\n");
  const auto j = nlohmann::json::parse(histogram_to_json(h2));
  EXPECT_EQ(j["counts"]["2"], 2);
  EXPECT_TRUE(j["filter"].get<std::string>().find("min_len=2") != std::string::npos);
}

TEST(Histogram, MinLenZeroRejected) {
  const auto v = toy_vocab({{"a", 0}});
  try {
    build_length_histogram(v, ScriptClass::Han, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidConfig);
  }
}

class RealScript : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!rank_dir()) GTEST_SKIP() << "published rank files not available";
  }
};

TEST_F(RealScript, HistogramsMatchIndependentCount) {
  const auto golden = nlohmann::json::parse(read_file(test_data_dir() / "vocab_golden.json"));
  for (const auto* name : {"o200k_base", "cl100k_base"}) {
    const auto& vocab = real(name)->vocab;
    for (const auto* rule_name : {"strict", "raw"}) {
      const auto hist = build_length_histogram(vocab, ScriptClass::Han, 1, *parse_length_rule(rule_name));
      std::map<std::string, std::size_t> got;
      for (const auto& [len, n] : hist.counts) got[std::to_string(len)] = n;
      EXPECT_EQ(got, (golden[name][std::string("han_hist_") + rule_name].get<std::map<std::string, std::size_t>>()))
          << name << " " << rule_name;
    }
    std::map<std::string, std::size_t> classes;
    for (const auto& [cls, n] : count_classes(vocab)) classes[std::string(to_string(cls))] = n;
    EXPECT_EQ(classes, (golden[name]["classes_strict"].get<std::map<std::string, std::size_t>>())) << name;
  }
}

TEST_F(RealScript, StrictHanTailDiffersFromPublishedSample) {
  // The published sample has 4 tokens of size 10 and 2 of size 11; neither
  // length rule reproduces that from the shipped vocabulary.
  const auto& vocab = real("o200k_base")->vocab;
  const auto strict = build_length_histogram(vocab, ScriptClass::Han, 2);
  EXPECT_EQ(strict.at(10), 1u);
  EXPECT_EQ(strict.at(11), 0u);
  const auto raw = build_length_histogram(vocab, ScriptClass::Han, 2, LengthRule::raw());
  EXPECT_EQ(raw.at(10), 3u);
  EXPECT_EQ(raw.at(11), 2u);
}
