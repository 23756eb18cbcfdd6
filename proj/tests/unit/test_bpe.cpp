#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include <json.hpp>

#include "oracles.hpp"
#include "test_support.hpp"
#include "tokbias/bpe.hpp"
#include "tokbias/error.hpp"
#include "tokbias/utf8.hpp"

using namespace tokbias;
using namespace tokbias::test;


TEST(EncodePiece, MergeTrace) {
  const auto v = toy_vocab({{"a", 0}, {"b", 1}, {"c", 2}, {"ab", 3}, {"abc", 4}});
  EXPECT_EQ(encode_piece("abc", v, EncodeMode::StrictMerges), (std::vector<Rank>{4}));
  EXPECT_EQ(encode_piece("abc", v, EncodeMode::Shortcut), (std::vector<Rank>{4}));
}

TEST(EncodePiece, ModesDiverge) {
  const auto v = toy_vocab({{"a", 0}, {"b", 1}, {"c", 2}, {"abc", 3}});
  EXPECT_EQ(encode_piece("abc", v, EncodeMode::StrictMerges), (std::vector<Rank>{0, 1, 2}));
  EXPECT_EQ(encode_piece("abc", v, EncodeMode::Shortcut), (std::vector<Rank>{3}));
}

TEST(EncodePiece, SingleByte) {
  const auto v = toy_vocab({{"a", 0}, {"b", 1}, {"c", 2}});
  for (const auto mode : {EncodeMode::Shortcut, EncodeMode::StrictMerges}) {
    EXPECT_EQ(encode_piece("a", v, mode), (std::vector<Rank>{0}));
    EXPECT_TRUE(encode_piece("", v, mode).empty());
  }
}

TEST(EncodePiece, LeftmostWinsRepeatedPair) {
  const auto v = toy_vocab({{"a", 0}, {"aa", 1}});
  EXPECT_EQ(encode_piece("aaa", v, EncodeMode::StrictMerges), (std::vector<Rank>{1, 0}));
}

TEST(EncodePiece, Undecomposable) {
  const auto v = toy_vocab({{"a", 0}});
  try {
    encode_piece("ab", v, EncodeMode::StrictMerges);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Undecomposable);
  }
}

TEST(EncodePiece, StrictMatchesNaiveOracle) {
  EXPECT_EQ(bpe_oracle_mismatches(424242), 0);
  EXPECT_EQ(bpe_oracle_mismatches(7), 0);
}

TEST(EncodePiece, ShortcutDominance) {
  std::mt19937 rng(99);
  const auto vocab = random_toy_vocab(rng, "abc", 60);
  for (const auto& rec : vocab.records()) {
    EXPECT_EQ(encode_piece(rec.bytes(), vocab, EncodeMode::Shortcut), (std::vector<Rank>{rec.rank()}));
  }
}

TEST(Pattern, Translation) {
  EXPECT_EQ(translate_pattern(R"(\s+(?!\S))"), R"(\p{White_Space}+(?!\P{White_Space}))");
  EXPECT_EQ(translate_pattern(R"(\s++$)"), R"(\p{White_Space}++\z)");
  EXPECT_EQ(translate_pattern(R"([$]\$)"), R"([$]\$)");
  EXPECT_EQ(translate_pattern(R"([^\s\p{L}])"), R"([^\p{White_Space}\p{L}])");
  EXPECT_EQ(translate_pattern(R"(\\s)"), R"(\\s)");
}

TEST(Pattern, SplitCoversInput) {
  const Pretokenizer p(kSimplePattern);
  const std::string text = "Hello,  world 42!\n\n微信 公众号";
  const auto pieces = p.split(text);
  std::string joined;
  for (const auto piece : pieces) joined += piece;
  EXPECT_EQ(joined, text);
  EXPECT_EQ(pieces.front(), "Hello");
}

TEST(Pattern, GapsBecomePieces) {
  const Pretokenizer p("a+");
  EXPECT_EQ(pretokenize("xaay", "a+"), (std::vector<std::string>{"x", "aa", "y"}));
  EXPECT_TRUE(p.split("").empty());
}

TEST(Pattern, InvalidUtf8AndBadPattern) {
  const Pretokenizer p("a+");
  try {
    p.split("a\xFF");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidUtf8);
  }
  try {
    Pretokenizer bad("(a");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::PatternCompileError);
  }
}

TEST(Encode, RoundTripRandomUtf8BothModes) {
  const auto vocab = byte_vocab({"th", "he", "the", " the", "in", "微", "信", "微信", "  "});
  VocabularyProfile profile{"toy", {}, kSimplePattern, {}};
  const Encoder enc(vocab, profile);
  std::mt19937 rng(1234);
  for (int i = 0; i < 1000; ++i) {
    const auto s = random_utf8(rng);
    for (const auto mode : {EncodeMode::Shortcut, EncodeMode::StrictMerges}) {
      const auto r = enc.encode(s, mode);
      ASSERT_EQ(decode(r.ranks, vocab), s);
      std::size_t pos = 0;
      for (const auto& [b, e] : r.piece_boundaries) {
        ASSERT_EQ(b, pos);
        ASSERT_LT(b, e);
        pos = e;
      }
      ASSERT_EQ(pos, s.size());
    }
  }
}

TEST(Encode, EmptyText) {
  const auto vocab = byte_vocab({});
  VocabularyProfile profile{"toy", {}, kSimplePattern, {}};
  const auto r = encode("", vocab, profile, EncodeMode::Shortcut);
  EXPECT_TRUE(r.ranks.empty());
  EXPECT_TRUE(r.piece_boundaries.empty());
}

TEST(Encode, SpecialTokens) {
  const auto vocab = byte_vocab({});
  VocabularyProfile profile{"toy", {}, kSimplePattern, {{"<|endoftext|>", 1000}}};
  const Encoder enc(vocab, profile);
  try {
    enc.encode("hi <|endoftext|>", EncodeMode::Shortcut);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SpecialTokenInText);
  }
  EncodeOptions opts;
  opts.allowed_special.insert("<|endoftext|>");
  const auto r = enc.encode("hi <|endoftext|>", EncodeMode::Shortcut, opts);
  EXPECT_EQ(decode(r.ranks, vocab), "hi <|endoftext|>");
  for (const auto rank : r.ranks) EXPECT_NE(rank, 1000u);
}

TEST(Encode, InvalidUtf8Rejected) {
  const auto vocab = byte_vocab({});
  VocabularyProfile profile{"toy", {}, kSimplePattern, {}};
  try {
    encode("ab\xC3", vocab, profile, EncodeMode::Shortcut);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidUtf8);
  }
}

TEST(Decode, UnknownRank) {
  const auto vocab = byte_vocab({});
  const std::vector<Rank> ranks{1, 999};
  EXPECT_THROW(decode(ranks, vocab), Error);
}

TEST(MergeUnreachable, ToyVocabularies) {
  EXPECT_EQ(find_merge_unreachable(toy_vocab({{"a", 0}, {"b", 1}, {"c", 2}, {"abc", 3}})),
            (std::vector<Rank>{3}));
  EXPECT_TRUE(find_merge_unreachable(toy_vocab({{"a", 0}, {"b", 1}, {"c", 2}, {"ab", 3}, {"abc", 4}})).empty());
  // "ab" has lower rank than its parts.
  EXPECT_EQ(find_merge_unreachable(toy_vocab({{"ab", 0}, {"a", 1}, {"b", 2}, {"xy", 5}})),
            (std::vector<Rank>{0, 5}));
}

TEST(StrictDivergent, ToyVocabularies) {
  EXPECT_EQ(find_strict_divergent(toy_vocab({{"a", 0}, {"b", 1}, {"c", 2}, {"abc", 3}})),
            (std::vector<Rank>{3}));
  // "bc" merges first and strands "abcd", although ab|cd is a valid split.
  const auto v = toy_vocab({{"a", 0}, {"b", 1}, {"c", 2}, {"d", 3}, {"bc", 4}, {"ab", 5}, {"cd", 6}, {"abcd", 7}});
  EXPECT_EQ(find_strict_divergent(v), (std::vector<Rank>{7}));
  EXPECT_TRUE(find_merge_unreachable(v).empty());
}

class RealEncode : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!rank_dir()) GTEST_SKIP() << "published rank files not available";
  }
};

TEST_F(RealEncode, ShortTextCounts) {
  const std::string text = "微信公众号天天中彩票";
  const auto* o200k = real("o200k_base");
  const auto* cl100k = real("cl100k_base");
  const auto a = encode(text, o200k->vocab, o200k->profile, EncodeMode::Shortcut);
  const auto b = encode(text, cl100k->vocab, cl100k->profile, EncodeMode::Shortcut);
  EXPECT_EQ(a.ranks, (std::vector<Rank>{15702, 135504}));
  EXPECT_EQ(b.ranks.size(), 12u);
}

TEST_F(RealEncode, MatchesReferenceTokenizer) {
  std::ifstream in(test_data_dir() / "encode_golden.jsonl");
  ASSERT_TRUE(in);
  std::map<std::string, std::unique_ptr<Encoder>> encoders;
  for (const auto* name : {"o200k_base", "cl100k_base"}) {
    encoders[name] = std::make_unique<Encoder>(real(name)->vocab, real(name)->profile);
  }
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    const auto text = j["text"].get<std::string>();
    for (const auto& [name, enc] : encoders) {
      const auto expected = j[name].get<std::vector<Rank>>();
      EXPECT_EQ(enc->encode(text, EncodeMode::Shortcut).ranks, expected) << name << ": " << text;
      EXPECT_EQ(enc->encode(text, EncodeMode::StrictMerges).ranks, expected) << name << ": " << text;
    }
    ++rows;
  }
  EXPECT_EQ(rows, 335);
}

TEST_F(RealEncode, DiagnosticsMatchReference) {
  const auto golden = nlohmann::json::parse(read_file(test_data_dir() / "vocab_golden.json"));
  for (const auto* name : {"o200k_base", "cl100k_base"}) {
    const auto& vocab = real(name)->vocab;
    EXPECT_EQ(find_merge_unreachable(vocab).size(), golden[name]["merge_unreachable_count"].get<std::size_t>());
    EXPECT_TRUE(find_strict_divergent(vocab).empty()) << name;
  }
}
