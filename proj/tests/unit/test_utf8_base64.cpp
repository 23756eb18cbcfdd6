#include <gtest/gtest.h>

#include <random>

#include "tokbias/base64.hpp"
#include "tokbias/hash.hpp"
#include "tokbias/utf8.hpp"

using namespace tokbias;

TEST(Base64, Rfc4648Vectors) {
  const std::pair<const char*, const char*> cases[] = {
      {"", ""},           {"f", "Zg=="},         {"fo", "Zm8="},         {"foo", "Zm9v"},
      {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="}, {"foobar", "Zm9vYmFy"},
  };
  for (const auto& [plain, coded] : cases) {
    EXPECT_EQ(base64::encode(plain), coded);
    EXPECT_EQ(base64::decode(coded), std::string(plain));
  }
}

TEST(Base64, RejectsNonCanonical) {
  EXPECT_FALSE(base64::decode("Zg="));
  EXPECT_FALSE(base64::decode("Zh=="));  // nonzero trailing bits
  EXPECT_FALSE(base64::decode("Zm9v\n"));
  EXPECT_FALSE(base64::decode("Zm9*"));
  EXPECT_FALSE(base64::decode("Z==="));
  EXPECT_FALSE(base64::decode("Zg==Zg=="));
}

TEST(Base64, RoundTripRandomBytes) {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    std::string s(rng() % 40, '\0');
    for (auto& c : s) c = static_cast<char>(rng() & 0xFF);
    EXPECT_EQ(base64::decode(base64::encode(s)), s);
  }
}

TEST(Utf8, Validity) {
  EXPECT_TRUE(utf8::is_valid(""));
  EXPECT_TRUE(utf8::is_valid("abc"));
  EXPECT_TRUE(utf8::is_valid("微信"));
  EXPECT_TRUE(utf8::is_valid("\xF0\x9F\x98\x80"));
  EXPECT_FALSE(utf8::is_valid("\xE5\xBE"));          // truncated
  EXPECT_FALSE(utf8::is_valid("\xC0\xAF"));          // overlong
  EXPECT_FALSE(utf8::is_valid("\xED\xA0\x80"));      // surrogate
  EXPECT_FALSE(utf8::is_valid("\xF4\x90\x80\x80"));  // > U+10FFFF
  EXPECT_FALSE(utf8::is_valid("\x80"));
}

TEST(Utf8, CountsAndSplits) {
  EXPECT_EQ(utf8::char_count("微信公众号"), 5u);
  EXPECT_EQ(utf8::char_count(" 国产精品"), 5u);
  EXPECT_FALSE(utf8::char_count("\xFF"));
  const auto chars = utf8::split_chars("a微😀");
  ASSERT_EQ(chars.size(), 3u);
  EXPECT_EQ(chars[1], "微");
  EXPECT_EQ(utf8::code_points("a微"), (std::vector<char32_t>{U'a', U'微'}));
  std::string out;
  utf8::append(out, U'中');
  EXPECT_EQ(out, "中");
}

TEST(Utf8, EscapeInvalid) {
  EXPECT_EQ(utf8::escape_invalid("ab"), "ab");
  EXPECT_EQ(utf8::escape_invalid("a\xE5\xBE"), "a\\xE5\\xBE");
  EXPECT_EQ(utf8::escape_invalid("\xFF微"), "\\xFF微");
}

TEST(StableHash, KnownDigest) {
  // sha256("abc") = ba7816bf8f01cfea...
  EXPECT_EQ(stable_hash("abc"), "ba7816bf8f01cfea");
  EXPECT_EQ(stable_hash(""), "e3b0c44298fc1c14");
}
