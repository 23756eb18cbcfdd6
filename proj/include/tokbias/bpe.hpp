#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tokbias/vocab.hpp"

namespace tokbias {

/// Shortcut returns a whole pre-token piece as one token when its bytes are
/// in the vocabulary (tiktoken's behaviour). StrictMerges always starts from
/// single bytes and applies lowest-rank merges.
enum class EncodeMode { Shortcut, StrictMerges };

std::string_view to_string(EncodeMode mode) noexcept;

struct EncodingResult {
  std::vector<Rank> ranks;
  /// [start, end) byte offsets of each pre-token piece in the input.
  std::vector<std::pair<std::size_t, std::size_t>> piece_boundaries;
};

/// Compiled pre-tokenization pattern.
///
/// Patterns are written in the dialect of the published tiktoken profiles
/// (possessive quantifiers, `\p{..}` classes, lookahead) and run on ICU's
/// regex engine. Two rewrites keep ICU's semantics aligned with that
/// dialect: `\s`/`\S` become `\p{White_Space}`/`\P{White_Space}` (ICU's
/// `\s` omits U+000B and U+0085), and an unescaped `$` outside a character
/// class becomes `\z` (ICU's `$` also matches before a final line break).
class Pretokenizer {
 public:
  /// Throws Error(PatternCompileError).
  explicit Pretokenizer(std::string pattern);
  ~Pretokenizer();
  Pretokenizer(Pretokenizer&&) noexcept;
  Pretokenizer& operator=(Pretokenizer&&) noexcept;

  const std::string& pattern() const noexcept { return pattern_; }
  const std::string& translated_pattern() const noexcept { return translated_; }

  /// Non-overlapping leftmost matches in order; any bytes between matches
  /// become pieces of their own. Views alias `text`. Throws InvalidUtf8.
  std::vector<std::string_view> split(std::string_view text) const;

 private:
  struct Impl;
  std::string pattern_;
  std::string translated_;
  std::unique_ptr<Impl> impl_;
};

/// The dialect rewrite described on Pretokenizer.
std::string translate_pattern(std::string_view pattern);

std::vector<std::string> pretokenize(std::string_view text, std::string_view pattern);

/// Throws Undecomposable when some byte has no 1-byte token.
std::vector<Rank> encode_piece(std::string_view piece, const Vocabulary& vocab, EncodeMode mode);

struct EncodeOptions {
  /// Special-token strings that may appear in the input; they are encoded
  /// as ordinary text. Any other special token in the text is rejected.
  std::set<std::string, std::less<>> allowed_special;
};

/// Tokenizer bundle: vocabulary plus compiled pattern and special tokens.
class Encoder {
 public:
  Encoder(const Vocabulary& vocab, const VocabularyProfile& profile);

  /// Throws InvalidUtf8, SpecialTokenInText, Undecomposable.
  EncodingResult encode(std::string_view text, EncodeMode mode,
                        const EncodeOptions& options = {}) const;

  const Vocabulary& vocab() const noexcept { return *vocab_; }
  const Pretokenizer& pretokenizer() const noexcept { return pretokenizer_; }

 private:
  const Vocabulary* vocab_;
  Pretokenizer pretokenizer_;
  std::vector<std::string> special_tokens_;
};

EncodingResult encode(std::string_view text, const Vocabulary& vocab,
                      const VocabularyProfile& profile, EncodeMode mode,
                      const EncodeOptions& options = {});

/// Concatenated token bytes. Throws UnknownRank.
std::string decode(std::span<const Rank> ranks, const Vocabulary& vocab);

/// Multi-byte tokens with no split into two in-vocabulary tokens that both
/// have a strictly lower rank; ascending.
std::vector<Rank> find_merge_unreachable(const Vocabulary& vocab);

/// Multi-byte tokens whose own bytes, strictly merged, do not come out as that
/// single token. Where this is empty the shortcut never changes an encoding.
/// Ascending. Throws Undecomposable when a byte has no token.
std::vector<Rank> find_strict_divergent(const Vocabulary& vocab);

}  // namespace tokbias
