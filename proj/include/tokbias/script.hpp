#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "tokbias/vocab.hpp"

namespace tokbias {

enum class ScriptClass { Han, Latin, Mixed, NonText, Other };

std::string_view to_string(ScriptClass cls) noexcept;
/// Accepts "han", "latin", "mixed", "nontext", "other" (any case).
std::optional<ScriptClass> parse_script_class(std::string_view name) noexcept;

/// CJK Unified Ideographs (U+4E00..U+9FFF) and Extension A (U+3400..U+4DBF).
constexpr bool is_han(char32_t cp) noexcept {
  return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF);
}

/// How the leading separator of a token is handled when classifying and
/// measuring it. The default strips one leading ASCII space and does not
/// count it.
struct LengthRule {
  /// Characters of which at most one is stripped from the front.
  std::string strippable = " ";
  /// Count the stripped character in the length.
  bool count_stripped = false;

  static LengthRule strict() { return {}; }
  /// Length as the raw decoded string length, allowing a leading space or
  /// underscore before Han text.
  static LengthRule raw() { return {" _", true}; }
};

/// Named presets: "strict" or "raw".
std::optional<LengthRule> parse_length_rule(std::string_view name);

ScriptClass classify_token(const TokenRecord& record, const LengthRule& rule = {});
ScriptClass classify_text(std::string_view text, const LengthRule& rule = {});

/// Character length after the leading-separator rule; nullopt for NonText.
std::optional<std::size_t> effective_char_length(const TokenRecord& record,
                                                 const LengthRule& rule = {});

/// Text after stripping the leading separator; nullopt for NonText.
std::optional<std::string_view> stripped_text(const TokenRecord& record,
                                              const LengthRule& rule = {});

struct LengthHistogram {
  std::map<std::size_t, std::size_t> counts;
  std::string filter_description;

  std::size_t total() const noexcept;
  std::size_t max_length() const noexcept;
  std::size_t at(std::size_t length) const noexcept;
};

LengthHistogram build_length_histogram(const Vocabulary& vocab, ScriptClass cls,
                                       std::size_t min_len, const LengthRule& rule = {});

std::map<ScriptClass, std::size_t> count_classes(const Vocabulary& vocab, const LengthRule& rule = {});

/// `length,count` with a header row.
std::string histogram_to_csv(const LengthHistogram& hist);
/// {"filter": ..., "counts": {"2": n, ...}}
std::string histogram_to_json(const LengthHistogram& hist);

}  // namespace tokbias
