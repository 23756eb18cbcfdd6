#include "tokbias/bpe.hpp"

#include <unicode/regex.h>
#include <unicode/unistr.h>
#include <unicode/utext.h>

#include <algorithm>
#include <limits>
#include <cstdio>
#include <queue>
#include <tuple>

#include "tokbias/error.hpp"
#include "tokbias/utf8.hpp"

namespace tokbias {

std::string_view to_string(EncodeMode mode) noexcept {
  return mode == EncodeMode::Shortcut ? "shortcut" : "strict";
}

std::string translate_pattern(std::string_view pattern) {
  std::string out;
  out.reserve(pattern.size() + 32);
  int class_depth = 0;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const char c = pattern[i];
    if (c == '\\' && i + 1 < pattern.size()) {
      const char next = pattern[i + 1];
      if (next == 's') {
        out += "\\p{White_Space}";
      } else if (next == 'S') {
        out += "\\P{White_Space}";
      } else {
        out += c;
        out += next;
      }
      ++i;
      continue;
    }
    if (c == '[') {
      ++class_depth;
    } else if (c == ']' && class_depth > 0) {
      --class_depth;
    } else if (c == '$' && class_depth == 0) {
      out += "\\z";
      continue;
    }
    out += c;
  }
  return out;
}

struct Pretokenizer::Impl {
  std::unique_ptr<icu::RegexPattern> regex;
};

Pretokenizer::Pretokenizer(std::string pattern)
    : pattern_(std::move(pattern)), translated_(translate_pattern(pattern_)),
      impl_(std::make_unique<Impl>()) {
  if (pattern_.empty()) throw Error(Errc::PatternCompileError, "empty pattern");
  UParseError parse_error{};
  UErrorCode status = U_ZERO_ERROR;
  impl_->regex.reset(icu::RegexPattern::compile(icu::UnicodeString::fromUTF8(translated_), 0,
                                                parse_error, status));
  if (U_FAILURE(status)) {
    throw Error(Errc::PatternCompileError,
                std::string(u_errorName(status)) + " at offset " +
                    std::to_string(parse_error.offset) + " in " + pattern_);
  }
}

Pretokenizer::~Pretokenizer() = default;
Pretokenizer::Pretokenizer(Pretokenizer&&) noexcept = default;
Pretokenizer& Pretokenizer::operator=(Pretokenizer&&) noexcept = default;

std::vector<std::string_view> Pretokenizer::split(std::string_view text) const {
  std::vector<std::string_view> pieces;
  if (text.empty()) return pieces;
  if (!utf8::is_valid(text)) throw Error(Errc::InvalidUtf8, "input text");

  UErrorCode status = U_ZERO_ERROR;
  UText* ut = utext_openUTF8(nullptr, text.data(), static_cast<int64_t>(text.size()), &status);
  std::unique_ptr<UText, decltype(&utext_close)> guard(ut, &utext_close);
  std::unique_ptr<icu::RegexMatcher> matcher(impl_->regex->matcher(status));
  if (U_FAILURE(status)) throw Error(Errc::PatternCompileError, u_errorName(status));
  matcher->reset(ut);

  // With a UTF-8 UText, native indexes are byte offsets.
  std::size_t last = 0;
  while (matcher->find(status) && U_SUCCESS(status)) {
    const auto start = static_cast<std::size_t>(matcher->start64(status));
    const auto end = static_cast<std::size_t>(matcher->end64(status));
    if (end == start) continue;
    if (start > last) pieces.push_back(text.substr(last, start - last));
    pieces.push_back(text.substr(start, end - start));
    last = end;
  }
  if (U_FAILURE(status)) throw Error(Errc::PatternCompileError, u_errorName(status));
  if (last < text.size()) pieces.push_back(text.substr(last));
  return pieces;
}

std::vector<std::string> pretokenize(std::string_view text, std::string_view pattern) {
  const Pretokenizer pre{std::string(pattern)};
  std::vector<std::string> out;
  for (const auto piece : pre.split(text)) out.emplace_back(piece);
  return out;
}

namespace {

Rank single_byte_rank(std::string_view piece, std::size_t i, const Vocabulary& vocab) {
  const auto r = vocab.rank_of(piece.substr(i, 1));
  if (!r) {
    char hex[8];
    std::snprintf(hex, sizeof hex, "0x%02X", static_cast<unsigned char>(piece[i]));
    throw Error(Errc::Undecomposable, std::string("byte ") + hex + " has no token");
  }
  return *r;
}

// Lowest-rank-first merging over a linked list of parts. Heap entries are
// (merged rank, left start, pair end); an entry is stale once its left part
// was absorbed or either side grew, which shows up as a changed pair end.
std::vector<Rank> strict_merge(std::string_view piece, const Vocabulary& vocab) {
  const std::size_t n = piece.size();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> next(n), prev(n);
  std::vector<bool> alive(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    single_byte_rank(piece, i, vocab);
    next[i] = i + 1 < n ? i + 1 : kNone;
    prev[i] = i == 0 ? kNone : i - 1;
  }
  const auto end_of = [&](std::size_t start) { return next[start] == kNone ? n : next[start]; };

  using Entry = std::tuple<Rank, std::size_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  const auto push_pair = [&](std::size_t left) {
    if (left == kNone || next[left] == kNone) return;
    const auto pair_end = end_of(next[left]);
    if (const auto r = vocab.rank_of(piece.substr(left, pair_end - left))) {
      heap.emplace(*r, left, pair_end);
    }
  };
  for (std::size_t i = 0; i + 1 < n; ++i) push_pair(i);

  while (!heap.empty()) {
    const auto [rank, left, pair_end] = heap.top();
    heap.pop();
    if (!alive[left] || next[left] == kNone || end_of(next[left]) != pair_end) continue;
    const auto right = next[left];
    alive[right] = false;
    next[left] = next[right];
    if (next[right] != kNone) prev[next[right]] = left;
    push_pair(prev[left]);
    push_pair(left);
  }

  std::vector<Rank> out;
  for (std::size_t i = 0; i != kNone; i = next[i]) {
    out.push_back(*vocab.rank_of(piece.substr(i, end_of(i) - i)));
  }
  return out;
}

}  // namespace

std::vector<Rank> encode_piece(std::string_view piece, const Vocabulary& vocab, EncodeMode mode) {
  if (piece.empty()) return {};
  if (mode == EncodeMode::Shortcut) {
    if (const auto r = vocab.rank_of(piece)) return {*r};
  }
  if (piece.size() == 1) return {single_byte_rank(piece, 0, vocab)};
  return strict_merge(piece, vocab);
}

Encoder::Encoder(const Vocabulary& vocab, const VocabularyProfile& profile)
    : vocab_(&vocab), pretokenizer_(profile.pretokenize_pattern) {
  for (const auto& [name, rank] : profile.special_tokens) special_tokens_.push_back(name);
}

EncodingResult Encoder::encode(std::string_view text, EncodeMode mode,
                               const EncodeOptions& options) const {
  if (!utf8::is_valid(text)) throw Error(Errc::InvalidUtf8, "input text");
  for (const auto& special : special_tokens_) {
    if (!options.allowed_special.contains(special) && text.find(special) != std::string_view::npos) {
      throw Error(Errc::SpecialTokenInText, special);
    }
  }
  EncodingResult result;
  for (const auto piece : pretokenizer_.split(text)) {
    const auto start = static_cast<std::size_t>(piece.data() - text.data());
    result.piece_boundaries.emplace_back(start, start + piece.size());
    const auto ranks = encode_piece(piece, *vocab_, mode);
    result.ranks.insert(result.ranks.end(), ranks.begin(), ranks.end());
  }
  return result;
}

EncodingResult encode(std::string_view text, const Vocabulary& vocab,
                      const VocabularyProfile& profile, EncodeMode mode,
                      const EncodeOptions& options) {
  return Encoder(vocab, profile).encode(text, mode, options);
}

std::string decode(std::span<const Rank> ranks, const Vocabulary& vocab) {
  std::string out;
  for (const auto r : ranks) out += vocab.at(r).bytes();
  return out;
}

std::vector<Rank> find_merge_unreachable(const Vocabulary& vocab) {
  std::vector<Rank> out;
  for (const auto& rec : vocab.records()) {
    const std::string_view b = rec.bytes();
    if (b.size() < 2) continue;
    bool reachable = false;
    for (std::size_t k = 1; k < b.size() && !reachable; ++k) {
      const auto left = vocab.rank_of(b.substr(0, k));
      if (!left || *left >= rec.rank()) continue;
      const auto right = vocab.rank_of(b.substr(k));
      reachable = right && *right < rec.rank();
    }
    if (!reachable) out.push_back(rec.rank());
  }
  return out;
}

std::vector<Rank> find_strict_divergent(const Vocabulary& vocab) {
  std::vector<Rank> out;
  for (const auto& rec : vocab.records()) {
    if (rec.byte_len() < 2) continue;
    const auto ranks = encode_piece(rec.bytes(), vocab, EncodeMode::StrictMerges);
    if (ranks.size() != 1 || ranks.front() != rec.rank()) out.push_back(rec.rank());
  }
  return out;
}

}  // namespace tokbias
