#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tokbias {

using Rank = std::uint32_t;

/// One vocabulary entry. `text()` is present exactly when the bytes are
/// valid UTF-8, and then it aliases the bytes.
class TokenRecord {
 public:
  TokenRecord(Rank rank, std::string bytes);

  Rank rank() const noexcept { return rank_; }
  const std::string& bytes() const noexcept { return bytes_; }
  std::size_t byte_len() const noexcept { return bytes_.size(); }
  std::optional<std::string_view> text() const noexcept;
  std::optional<std::size_t> char_len() const noexcept { return char_len_; }

  friend bool operator==(const TokenRecord&, const TokenRecord&) = default;

 private:
  Rank rank_;
  std::string bytes_;
  std::optional<std::size_t> char_len_;
};

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

/// Immutable, indexed BPE vocabulary. Records are kept sorted by rank.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::string profile_name, std::vector<TokenRecord> records);

  const std::string& profile_name() const noexcept { return profile_name_; }
  std::size_t size() const noexcept { return records_.size(); }
  std::span<const TokenRecord> records() const noexcept { return records_; }

  const TokenRecord* find(Rank rank) const noexcept;
  std::optional<Rank> rank_of(std::string_view bytes) const noexcept;

  /// Throws Error(UnknownRank).
  const TokenRecord& at(Rank rank) const;

 private:
  std::string profile_name_;
  std::vector<TokenRecord> records_;
  std::unordered_map<std::string, Rank, StringHash, std::equal_to<>> by_bytes_;
  // rank -> index into records_; dense when ranks are 0..n-1.
  std::vector<std::uint32_t> dense_index_;
  std::unordered_map<Rank, std::uint32_t> sparse_index_;
};

/// Per-model tokenizer configuration loaded from a profile JSON file.
struct VocabularyProfile {
  std::string name;
  std::filesystem::path rank_file_path;
  std::string pretokenize_pattern;
  std::map<std::string, Rank> special_tokens;
};

/// Parses `<base64> <rank>` lines. Throws MalformedLine, DuplicateRank,
/// DuplicateBytes, Io.
Vocabulary parse_rank_file(std::string_view contents, std::string profile_name);
Vocabulary load_rank_file(const std::filesystem::path& path, std::string profile_name);

/// Inverse of parse_rank_file, lines ordered by rank.
std::string serialize_rank_file(const Vocabulary& vocab);

/// Profile JSON: {"name", "rank_file", "pattern", "special_tokens"}. A
/// relative rank_file resolves against `rank_dir` when given, otherwise
/// against the profile's directory. The pattern must compile.
VocabularyProfile load_profile(const std::filesystem::path& path,
                               const std::optional<std::filesystem::path>& rank_dir = std::nullopt);

/// The record's bytes. Throws UnknownRank.
std::string_view decode_token(const Vocabulary& vocab, Rank rank);

/// Text when decodable, otherwise `\xHH` escapes for the undecodable bytes.
std::string token_display(const TokenRecord& record);

}  // namespace tokbias
