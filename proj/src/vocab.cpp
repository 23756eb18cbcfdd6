#include "tokbias/vocab.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "tokbias/base64.hpp"
#include "tokbias/bpe.hpp"
#include "tokbias/error.hpp"
#include "tokbias/utf8.hpp"

namespace tokbias {

TokenRecord::TokenRecord(Rank rank, std::string bytes)
    : rank_(rank), bytes_(std::move(bytes)), char_len_(utf8::char_count(bytes_)) {}

std::optional<std::string_view> TokenRecord::text() const noexcept {
  if (!char_len_) return std::nullopt;
  return std::string_view(bytes_);
}

Vocabulary::Vocabulary(std::string profile_name, std::vector<TokenRecord> records)
    : profile_name_(std::move(profile_name)), records_(std::move(records)) {
  std::sort(records_.begin(), records_.end(),
            [](const TokenRecord& a, const TokenRecord& b) { return a.rank() < b.rank(); });
  by_bytes_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& rec = records_[i];
    if (i > 0 && records_[i - 1].rank() == rec.rank()) {
      throw Error(Errc::DuplicateRank, "rank " + std::to_string(rec.rank()));
    }
    if (!by_bytes_.emplace(rec.bytes(), rec.rank()).second) {
      throw Error(Errc::DuplicateBytes, "bytes of rank " + std::to_string(rec.rank()) +
                                            " already assigned to rank " +
                                            std::to_string(by_bytes_.find(rec.bytes())->second));
    }
  }
  const bool dense = !records_.empty() && records_.back().rank() < 2 * records_.size() + 1024;
  if (dense) {
    dense_index_.assign(records_.back().rank() + 1, std::numeric_limits<std::uint32_t>::max());
    for (std::size_t i = 0; i < records_.size(); ++i) {
      dense_index_[records_[i].rank()] = static_cast<std::uint32_t>(i);
    }
  } else {
    for (std::size_t i = 0; i < records_.size(); ++i) {
      sparse_index_.emplace(records_[i].rank(), static_cast<std::uint32_t>(i));
    }
  }
}

const TokenRecord* Vocabulary::find(Rank rank) const noexcept {
  if (!dense_index_.empty()) {
    if (rank >= dense_index_.size()) return nullptr;
    const auto idx = dense_index_[rank];
    return idx == std::numeric_limits<std::uint32_t>::max() ? nullptr : &records_[idx];
  }
  const auto it = sparse_index_.find(rank);
  return it == sparse_index_.end() ? nullptr : &records_[it->second];
}

std::optional<Rank> Vocabulary::rank_of(std::string_view bytes) const noexcept {
  const auto it = by_bytes_.find(bytes);
  if (it == by_bytes_.end()) return std::nullopt;
  return it->second;
}

const TokenRecord& Vocabulary::at(Rank rank) const {
  const auto* rec = find(rank);
  if (rec == nullptr) throw Error(Errc::UnknownRank, std::to_string(rank));
  return *rec;
}

Vocabulary parse_rank_file(std::string_view contents, std::string profile_name) {
  std::vector<TokenRecord> records;
  std::size_t line_no = 0;
  while (!contents.empty()) {
    const auto eol = contents.find('\n');
    auto line = contents.substr(0, eol);
    contents = eol == std::string_view::npos ? std::string_view{} : contents.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const auto malformed = [&](const char* why) {
      return Error(Errc::MalformedLine, "line " + std::to_string(line_no) + ": " + why);
    };
    const auto sp = line.find(' ');
    if (sp == std::string_view::npos || line.find(' ', sp + 1) != std::string_view::npos) {
      throw malformed("expected exactly two space-separated fields");
    }
    const auto b64 = line.substr(0, sp);
    const auto rank_text = line.substr(sp + 1);
    auto bytes = base64::decode(b64);
    if (!bytes || bytes->empty()) throw malformed("invalid base64 token");
    Rank rank = 0;
    const auto [ptr, ec] = std::from_chars(rank_text.data(), rank_text.data() + rank_text.size(), rank);
    if (ec != std::errc{} || ptr != rank_text.data() + rank_text.size() || rank_text.empty()) {
      throw malformed("rank is not a non-negative integer");
    }
    records.emplace_back(rank, std::move(*bytes));
  }
  return Vocabulary(std::move(profile_name), std::move(records));
}

Vocabulary load_rank_file(const std::filesystem::path& path, std::string profile_name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open rank file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_rank_file(ss.str(), std::move(profile_name));
}

std::string serialize_rank_file(const Vocabulary& vocab) {
  std::string out;
  for (const auto& rec : vocab.records()) {
    out += base64::encode(rec.bytes());
    out += ' ';
    out += std::to_string(rec.rank());
    out += '\n';
  }
  return out;
}

VocabularyProfile load_profile(const std::filesystem::path& path,
                               const std::optional<std::filesystem::path>& rank_dir) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open profile " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidProfile, path.string() + ": " + e.what());
  }
  VocabularyProfile profile;
  try {
    profile.name = j.at("name").get<std::string>();
    profile.pretokenize_pattern = j.at("pattern").get<std::string>();
    std::filesystem::path rank_file = j.at("rank_file").get<std::string>();
    if (rank_file.is_relative()) {
      rank_file = (rank_dir ? *rank_dir : path.parent_path()) / rank_file;
    }
    profile.rank_file_path = rank_file;
    if (j.contains("special_tokens")) {
      for (const auto& [name, rank] : j.at("special_tokens").items()) {
        profile.special_tokens.emplace(name, rank.get<Rank>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidProfile, path.string() + ": " + e.what());
  }
  if (profile.pretokenize_pattern.empty()) {
    throw Error(Errc::InvalidProfile, path.string() + ": empty pattern");
  }
  // Compiling once validates the pattern; callers build their own Pretokenizer.
  Pretokenizer{profile.pretokenize_pattern};
  return profile;
}

std::string_view decode_token(const Vocabulary& vocab, Rank rank) {
  return vocab.at(rank).bytes();
}

std::string token_display(const TokenRecord& record) {
  if (const auto text = record.text()) return std::string(*text);
  return utf8::escape_invalid(record.bytes());
}

}  // namespace tokbias
