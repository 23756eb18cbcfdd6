#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tokbias/bpe.hpp"
#include "tokbias/vocab.hpp"

namespace tokbias::test {

inline std::filesystem::path source_dir() { return TOKBIAS_SOURCE_DIR; }
inline std::filesystem::path data_dir() { return source_dir() / "data"; }
inline std::filesystem::path test_data_dir() { return source_dir() / "tests" / "data"; }
inline std::filesystem::path fixtures_dir() { return data_dir() / "fixtures" / "reference"; }

inline std::optional<std::filesystem::path> rank_dir() {
  const std::filesystem::path dir = TOKBIAS_RANK_DIR;
  if (dir.empty() || !std::filesystem::exists(dir / "o200k_base.tiktoken")) return std::nullopt;
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Vocabulary with all 256 single bytes at ranks 0..255 followed by `extra`.
inline Vocabulary byte_vocab(const std::vector<std::string>& extra, std::string name = "toy") {
  std::vector<TokenRecord> records;
  for (int b = 0; b < 256; ++b) records.emplace_back(static_cast<Rank>(b), std::string(1, static_cast<char>(b)));
  Rank next = 256;
  for (const auto& s : extra) records.emplace_back(next++, s);
  return Vocabulary(std::move(name), std::move(records));
}

/// Vocabulary from explicit (bytes, rank) pairs.
inline Vocabulary toy_vocab(const std::vector<std::pair<std::string, Rank>>& entries) {
  std::vector<TokenRecord> records;
  for (const auto& [bytes, rank] : entries) records.emplace_back(rank, bytes);
  return Vocabulary("toy", std::move(records));
}

struct RealTokenizer {
  VocabularyProfile profile;
  Vocabulary vocab;
};

/// Loaded once per process; nullptr when the rank files are unavailable.
inline const RealTokenizer* real(const std::string& name) {
  static std::map<std::string, std::unique_ptr<RealTokenizer>> cache;
  const auto it = cache.find(name);
  if (it != cache.end()) return it->second.get();
  const auto dir = rank_dir();
  if (!dir) return nullptr;
  auto profile = load_profile(data_dir() / "profiles" / (name + ".json"), *dir);
  auto vocab = load_rank_file(profile.rank_file_path, name);
  auto& slot = cache[name];
  slot = std::make_unique<RealTokenizer>(RealTokenizer{std::move(profile), std::move(vocab)});
  return slot.get();
}

}  // namespace tokbias::test
