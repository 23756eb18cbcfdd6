#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tokbias/vocab.hpp"

namespace tokbias {

/// Word-frequency table in the jieba `word freq [tag]` format.
class FrequencyDictionary {
 public:
  FrequencyDictionary() = default;

  /// Adds to any existing frequency. Throws ZeroFrequency.
  void add(std::string_view word, std::uint64_t freq);

  std::uint64_t total() const noexcept { return total_; }
  std::size_t size() const noexcept { return entries_.size(); }
  /// 0 when absent.
  std::uint64_t frequency(std::string_view word) const noexcept;
  bool contains(std::string_view word) const noexcept { return frequency(word) != 0; }
  bool is_prefix(std::string_view s) const noexcept;

  const std::unordered_map<std::string, std::uint64_t, StringHash, std::equal_to<>>& entries()
      const noexcept {
    return entries_;
  }

 private:
  std::unordered_map<std::string, std::uint64_t, StringHash, std::equal_to<>> entries_;
  std::unordered_set<std::string, StringHash, std::equal_to<>> prefixes_;
  std::uint64_t total_ = 0;
};

/// Throws MalformedLine, ZeroFrequency, Io. Duplicate words sum.
FrequencyDictionary parse_dictionary(std::string_view contents);
FrequencyDictionary load_dictionary(const std::filesystem::path& path);

/// Character offset -> ascending exclusive end offsets of dictionary words
/// starting there. The single-character edge is always present.
using SegmentDag = std::map<std::size_t, std::vector<std::size_t>>;

SegmentDag build_dag(std::string_view text, const FrequencyDictionary& dict);

struct SegmentationResult {
  std::vector<std::string> segments;
  double log_prob = 0.0;
};

/// Log-probability of one segment: log(freq / total), where a segment absent
/// from the dictionary counts as frequency 1 and total is at least 1.
double segment_log_prob(std::string_view word, const FrequencyDictionary& dict);

/// Maximum-probability path through the DAG, computed right to left. On
/// equal scores the longer segment at a position wins.
SegmentationResult segment(std::string_view text, const FrequencyDictionary& dict);

}  // namespace tokbias
