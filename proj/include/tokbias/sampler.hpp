#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tokbias/script.hpp"
#include "tokbias/vocab.hpp"

namespace tokbias {

/// Per-length take counts: take_i = min(n_i, cap), total = sum of takes.
struct SamplePlan {
  std::map<std::size_t, std::size_t> per_length;
  std::size_t cap = 0;
  std::size_t total = 0;
};

SamplePlan plan_sample(const LengthHistogram& hist, std::size_t cap);

struct Candidate {
  Rank rank = 0;
  std::size_t length = 0;
};

struct SampleEntry {
  Rank rank = 0;
  std::size_t length = 0;
  std::string text;

  friend bool operator==(const SampleEntry&, const SampleEntry&) = default;
};

struct TokenSample {
  std::vector<SampleEntry> entries;
  std::uint64_t seed = 0;
};

/// Uniform draw without replacement per length bucket, ordered by
/// (length, rank). Buckets are visited in ascending length with a single
/// std::mt19937_64 seeded once; indices come from rejection sampling, so the
/// result is identical on every platform. A bucket whose take equals its
/// population is taken whole without consuming randomness.
/// Throws InsufficientTokens.
TokenSample draw_sample(std::span<const Candidate> tokens, const SamplePlan& plan,
                        std::uint64_t seed);

/// Every token of `cls` with length >= min_len, in rank order.
std::vector<Candidate> collect_candidates(const Vocabulary& vocab, ScriptClass cls,
                                          std::size_t min_len, const LengthRule& rule = {});

/// Fills SampleEntry::text with the stripped token text.
void attach_texts(TokenSample& sample, const Vocabulary& vocab, const LengthRule& rule = {});

/// {"seed", "plan": {...}, "sample": [{rank, text, length}, ...]}
std::string sample_to_json(const TokenSample& sample, const SamplePlan& plan);
/// Accepts either the object above or a bare array of entries.
TokenSample sample_from_json(std::string_view json);
TokenSample load_sample(const std::filesystem::path& path);

}  // namespace tokbias
