#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tokbias/records.hpp"
#include "tokbias/sampler.hpp"

namespace tokbias {

/// Long: the token (one leading space stripped) occurs contiguously in the
/// sentence. Split (segments given): every segment occurs. The sentence is
/// whitespace-trimmed; no normalization.
bool containment_check(std::string_view token_text,
                       const std::optional<std::vector<std::string>>& segments,
                       std::string_view sentence);

/// Sentences containing the token over sentences generated. Throws EmptyInput.
double token_retention_accuracy(std::span<const bool> flags);
double token_retention_accuracy(const std::vector<bool>& flags);

struct TraCell {
  std::size_t present = 0;
  std::size_t total = 0;
  double value = 0.0;

  friend bool operator==(const TraCell&, const TraCell&) = default;
};

using ModelVariant = std::pair<std::string, Variant>;

/// TRA per (model, variant) from sentence records; errored records produced
/// no sentence and are left out of the denominator.
std::map<ModelVariant, TraCell> tra_from_generations(const std::vector<GenerationRecord>& records);

/// id -> fraction of records placing it at positions 1..k. Every record must
/// place the same ids on a permutation of 1..k. Throws InvalidPermutation.
std::map<std::string, std::vector<double>> ranking_distribution(const std::vector<RankRecord>& records);

/// (model, variant) -> fraction at scores 0..5.
std::map<ModelVariant, std::array<double, 6>> score_distribution(const std::vector<ScoreRecord>& records);

struct ConsistencyCell {
  double accuracy = 0.0;
  double consistency = 0.0;
  std::size_t judged = 0;

  friend bool operator==(const ConsistencyCell&, const ConsistencyCell&) = default;
};

/// Keyed "meanings" (explain) and "translations" (translate); averages over
/// consistency-mode records that carry both flags. Throws MalformedRecord for
/// flags outside {0, 1}.
std::map<std::string, ConsistencyCell> consistency_summary(const std::vector<JudgeRecord>& judgments);

inline constexpr std::string_view kTotalSeries = "Total";

/// length -> series -> number of score-5 records; series ids are
/// `<label>-L` / `<label>-S` plus "Total". Throws MissingLength.
std::map<std::size_t, std::map<std::string, std::size_t>> score5_by_size(
    const std::vector<ScoreRecord>& records, const std::map<Rank, std::size_t>& lengths,
    const std::map<std::string, std::string>& labels = {});

/// Running totals over ascending lengths, per series.
std::map<std::size_t, std::map<std::string, std::size_t>> cumulative(
    const std::map<std::size_t, std::map<std::string, std::size_t>>& by_size);

struct MetricsReport {
  std::optional<SamplePlan> sample_plan;
  std::map<ModelVariant, TraCell> tra;
  std::map<std::string, std::vector<double>> ranking_matrix;
  std::map<ModelVariant, std::array<double, 6>> score_dist;
  std::map<std::string, ConsistencyCell> consistency;
  std::map<std::size_t, std::map<std::string, std::size_t>> score5_by_size;
};

bool operator==(const MetricsReport& a, const MetricsReport& b);

/// Everything the tables are computed from. Rank-mode judge records are
/// folded into `rankings`; consistency-mode ones feed the consistency table.
struct MetricsInputs {
  std::vector<GenerationRecord> generations;
  std::vector<JudgeRecord> judgments;
  std::vector<ScoreRecord> scores;
  std::vector<RankRecord> rankings;
  /// Token rank -> character length, for the score-5 breakdown.
  std::map<Rank, std::size_t> lengths;
  std::map<std::string, std::string> labels;
  std::optional<SamplePlan> sample_plan;
};

/// Tables whose inputs are empty are left empty.
MetricsReport compute_metrics(const MetricsInputs& inputs);

/// Reads a fixture directory: manifest.json names the record files
/// ("tokens", "generations", "judgments", "scores", "rankings") and the
/// series labels; tokens.json gives lengths and the sample plan. Missing
/// entries are skipped. Throws Io, MalformedRecord.
MetricsInputs load_metrics_inputs(const std::filesystem::path& dir);

/// Half-up rounding to 4 decimals, as shown in the tables.
double round4(double x);
std::string format4(double x);

}  // namespace tokbias
