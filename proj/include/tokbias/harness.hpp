#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tokbias/provider.hpp"
#include "tokbias/records.hpp"
#include "tokbias/sampler.hpp"
#include "tokbias/segmenter.hpp"
#include "tokbias/templates.hpp"

namespace tokbias {

struct RetryPolicy {
  int attempts = 3;
  /// Delay before the second attempt; doubles for each further attempt.
  std::chrono::milliseconds base_delay{500};
};

struct ExperimentConfig {
  std::vector<std::string> models;
  /// Short series labels per model (e.g. "GPT-4o" -> "G4o"); the model id
  /// is used when absent.
  std::map<std::string, std::string> labels;
  /// Model whose translations/explanations are checked for consistency;
  /// defaults to the first model.
  std::optional<std::string> consistency_model;
  int repetitions_consistency = 5;
  double temperature = 0.0;
  std::uint64_t seed = 0;
  std::size_t max_concurrency = 4;
  /// JSONL destination; empty disables persistence.
  std::filesystem::path output_path;
  RetryPolicy retry;

  /// Throws InvalidConfig.
  void validate() const;
  std::string label(const std::string& model) const;
  const std::string& subject_model() const;
};

/// Timestamp source; the argument is the record's position in the output.
using Clock = std::function<std::string(std::size_t)>;

/// UTC wall clock, ISO-8601 with milliseconds.
Clock wall_clock();
/// 1970-01-01T00:00:00Z plus one second per record; makes runs byte-reproducible.
Clock logical_clock();

struct SentenceLong {
  std::string token;
};
struct SentenceSplit {
  std::vector<std::string> segments;
};
struct Translate {
  std::string token;
};
struct Explain {
  std::string token;
};
struct JudgeRank {
  std::vector<std::string> sentences;
};
struct JudgeConsistency {
  std::string token;
  /// "translate" or "explain".
  std::string task;
  std::vector<std::string> outputs;
};

using PromptTask =
    std::variant<SentenceLong, SentenceSplit, Translate, Explain, JudgeRank, JudgeConsistency>;

/// Throws WrongVariant for non-sentence tasks or an empty segment list.
std::string build_sentence_prompt(const PromptTask& task,
                                  const TemplateSet& templates = TemplateSet::builtin());

/// Any task. Throws WrongVariant when a task violates its invariant.
std::string build_prompt(const PromptTask& task, const TemplateSet& templates);

struct HarnessContext {
  TemplateSet templates = TemplateSet::builtin();
  Clock clock = wall_clock();
  /// Called once per persisted record, from the writer thread.
  std::function<void(std::string_view)> log;
};

/// Two sentence tasks (long, split) per token and model. Provider failures
/// become records with `error` set. Throws PersistError.
std::vector<GenerationRecord> run_generation(const TokenSample& sample,
                                             const FrequencyDictionary& dict,
                                             const ExperimentConfig& cfg, Provider& provider,
                                             const HarnessContext& ctx = {});

/// N_g translate and N_g explain requests per token against the subject
/// model. Throws NonZeroTemperature, PersistError.
std::vector<GenerationRecord> run_consistency(const TokenSample& sample,
                                              const ExperimentConfig& cfg, Provider& provider,
                                              const HarnessContext& ctx = {});

/// Rank: one judgement per token over its sentence records, shown in
/// member-id order. Consistency: one judgement per (token, task) over its
/// repetitions. Unparseable judge output is recorded as an error.
std::vector<JudgeRecord> run_judge(const std::vector<GenerationRecord>& records,
                                   const std::string& judge_model, Provider& provider,
                                   JudgeMode mode, const ExperimentConfig& cfg,
                                   const HarnessContext& ctx = {});

/// First comma-separated run of exactly `n` integers forming a permutation
/// of 1..n.
std::optional<std::vector<int>> parse_ranking(std::string_view response, std::size_t n);

/// `consistent=<0|1>` and `accurate=<0|1>` (either order, `:` also
/// accepted); returns (consistent, accurate).
std::optional<std::pair<int, int>> parse_consistency_flags(std::string_view response);

}  // namespace tokbias
