#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tokbias/vocab.hpp"

namespace tokbias {

inline constexpr std::string_view kGenerationSchema = "tokbias.generation/1";
inline constexpr std::string_view kJudgeSchema = "tokbias.judge/1";
inline constexpr std::string_view kScoreSchema = "tokbias.score/1";
inline constexpr std::string_view kRankSchema = "tokbias.rank/1";

/// Long = the whole vocabulary token, Split = its segmented form.
enum class Variant { Long, Split };
std::string_view to_string(Variant v) noexcept;
/// Accepts "long"/"split" and the record variants "sentence_long"/"sentence_split".
std::optional<Variant> parse_variant(std::string_view s) noexcept;

/// One prompt/response event.
struct GenerationRecord {
  std::string record_id;
  Rank token_rank = 0;
  /// sentence_long, sentence_split, translate or explain.
  std::string variant;
  std::string model;
  int repetition = 0;
  std::string token;
  std::vector<std::string> segments;
  std::string prompt;
  std::optional<std::string> response;
  std::string timestamp;
  std::optional<std::string> error;

  friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
};

enum class JudgeMode { Rank, Consistency };
std::string_view to_string(JudgeMode m) noexcept;

struct JudgeRecord {
  std::string record_id;
  Rank token_rank = 0;
  JudgeMode mode = JudgeMode::Rank;
  /// "sentence" for Rank; "translate" or "explain" for Consistency.
  std::string task;
  std::string judge_model;
  std::string template_version;
  /// Rank: item ids in the order they were shown (e.g. "G4o-L").
  /// Consistency: the judged generation record ids.
  std::vector<std::string> members;
  std::string prompt;
  std::optional<std::string> response;
  std::string timestamp;
  /// Rank: 1-based member indices from best to worst.
  std::optional<std::vector<int>> ranking;
  std::optional<int> accurate;
  std::optional<int> consistent;
  std::optional<std::string> error;

  friend bool operator==(const JudgeRecord&, const JudgeRecord&) = default;
};

/// Human relevance/accuracy score for one generated sentence.
struct ScoreRecord {
  Rank token_rank = 0;
  std::string model;
  Variant variant = Variant::Long;
  int score = 0;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

/// Position (1 = best) of each item for one token.
struct RankRecord {
  Rank token_rank = 0;
  std::map<std::string, int> placements;

  friend bool operator==(const RankRecord&, const RankRecord&) = default;
};

nlohmann::ordered_json to_json(const GenerationRecord& r);
nlohmann::ordered_json to_json(const JudgeRecord& r);
nlohmann::ordered_json to_json(const ScoreRecord& r);
nlohmann::ordered_json to_json(const RankRecord& r);

/// Throw Error(MalformedRecord); ScoreRecord also ScoreOutOfRange.
GenerationRecord generation_from_json(const nlohmann::json& j);
JudgeRecord judge_from_json(const nlohmann::json& j);
ScoreRecord score_from_json(const nlohmann::json& j);
RankRecord rank_from_json(const nlohmann::json& j);

/// Rank-mode judge record -> placements keyed by member id. nullopt when the
/// record carries no valid ranking.
std::optional<RankRecord> to_rank_record(const JudgeRecord& r);

/// JSONL readers; blank lines are skipped. Throw Io, MalformedRecord.
std::vector<GenerationRecord> load_generations(const std::filesystem::path& path);
std::vector<JudgeRecord> load_judgments(const std::filesystem::path& path);
std::vector<ScoreRecord> load_scores(const std::filesystem::path& path);
std::vector<RankRecord> load_rankings(const std::filesystem::path& path);

/// One compact JSON object per line.
template <class Record>
std::string to_jsonl(const std::vector<Record>& records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

/// Throws PersistError.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace tokbias
