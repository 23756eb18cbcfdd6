#include "tokbias/records.hpp"

#include <fstream>
#include <set>

#include "tokbias/error.hpp"

namespace tokbias {

using ojson = nlohmann::ordered_json;

std::string_view to_string(Variant v) noexcept { return v == Variant::Long ? "long" : "split"; }

std::optional<Variant> parse_variant(std::string_view s) noexcept {
  if (s == "long" || s == "sentence_long") return Variant::Long;
  if (s == "split" || s == "sentence_split") return Variant::Split;
  return std::nullopt;
}

std::string_view to_string(JudgeMode m) noexcept {
  return m == JudgeMode::Rank ? "rank" : "consistency";
}

namespace {

template <class T>
void put_optional(ojson& j, const char* key, const std::optional<T>& v) {
  if (v) {
    j[key] = *v;
  } else {
    j[key] = nullptr;
  }
}

template <class T>
std::optional<T> get_optional(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

void check_schema(const nlohmann::json& j, std::string_view expected) {
  const auto it = j.find("schema");
  if (it != j.end() && it->get<std::string>() != expected) {
    throw Error(Errc::MalformedRecord,
                "schema " + it->get<std::string>() + ", expected " + std::string(expected));
  }
}

template <class Fn>
auto guarded(const char* what, Fn fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedRecord, std::string(what) + ": " + e.what());
  }
}

template <class Parse>
auto read_jsonl(const std::filesystem::path& path, Parse parse) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::vector<decltype(parse(nlohmann::json{}))> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::MalformedRecord,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(parse(j));
  }
  return out;
}

}  // namespace

ojson to_json(const GenerationRecord& r) {
  ojson j;
  j["schema"] = kGenerationSchema;
  j["record_id"] = r.record_id;
  j["token_rank"] = r.token_rank;
  j["variant"] = r.variant;
  j["model"] = r.model;
  j["repetition"] = r.repetition;
  j["token"] = r.token;
  j["segments"] = r.segments;
  j["prompt"] = r.prompt;
  put_optional(j, "response", r.response);
  j["timestamp"] = r.timestamp;
  put_optional(j, "error", r.error);
  return j;
}

GenerationRecord generation_from_json(const nlohmann::json& j) {
  return guarded("generation record", [&] {
    check_schema(j, kGenerationSchema);
    GenerationRecord r;
    r.record_id = j.value("record_id", "");
    r.token_rank = j.at("token_rank").get<Rank>();
    r.variant = j.at("variant").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.repetition = j.value("repetition", 0);
    r.token = j.value("token", "");
    r.segments = j.value("segments", std::vector<std::string>{});
    r.prompt = j.value("prompt", "");
    r.response = get_optional<std::string>(j, "response");
    r.timestamp = j.value("timestamp", "");
    r.error = get_optional<std::string>(j, "error");
    if (r.response && r.error) {
      throw Error(Errc::MalformedRecord, "record " + r.record_id + " has both response and error");
    }
    return r;
  });
}

ojson to_json(const JudgeRecord& r) {
  ojson j;
  j["schema"] = kJudgeSchema;
  j["record_id"] = r.record_id;
  j["token_rank"] = r.token_rank;
  j["mode"] = to_string(r.mode);
  j["task"] = r.task;
  j["judge_model"] = r.judge_model;
  j["template_version"] = r.template_version;
  j["members"] = r.members;
  j["prompt"] = r.prompt;
  put_optional(j, "response", r.response);
  j["timestamp"] = r.timestamp;
  put_optional(j, "ranking", r.ranking);
  put_optional(j, "accurate", r.accurate);
  put_optional(j, "consistent", r.consistent);
  put_optional(j, "error", r.error);
  return j;
}

JudgeRecord judge_from_json(const nlohmann::json& j) {
  return guarded("judge record", [&] {
    check_schema(j, kJudgeSchema);
    JudgeRecord r;
    r.record_id = j.value("record_id", "");
    r.token_rank = j.at("token_rank").get<Rank>();
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "rank") {
      r.mode = JudgeMode::Rank;
    } else if (mode == "consistency") {
      r.mode = JudgeMode::Consistency;
    } else {
      throw Error(Errc::MalformedRecord, "judge mode " + mode);
    }
    r.task = j.value("task", "");
    r.judge_model = j.value("judge_model", "");
    r.template_version = j.value("template_version", "");
    r.members = j.value("members", std::vector<std::string>{});
    r.prompt = j.value("prompt", "");
    r.response = get_optional<std::string>(j, "response");
    r.timestamp = j.value("timestamp", "");
    r.ranking = get_optional<std::vector<int>>(j, "ranking");
    r.accurate = get_optional<int>(j, "accurate");
    r.consistent = get_optional<int>(j, "consistent");
    r.error = get_optional<std::string>(j, "error");
    return r;
  });
}

ojson to_json(const ScoreRecord& r) {
  ojson j;
  j["schema"] = kScoreSchema;
  j["token_rank"] = r.token_rank;
  j["model"] = r.model;
  j["variant"] = to_string(r.variant);
  j["score"] = r.score;
  return j;
}

ScoreRecord score_from_json(const nlohmann::json& j) {
  return guarded("score record", [&] {
    check_schema(j, kScoreSchema);
    ScoreRecord r;
    r.token_rank = j.at("token_rank").get<Rank>();
    r.model = j.at("model").get<std::string>();
    const auto v = parse_variant(j.at("variant").get<std::string>());
    if (!v) throw Error(Errc::MalformedRecord, "variant " + j.at("variant").dump());
    r.variant = *v;
    r.score = j.at("score").get<int>();
    if (r.score < 0 || r.score > 5) {
      throw Error(Errc::ScoreOutOfRange, std::to_string(r.score) + " for token " +
                                             std::to_string(r.token_rank));
    }
    return r;
  });
}

ojson to_json(const RankRecord& r) {
  ojson j;
  j["schema"] = kRankSchema;
  j["token_rank"] = r.token_rank;
  auto& p = j["placements"] = ojson::object();
  for (const auto& [id, pos] : r.placements) p[id] = pos;
  return j;
}

RankRecord rank_from_json(const nlohmann::json& j) {
  return guarded("rank record", [&] {
    check_schema(j, kRankSchema);
    RankRecord r;
    r.token_rank = j.at("token_rank").get<Rank>();
    r.placements = j.at("placements").get<std::map<std::string, int>>();
    return r;
  });
}

std::optional<RankRecord> to_rank_record(const JudgeRecord& r) {
  if (r.mode != JudgeMode::Rank || !r.ranking || r.error) return std::nullopt;
  const auto& ranking = *r.ranking;
  if (ranking.size() != r.members.size()) return std::nullopt;
  RankRecord out;
  out.token_rank = r.token_rank;
  std::set<int> seen;
  for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
    const int idx = ranking[pos];
    if (idx < 1 || idx > static_cast<int>(r.members.size()) || !seen.insert(idx).second) {
      return std::nullopt;
    }
    out.placements[r.members[static_cast<std::size_t>(idx - 1)]] = static_cast<int>(pos + 1);
  }
  return out;
}

std::vector<GenerationRecord> load_generations(const std::filesystem::path& path) {
  return read_jsonl(path, generation_from_json);
}

std::vector<JudgeRecord> load_judgments(const std::filesystem::path& path) {
  return read_jsonl(path, judge_from_json);
}

std::vector<ScoreRecord> load_scores(const std::filesystem::path& path) {
  return read_jsonl(path, score_from_json);
}

std::vector<RankRecord> load_rankings(const std::filesystem::path& path) {
  return read_jsonl(path, rank_from_json);
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::PersistError, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(Errc::PersistError, "write failed for " + path.string());
}

}  // namespace tokbias
