#include "tokbias/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "tokbias/error.hpp"

namespace tokbias {

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

bool containment_check(std::string_view token_text,
                       const std::optional<std::vector<std::string>>& segments,
                       std::string_view sentence) {
  sentence = trim(sentence);
  if (segments) {
    for (const auto& seg : *segments) {
      if (sentence.find(seg) == std::string_view::npos) return false;
    }
    return true;
  }
  if (!token_text.empty() && token_text.front() == ' ') token_text.remove_prefix(1);
  return sentence.find(token_text) != std::string_view::npos;
}

double token_retention_accuracy(std::span<const bool> flags) {
  if (flags.empty()) throw Error(Errc::EmptyInput, "no sentences");
  const auto present = std::count(flags.begin(), flags.end(), true);
  return static_cast<double>(present) / static_cast<double>(flags.size());
}

double token_retention_accuracy(const std::vector<bool>& flags) {
  if (flags.empty()) throw Error(Errc::EmptyInput, "no sentences");
  const auto present = std::count(flags.begin(), flags.end(), true);
  return static_cast<double>(present) / static_cast<double>(flags.size());
}

std::map<ModelVariant, TraCell> tra_from_generations(const std::vector<GenerationRecord>& records) {
  std::map<ModelVariant, TraCell> out;
  for (const auto& r : records) {
    const auto v = parse_variant(r.variant);
    if (!v || !r.response) continue;
    auto& cell = out[{r.model, *v}];
    const bool present = *v == Variant::Long
                             ? containment_check(r.token, std::nullopt, *r.response)
                             : containment_check(r.token, r.segments, *r.response);
    cell.present += present ? 1 : 0;
    ++cell.total;
  }
  for (auto& [key, cell] : out) {
    cell.value = static_cast<double>(cell.present) / static_cast<double>(cell.total);
  }
  return out;
}

std::map<std::string, std::vector<double>> ranking_distribution(const std::vector<RankRecord>& records) {
  std::map<std::string, std::vector<double>> out;
  if (records.empty()) return out;
  std::set<std::string> ids;
  for (const auto& [id, pos] : records.front().placements) ids.insert(id);
  const auto k = ids.size();
  std::map<std::string, std::vector<std::size_t>> counts;
  for (const auto& id : ids) counts[id].assign(k, 0);

  for (const auto& r : records) {
    std::set<int> positions;
    for (const auto& [id, pos] : r.placements) {
      if (!ids.contains(id) || pos < 1 || pos > static_cast<int>(k) || !positions.insert(pos).second) {
        throw Error(Errc::InvalidPermutation, "token " + std::to_string(r.token_rank));
      }
      ++counts[id][static_cast<std::size_t>(pos - 1)];
    }
    if (positions.size() != k) {
      throw Error(Errc::InvalidPermutation, "token " + std::to_string(r.token_rank));
    }
  }
  const auto n = static_cast<double>(records.size());
  for (const auto& [id, c] : counts) {
    auto& row = out[id];
    for (const auto x : c) row.push_back(static_cast<double>(x) / n);
  }
  return out;
}

std::map<ModelVariant, std::array<double, 6>> score_distribution(const std::vector<ScoreRecord>& records) {
  std::map<ModelVariant, std::array<std::size_t, 6>> counts;
  for (const auto& r : records) {
    if (r.score < 0 || r.score > 5) {
      throw Error(Errc::ScoreOutOfRange, std::to_string(r.score));
    }
    ++counts[{r.model, r.variant}][static_cast<std::size_t>(r.score)];
  }
  std::map<ModelVariant, std::array<double, 6>> out;
  for (const auto& [key, c] : counts) {
    const auto total = std::accumulate(c.begin(), c.end(), std::size_t{0});
    auto& dist = out[key];
    for (std::size_t s = 0; s < 6; ++s) {
      dist[s] = static_cast<double>(c[s]) / static_cast<double>(total);
    }
  }
  return out;
}

std::map<std::string, ConsistencyCell> consistency_summary(const std::vector<JudgeRecord>& judgments) {
  struct Sum {
    std::size_t accurate = 0, consistent = 0, n = 0;
  };
  std::map<std::string, Sum> sums;
  for (const auto& j : judgments) {
    if (j.mode != JudgeMode::Consistency || !j.accurate || !j.consistent) continue;
    const auto flag_ok = [](int v) { return v == 0 || v == 1; };
    if (!flag_ok(*j.accurate) || !flag_ok(*j.consistent)) {
      throw Error(Errc::MalformedRecord, "non-binary flag for token " + std::to_string(j.token_rank));
    }
    const std::string key = j.task == "explain"     ? "meanings"
                            : j.task == "translate" ? "translations"
                                                    : j.task;
    auto& s = sums[key];
    s.accurate += static_cast<std::size_t>(*j.accurate);
    s.consistent += static_cast<std::size_t>(*j.consistent);
    ++s.n;
  }
  std::map<std::string, ConsistencyCell> out;
  for (const auto& [key, s] : sums) {
    out[key] = {static_cast<double>(s.accurate) / static_cast<double>(s.n),
                static_cast<double>(s.consistent) / static_cast<double>(s.n), s.n};
  }
  return out;
}

std::map<std::size_t, std::map<std::string, std::size_t>> score5_by_size(
    const std::vector<ScoreRecord>& records, const std::map<Rank, std::size_t>& lengths,
    const std::map<std::string, std::string>& labels) {
  std::map<std::size_t, std::map<std::string, std::size_t>> out;
  std::set<std::string> series;
  for (const auto& r : records) {
    const auto it = labels.find(r.model);
    series.insert((it == labels.end() ? r.model : it->second) +
                  (r.variant == Variant::Long ? "-L" : "-S"));
  }
  for (const auto& [rank, len] : lengths) {
    auto& row = out[len];
    for (const auto& s : series) row.emplace(s, 0);
    row.emplace(kTotalSeries, 0);
  }
  for (const auto& r : records) {
    const auto len = lengths.find(r.token_rank);
    if (len == lengths.end()) throw Error(Errc::MissingLength, std::to_string(r.token_rank));
    if (r.score != 5) continue;
    const auto it = labels.find(r.model);
    const auto id = (it == labels.end() ? r.model : it->second) + (r.variant == Variant::Long ? "-L" : "-S");
    auto& row = out[len->second];
    ++row[id];
    ++row[std::string(kTotalSeries)];
  }
  return out;
}

std::map<std::size_t, std::map<std::string, std::size_t>> cumulative(
    const std::map<std::size_t, std::map<std::string, std::size_t>>& by_size) {
  std::map<std::size_t, std::map<std::string, std::size_t>> out;
  std::map<std::string, std::size_t> running;
  for (const auto& [len, row] : by_size) {
    for (const auto& [id, n] : row) running[id] += n;
    out[len] = running;
  }
  return out;
}

bool operator==(const MetricsReport& a, const MetricsReport& b) {
  const auto plan_eq = [](const std::optional<SamplePlan>& x, const std::optional<SamplePlan>& y) {
    if (x.has_value() != y.has_value()) return false;
    if (!x) return true;
    return x->per_length == y->per_length && x->cap == y->cap && x->total == y->total;
  };
  return plan_eq(a.sample_plan, b.sample_plan) && a.tra == b.tra &&
         a.ranking_matrix == b.ranking_matrix && a.score_dist == b.score_dist &&
         a.consistency == b.consistency && a.score5_by_size == b.score5_by_size;
}

MetricsReport compute_metrics(const MetricsInputs& in) {
  MetricsReport report;
  report.sample_plan = in.sample_plan;
  report.tra = tra_from_generations(in.generations);
  auto rankings = in.rankings;
  for (const auto& j : in.judgments) {
    if (auto r = to_rank_record(j)) rankings.push_back(std::move(*r));
  }
  report.ranking_matrix = ranking_distribution(rankings);
  report.score_dist = score_distribution(in.scores);
  report.consistency = consistency_summary(in.judgments);
  if (!in.scores.empty() && !in.lengths.empty()) {
    report.score5_by_size = score5_by_size(in.scores, in.lengths, in.labels);
  }
  return report;
}

MetricsInputs load_metrics_inputs(const std::filesystem::path& dir) {
  const auto read = [](const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  MetricsInputs in;
  try {
    const auto manifest = nlohmann::json::parse(read(dir / "manifest.json"));
    if (manifest.contains("labels")) {
      in.labels = manifest.at("labels").get<std::map<std::string, std::string>>();
    }
    const auto files = manifest.value("files", nlohmann::json::object());
    const auto file = [&](const char* key) -> std::optional<std::filesystem::path> {
      if (!files.contains(key)) return std::nullopt;
      return dir / files.at(key).get<std::string>();
    };
    if (const auto p = file("generations")) in.generations = load_generations(*p);
    if (const auto p = file("judgments")) in.judgments = load_judgments(*p);
    if (const auto p = file("scores")) in.scores = load_scores(*p);
    if (const auto p = file("rankings")) in.rankings = load_rankings(*p);
    if (const auto p = file("tokens")) {
      SamplePlan plan;
      for (const auto& t : nlohmann::json::parse(read(*p))) {
        const auto len = t.at("length").get<std::size_t>();
        in.lengths[t.at("rank").get<Rank>()] = len;
        ++plan.per_length[len];
        ++plan.total;
      }
      for (const auto& [len, n] : plan.per_length) plan.cap = std::max(plan.cap, n);
      plan.cap = manifest.value("cap", plan.cap);
      in.sample_plan = plan;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedRecord, dir.string() + ": " + e.what());
  }
  return in;
}

double round4(double x) { return std::floor(x * 10000.0 + 0.5) / 10000.0; }

std::string format4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", round4(x));
  return buf;
}

}  // namespace tokbias
