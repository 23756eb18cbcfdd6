// Acceptance gate. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "expected_tables.hpp"
#include "oracles.hpp"
#include "test_support.hpp"
#include "tokbias/bpe.hpp"
#include "tokbias/error.hpp"
#include "tokbias/harness.hpp"
#include "tokbias/metrics.hpp"
#include "tokbias/sampler.hpp"
#include "tokbias/script.hpp"
#include "tokbias/segmenter.hpp"

using namespace tokbias;
using namespace tokbias::test;

namespace {

// Pinned limits.
constexpr double kLoadBudgetS = 5.0;
constexpr double kShortTextBudgetS = 1.0;
constexpr double kBpeBudgetS = 30.0;
constexpr double kSegmentBudgetS = 10.0;
constexpr double kHarnessBudgetS = 5.0;
constexpr long kQuotedVocabSize = 199997;
constexpr long kVocabSizeTolerance = 2;
constexpr std::size_t kMeasuredVocabSize = 199998;

struct Outcome {
  bool pass = true;
  std::ostringstream notes;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes << " [failed: " << what << "]";
    }
  }
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

bool matches_display(std::string_view bytes, std::string_view shown) {
  if (bytes == shown) return true;
  return !bytes.empty() && (bytes.front() == ' ' || bytes.front() == '_') && bytes.substr(1) == shown;
}

void vocabulary_fidelity(Outcome& o) {
  const auto dir = rank_dir();
  o.check(dir.has_value(), "rank files available");
  if (!dir) return;
  const auto path = *dir / "o200k_base.tiktoken";
  const Stopwatch sw;
  const auto vocab = load_rank_file(path, "o200k_base");
  const auto t = sw.seconds();
  o.check(t < kLoadBudgetS, "load under " + fmt(kLoadBudgetS));

  std::size_t lines = 0;
  for (std::istringstream in(read_file(path)); ;) {
    std::string line;
    if (!std::getline(in, line)) break;
    if (!line.empty()) ++lines;
  }
  const auto n = static_cast<long>(vocab.size());
  o.check(vocab.size() == lines, "size equals line count");
  o.check(std::labs(n - kQuotedVocabSize) <= kVocabSizeTolerance, "within 2 of 199997");
  o.check(vocab.size() == kMeasuredVocabSize, "exact measured size");

  const std::vector<std::pair<Rank, std::string>> shown = {
      {181081, "微信公众号天天中彩票"}, {13492, "北京赛车"}, {53332, "国产精品"}, {185118, "日本毛片免费视频观看"}};
  for (const auto& [rank, text] : shown) {
    const auto bytes = decode_token(vocab, rank);
    o.check(matches_display(bytes, text), "decode " + std::to_string(rank));
  }
  o.notes << " size=" << vocab.size() << " lines=" << lines << " load=" << fmt(t);
}

void short_text_counts(Outcome& o) {
  const auto* gpt4o = real("o200k_base");
  const auto* gpt4 = real("cl100k_base");
  o.check(gpt4o && gpt4, "rank files available");
  if (!gpt4o || !gpt4) return;
  const std::string text = "微信公众号天天中彩票";
  const Stopwatch sw;
  const auto a = encode(text, gpt4o->vocab, gpt4o->profile, EncodeMode::Shortcut);
  const auto b = encode(text, gpt4->vocab, gpt4->profile, EncodeMode::Shortcut);
  const auto t = sw.seconds();
  o.check(a.ranks.size() == 2, "2 tokens under o200k_base");
  o.check(b.ranks.size() == 12, "12 tokens under cl100k_base");
  o.check(t < kShortTextBudgetS, "under " + fmt(kShortTextBudgetS));
  o.notes << " o200k=" << a.ranks.size() << " cl100k=" << b.ranks.size() << " t=" << fmt(t);
}

void bpe_properties(Outcome& o) {
  const Stopwatch sw;
  std::vector<std::pair<const Vocabulary*, VocabularyProfile>> tokenizers;
  const auto toy = byte_vocab({"th", "he", "the", " the", "in", "微", "信", "微信", "  "});
  tokenizers.emplace_back(&toy, VocabularyProfile{"toy", {}, kSimplePattern, {}});
  if (const auto* r = real("o200k_base")) tokenizers.emplace_back(&r->vocab, r->profile);
  std::size_t round_trips = 0;
  for (const auto& [vocab, profile] : tokenizers) {
    const Encoder enc(*vocab, profile);
    std::mt19937 rng(1234);
    for (int i = 0; i < 1000; ++i) {
      const auto s = random_utf8(rng);
      for (const auto mode : {EncodeMode::Shortcut, EncodeMode::StrictMerges}) {
        o.check(decode(enc.encode(s, mode).ranks, *vocab) == s, "round trip");
        ++round_trips;
      }
    }
  }
  const auto mismatches = bpe_oracle_mismatches(424242);
  const auto t = sw.seconds();
  o.check(mismatches == 0, "strict engine equals naive oracle");
  o.check(t < kBpeBudgetS, "under " + fmt(kBpeBudgetS));
  o.notes << " round_trips=" << round_trips << " oracle_mismatches=" << mismatches << " t=" << fmt(t);
}

void sampling_plan(Outcome& o) {
  LengthHistogram h;
  h.counts = {{2, 2846}, {3, 444}, {4, 376}, {5, 110}, {6, 130}, {7, 70}, {8, 30}, {9, 24}, {10, 4}, {11, 2}};
  const auto plan = plan_sample(h, 20);
  std::map<std::size_t, std::size_t> want;
  for (std::size_t len = 2; len <= 9; ++len) want[len] = 20;
  want[10] = 4;
  want[11] = 2;
  o.check(plan.total == kSampledTokens, "total 166");
  o.check(plan.per_length == want, "bucket sizes");
  o.notes << " total=" << plan.total;
  if (const auto* r = real("o200k_base")) {
    for (const auto& [name, rule] : {std::pair{"strict", LengthRule{}}, std::pair{"raw", LengthRule::raw()}}) {
      const auto hist = build_length_histogram(r->vocab, ScriptClass::Han, 2, rule);
      const auto at = [&](std::size_t len) { return hist.counts.contains(len) ? hist.counts.at(len) : 0; };
      o.notes << " real_" << name << ":10=" << at(10) << ",11=" << at(11);
      if (at(10) != 4 || at(11) != 2) o.notes << "(filter deviation, expected 4/2)";
    }
  } else {
    o.notes << " real histogram skipped: rank files unavailable";
  }
}

void segmentation(Outcome& o) {
  const Stopwatch sw;
  const auto dict = load_dictionary(data_dir() / "dict" / "fixture.dict");
  const auto seg = segment("微信公众号天天中彩票", dict).segments;
  o.check(seg == std::vector<std::string>{"微信", "公众", "号", "天天", "中", "彩票"}, "reference split");
  const auto mismatches = segment_oracle_mismatches(2024);
  const auto t = sw.seconds();
  o.check(mismatches == 0, "DP equals exhaustive enumeration");
  o.check(t < kSegmentBudgetS, "under " + fmt(kSegmentBudgetS));
  o.notes << " oracle_mismatches=" << mismatches << " t=" << fmt(t);
}

void metric_fidelity(Outcome& o) {
  const auto r = compute_metrics(load_metrics_inputs(fixtures_dir()));
  std::size_t cells = 0;
  const auto cell = [&](double got, const char* want, const std::string& where) {
    ++cells;
    o.check(format4(got) == want, where + " " + format4(got) + "!=" + want);
  };
  for (const auto& row : kTraRows) {
    cell(r.tra.at({row.model, Variant::Long}).value, row.long_value, row.model + " long");
    cell(r.tra.at({row.model, Variant::Split}).value, row.split_value, row.model + " split");
  }
  for (const auto& [id, want] : kRankingRows) {
    for (std::size_t p = 0; p < 4; ++p) cell(r.ranking_matrix.at(id)[p], want[p], id + "@" + std::to_string(p + 1));
  }
  for (const auto& [key, want] : kScoreColumns) {
    const auto& dist = r.score_dist.at({key.first, *parse_variant(key.second)});
    for (std::size_t s = 0; s < 6; ++s) cell(dist[s], want[s], key.first + ":" + key.second + "=" + std::to_string(s));
  }
  for (const auto& [type, want] : kConsistencyRows) {
    cell(r.consistency.at(type).accuracy, want.first, type + " accuracy");
    cell(r.consistency.at(type).consistency, want.second, type + " consistency");
  }
  o.notes << " cells=" << cells;
}

void harness_determinism(Outcome& o) {
  const Stopwatch sw;
  const auto dict = load_dictionary(data_dir() / "dict" / "fixture.dict");
  TokenSample sample;
  sample.seed = 1;
  sample.entries = {{181081, 10, "微信公众号天天中彩票"}, {13492, 4, "北京赛车"}, {53332, 4, "国产精品"},
                    {1001, 2, "天天"}, {1002, 3, "公众号"}, {1003, 2, "彩票"}};
  const auto dir = std::filesystem::temp_directory_path() / "tokbias_acceptance";
  std::filesystem::create_directories(dir);
  std::string first;
  for (int run = 0; run < 2; ++run) {
    ExperimentConfig cfg;
    cfg.models = {"GPT-4", "GPT-4o"};
    cfg.labels = {{"GPT-4", "G4"}, {"GPT-4o", "G4o"}};
    cfg.repetitions_consistency = 5;
    cfg.seed = 42;
    cfg.max_concurrency = run == 0 ? 1 : 8;
    HarnessContext ctx;
    ctx.clock = logical_clock();
    MockProvider mock(42);
    cfg.output_path = dir / "generations.jsonl";
    const auto gen = run_generation(sample, dict, cfg, mock, ctx);
    cfg.output_path = dir / "consistency.jsonl";
    const auto cons = run_consistency(sample, cfg, mock, ctx);
    o.check(gen.size() == 24, "24 generation records");
    o.check(cons.size() == 60, "60 consistency records");
    const auto bytes = read_file(dir / "generations.jsonl") + read_file(dir / "consistency.jsonl");
    if (run == 0) {
      first = bytes;
    } else {
      o.check(bytes == first, "byte-identical reruns");
    }
  }
  const auto t = sw.seconds();
  o.check(t < kHarnessBudgetS, "under " + fmt(kHarnessBudgetS));
  o.notes << " bytes=" << first.size() << " t=" << fmt(t);
}

void declaration(Outcome& o) {
  // Model outputs and human ratings behind the published tables cannot be
  // regenerated offline; criteria 6 and 7 stand in for them. The fixture
  // set must say it is synthetic.
  const auto manifest = nlohmann::json::parse(read_file(fixtures_dir() / "manifest.json"));
  o.check(manifest.value("synthetic", false), "fixtures declared synthetic");
  o.notes << " live model and rater numbers not reproducible; substituted by fixture equivalence (6) "
             "and deterministic mock pipeline (7)";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"vocabulary fidelity", vocabulary_fidelity},
      {"short-text token counts", short_text_counts},
      {"BPE properties", bpe_properties},
      {"length-capped sampling plan", sampling_plan},
      {"segmentation", segmentation},
      {"metric fidelity", metric_fidelity},
      {"harness determinism", harness_determinism},
      {"non-reproducible content declared", declaration},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %zu %s:%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.notes.str().c_str());
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures;
}
