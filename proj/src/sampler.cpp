#include "tokbias/sampler.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "tokbias/error.hpp"

namespace tokbias {

SamplePlan plan_sample(const LengthHistogram& hist, std::size_t cap) {
  SamplePlan plan;
  plan.cap = cap;
  for (const auto& [len, n] : hist.counts) {
    const auto take = std::min(n, cap);
    plan.per_length[len] = take;
    plan.total += take;
  }
  return plan;
}

namespace {

// Uniform integer in [0, bound) by rejection on the top of the 64-bit range.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = 0;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

TokenSample draw_sample(std::span<const Candidate> tokens, const SamplePlan& plan,
                        std::uint64_t seed) {
  std::map<std::size_t, std::vector<Rank>> buckets;
  for (const auto& t : tokens) buckets[t.length].push_back(t.rank);

  TokenSample sample;
  sample.seed = seed;
  std::mt19937_64 rng(seed);
  for (const auto& [len, take] : plan.per_length) {
    if (take == 0) continue;
    auto& pool = buckets[len];
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    if (pool.size() < take) {
      throw Error(Errc::InsufficientTokens, "length " + std::to_string(len) + " has " +
                                                std::to_string(pool.size()) + " tokens, plan takes " +
                                                std::to_string(take));
    }
    if (pool.size() > take) {
      // Partial Fisher-Yates: the first `take` slots end up a uniform subset.
      for (std::size_t i = 0; i < take; ++i) {
        const auto j = i + uniform_below(rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
      }
      pool.resize(take);
      std::sort(pool.begin(), pool.end());
    }
    for (const auto r : pool) sample.entries.push_back({r, len, {}});
  }
  return sample;
}

std::vector<Candidate> collect_candidates(const Vocabulary& vocab, ScriptClass cls,
                                          std::size_t min_len, const LengthRule& rule) {
  std::vector<Candidate> out;
  for (const auto& rec : vocab.records()) {
    if (classify_token(rec, rule) != cls) continue;
    const auto len = effective_char_length(rec, rule);
    if (len && *len >= min_len) out.push_back({rec.rank(), *len});
  }
  return out;
}

void attach_texts(TokenSample& sample, const Vocabulary& vocab, const LengthRule& rule) {
  for (auto& e : sample.entries) {
    const auto text = stripped_text(vocab.at(e.rank), rule);
    e.text = text ? std::string(*text) : token_display(vocab.at(e.rank));
  }
}

std::string sample_to_json(const TokenSample& sample, const SamplePlan& plan) {
  nlohmann::ordered_json j;
  j["seed"] = sample.seed;
  auto& p = j["plan"];
  p["cap"] = plan.cap;
  p["total"] = plan.total;
  auto& per = p["per_length"] = nlohmann::ordered_json::object();
  for (const auto& [len, take] : plan.per_length) per[std::to_string(len)] = take;
  auto& arr = j["sample"] = nlohmann::ordered_json::array();
  for (const auto& e : sample.entries) {
    arr.push_back({{"rank", e.rank}, {"text", e.text}, {"length", e.length}});
  }
  return j.dump(2);
}

TokenSample sample_from_json(std::string_view json) {
  TokenSample sample;
  try {
    const auto j = nlohmann::json::parse(json);
    const nlohmann::json* arr = &j;
    if (j.is_object()) {
      sample.seed = j.value("seed", std::uint64_t{0});
      arr = &j.at("sample");
    }
    for (const auto& e : *arr) {
      sample.entries.push_back(
          {e.at("rank").get<Rank>(), e.at("length").get<std::size_t>(), e.value("text", "")});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedRecord, std::string("sample: ") + e.what());
  }
  return sample;
}

TokenSample load_sample(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open sample " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sample_from_json(ss.str());
}

}  // namespace tokbias
