#include "tokbias/harness.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <ctime>
#include <fstream>
#include <mutex>
#include <regex>
#include <set>
#include <thread>

#include "tokbias/error.hpp"
#include "tokbias/hash.hpp"

namespace tokbias {

void ExperimentConfig::validate() const {
  if (models.empty()) throw Error(Errc::InvalidConfig, "at least one model is required");
  if (repetitions_consistency < 1) throw Error(Errc::InvalidConfig, "repetitions must be >= 1");
  if (!(temperature >= 0.0)) throw Error(Errc::InvalidConfig, "temperature must be >= 0");
  if (max_concurrency < 1) throw Error(Errc::InvalidConfig, "max_concurrency must be >= 1");
  if (retry.attempts < 1) throw Error(Errc::InvalidConfig, "retry attempts must be >= 1");
}

std::string ExperimentConfig::label(const std::string& model) const {
  const auto it = labels.find(model);
  return it == labels.end() ? model : it->second;
}

const std::string& ExperimentConfig::subject_model() const {
  return consistency_model ? *consistency_model : models.front();
}

Clock wall_clock() {
  return [](std::size_t) {
    const auto now = std::chrono::system_clock::now();
    const auto secs = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()) % 1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[40];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[48];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms.count()));
    return std::string(out);
  };
}

Clock logical_clock() {
  return [](std::size_t seq) {
    const auto secs = static_cast<std::time_t>(seq);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[40];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf);
  };
}

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string numbered(const std::vector<std::string>& items, std::string_view prefix) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += '\n';
    out += std::string(prefix) + std::to_string(i + 1) + ". " + items[i];
  }
  return out;
}

std::string task_phrase(std::string_view task) {
  if (task == "translate") return "translate it into English";
  if (task == "explain") return "explain its meaning";
  return std::string(task);
}

}  // namespace

std::string build_prompt(const PromptTask& task, const TemplateSet& templates) {
  return std::visit(
      [&](const auto& t) -> std::string {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, SentenceLong>) {
          return render_template(templates.get(TemplateKind::SentenceLong), {{"token", t.token}});
        } else if constexpr (std::is_same_v<T, SentenceSplit>) {
          if (t.segments.empty()) throw Error(Errc::WrongVariant, "split task without segments");
          return render_template(templates.get(TemplateKind::SentenceSplit),
                                 {{"segments", join(t.segments, kSegmentDelimiter)}});
        } else if constexpr (std::is_same_v<T, Translate>) {
          return render_template(templates.get(TemplateKind::Translate), {{"token", t.token}});
        } else if constexpr (std::is_same_v<T, Explain>) {
          return render_template(templates.get(TemplateKind::Explain), {{"token", t.token}});
        } else if constexpr (std::is_same_v<T, JudgeRank>) {
          if (t.sentences.size() < 2) throw Error(Errc::WrongVariant, "ranking needs >= 2 sentences");
          return render_template(templates.get(TemplateKind::JudgeRank),
                                 {{"count", std::to_string(t.sentences.size())},
                                  {"sentences", numbered(t.sentences, "")}});
        } else {
          return render_template(templates.get(TemplateKind::JudgeConsistency),
                                 {{"token", t.token},
                                  {"task", task_phrase(t.task)},
                                  {"count", std::to_string(t.outputs.size())},
                                  {"outputs", numbered(t.outputs, "Response ")}});
        }
      },
      task);
}

std::string build_sentence_prompt(const PromptTask& task, const TemplateSet& templates) {
  if (!std::holds_alternative<SentenceLong>(task) && !std::holds_alternative<SentenceSplit>(task)) {
    throw Error(Errc::WrongVariant, "not a sentence task");
  }
  return build_prompt(task, templates);
}

std::optional<std::vector<int>> parse_ranking(std::string_view response, std::size_t n) {
  static const std::regex run(R"(\d+(?:[ \t]*,[ \t]*\d+)+)");
  static const std::regex number(R"(\d+)");
  const std::string text(response);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), run); it != std::sregex_iterator();
       ++it) {
    const auto match = it->str();
    std::vector<int> values;
    for (auto nt = std::sregex_iterator(match.begin(), match.end(), number);
         nt != std::sregex_iterator(); ++nt) {
      const auto digits = nt->str();
      values.push_back(digits.size() > 3 ? 0 : std::stoi(digits));
    }
    if (values.size() != n) continue;
    std::vector<int> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    bool permutation = true;
    for (std::size_t i = 0; i < n; ++i) permutation &= sorted[i] == static_cast<int>(i + 1);
    if (permutation) return values;
  }
  return std::nullopt;
}

std::optional<std::pair<int, int>> parse_consistency_flags(std::string_view response) {
  static const std::regex consistent(R"(consistent\s*[=:]\s*([01])\b)", std::regex::icase);
  static const std::regex accurate(R"(accurate\s*[=:]\s*([01])\b)", std::regex::icase);
  const std::string text(response);
  std::smatch c, a;
  if (!std::regex_search(text, c, consistent) || !std::regex_search(text, a, accurate)) {
    return std::nullopt;
  }
  return std::pair{std::stoi(c[1].str()), std::stoi(a[1].str())};
}

namespace {

struct CallOutcome {
  std::optional<std::string> response;
  std::optional<std::string> error;
};

CallOutcome call_with_retry(Provider& provider, const ChatRequest& request, const RetryPolicy& retry) {
  std::string last_error;
  for (int attempt = 0; attempt < retry.attempts; ++attempt) {
    if (attempt > 0 && retry.base_delay.count() > 0) {
      std::this_thread::sleep_for(retry.base_delay * (1 << (attempt - 1)));
    }
    try {
      return {provider.complete(request), std::nullopt};
    } catch (const std::exception& e) {
      last_error = e.what();
    }
  }
  return {std::nullopt, "after " + std::to_string(retry.attempts) + " attempts: " + last_error};
}

ChatRequest user_request(const std::string& model, std::string prompt, double temperature) {
  return {model, {{"user", std::move(prompt)}}, temperature};
}

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path) {
    if (path.empty()) return;
    if (path.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(path.parent_path(), ec);
    }
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error(Errc::PersistError, "cannot open " + path.string());
    path_ = path;
  }

  void write(const nlohmann::ordered_json& j) {
    if (!out_.is_open()) return;
    out_ << j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace) << '\n';
    out_.flush();
    if (!out_) throw Error(Errc::PersistError, "write failed for " + path_.string());
  }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

// Runs work(i) for i in [0, n) on up to `workers` threads and hands results
// to `sink` in index order on the calling thread, which is the only writer.
template <class Record, class Work, class Sink>
std::vector<Record> run_ordered(std::size_t n, std::size_t workers, Work work, Sink sink) {
  std::vector<std::optional<Record>> slots(n);
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= n) return;
      try {
        auto record = work(i);
        std::lock_guard lock(mutex);
        slots[i] = std::move(record);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
      }
      ready.notify_all();
    }
  };

  std::vector<Record> out;
  out.reserve(n);
  {
    std::vector<std::jthread> threads;
    const auto count = std::min(workers, n);
    for (std::size_t k = 0; k < count; ++k) threads.emplace_back(worker);
    try {
      for (std::size_t i = 0; i < n; ++i) {
        std::unique_lock lock(mutex);
        ready.wait(lock, [&] { return slots[i].has_value() || failure; });
        if (!slots[i]) std::rethrow_exception(failure);
        out.push_back(std::move(*slots[i]));
        lock.unlock();
        sink(out.back());
      }
    } catch (...) {
      next.store(n);
      throw;
    }
  }
  return out;
}

struct GenerationTask {
  Rank token_rank;
  std::string variant;
  std::string model;
  int repetition;
  std::string token;
  std::vector<std::string> segments;
  PromptTask prompt_task;
  double temperature;
};

std::vector<GenerationRecord> execute(const std::vector<GenerationTask>& tasks,
                                      const ExperimentConfig& cfg, Provider& provider,
                                      const HarnessContext& ctx) {
  JsonlWriter writer(cfg.output_path);
  return run_ordered<GenerationRecord>(
      tasks.size(), cfg.max_concurrency,
      [&](std::size_t i) {
        const auto& t = tasks[i];
        GenerationRecord r;
        r.record_id = stable_hash(t.variant + "|" + std::to_string(t.token_rank) + "|" + t.model +
                                  "|" + std::to_string(t.repetition) + "|" +
                                  std::to_string(cfg.seed));
        r.token_rank = t.token_rank;
        r.variant = t.variant;
        r.model = t.model;
        r.repetition = t.repetition;
        r.token = t.token;
        r.segments = t.segments;
        r.prompt = build_prompt(t.prompt_task, ctx.templates);
        const auto outcome =
            call_with_retry(provider, user_request(t.model, r.prompt, t.temperature), cfg.retry);
        r.response = outcome.response;
        r.error = outcome.error;
        r.timestamp = ctx.clock(i);
        return r;
      },
      [&](const GenerationRecord& r) {
        writer.write(to_json(r));
        if (ctx.log) ctx.log(r.record_id + " " + r.variant + " " + r.model + " token " +
                             std::to_string(r.token_rank) + (r.error ? " ERROR" : ""));
      });
}

}  // namespace

std::vector<GenerationRecord> run_generation(const TokenSample& sample,
                                             const FrequencyDictionary& dict,
                                             const ExperimentConfig& cfg, Provider& provider,
                                             const HarnessContext& ctx) {
  cfg.validate();
  std::vector<GenerationTask> tasks;
  for (const auto& entry : sample.entries) {
    auto segments = segment(entry.text, dict).segments;
    for (const auto& model : cfg.models) {
      tasks.push_back({entry.rank, "sentence_long", model, 0, entry.text, {},
                       SentenceLong{entry.text}, cfg.temperature});
      tasks.push_back({entry.rank, "sentence_split", model, 0, entry.text, segments,
                       SentenceSplit{segments}, cfg.temperature});
    }
  }
  return execute(tasks, cfg, provider, ctx);
}

std::vector<GenerationRecord> run_consistency(const TokenSample& sample,
                                              const ExperimentConfig& cfg, Provider& provider,
                                              const HarnessContext& ctx) {
  cfg.validate();
  if (cfg.temperature != 0.0) {
    throw Error(Errc::NonZeroTemperature, "consistency runs require temperature 0, got " +
                                              std::to_string(cfg.temperature));
  }
  const auto& model = cfg.subject_model();
  std::vector<GenerationTask> tasks;
  for (const auto& entry : sample.entries) {
    for (int rep = 0; rep < cfg.repetitions_consistency; ++rep) {
      tasks.push_back({entry.rank, "translate", model, rep, entry.text, {}, Translate{entry.text}, 0.0});
    }
    for (int rep = 0; rep < cfg.repetitions_consistency; ++rep) {
      tasks.push_back({entry.rank, "explain", model, rep, entry.text, {}, Explain{entry.text}, 0.0});
    }
  }
  return execute(tasks, cfg, provider, ctx);
}

std::vector<JudgeRecord> run_judge(const std::vector<GenerationRecord>& records,
                                   const std::string& judge_model, Provider& provider,
                                   JudgeMode mode, const ExperimentConfig& cfg,
                                   const HarnessContext& ctx) {
  struct Group {
    Rank token_rank;
    std::string task;
    std::string token;
    std::vector<std::pair<std::string, const GenerationRecord*>> members;
  };
  std::vector<Group> groups;
  std::map<std::pair<Rank, std::string>, std::size_t> index;
  for (const auto& r : records) {
    std::string task;
    std::string member;
    if (mode == JudgeMode::Rank) {
      const auto v = parse_variant(r.variant);
      if (!v || (r.variant != "sentence_long" && r.variant != "sentence_split")) continue;
      task = "sentence";
      member = cfg.label(r.model) + (*v == Variant::Long ? "-L" : "-S");
    } else {
      if (r.variant != "translate" && r.variant != "explain") continue;
      task = r.variant;
      member = r.record_id;
    }
    const auto key = std::pair{r.token_rank, task};
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.push_back({r.token_rank, task, r.token, {}});
    groups[it->second].members.emplace_back(member, &r);
  }
  for (auto& g : groups) {
    if (mode == JudgeMode::Rank) {
      std::sort(g.members.begin(), g.members.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
    } else {
      std::stable_sort(g.members.begin(), g.members.end(), [](const auto& a, const auto& b) {
        return a.second->repetition < b.second->repetition;
      });
    }
  }

  JsonlWriter writer(cfg.output_path);
  return run_ordered<JudgeRecord>(
      groups.size(), cfg.max_concurrency,
      [&](std::size_t i) {
        const auto& g = groups[i];
        JudgeRecord j;
        j.record_id = stable_hash("judge|" + std::string(to_string(mode)) + "|" + g.task + "|" +
                                  std::to_string(g.token_rank) + "|" + judge_model + "|" +
                                  std::to_string(cfg.seed) + "|" + ctx.templates.version);
        j.token_rank = g.token_rank;
        j.mode = mode;
        j.task = g.task;
        j.judge_model = judge_model;
        j.template_version = ctx.templates.version;
        j.timestamp = ctx.clock(i);
        std::vector<std::string> texts;
        std::set<std::string> seen;
        for (const auto& [member, rec] : g.members) {
          j.members.push_back(member);
          if (!seen.insert(member).second) j.error = "duplicate member " + member;
          if (!rec->response) j.error = "member " + member + " has no response";
          else texts.push_back(*rec->response);
        }
        if (mode == JudgeMode::Rank && g.members.size() < 2) j.error = "fewer than 2 sentences";
        if (j.error) return j;

        const PromptTask task = mode == JudgeMode::Rank
                                    ? PromptTask{JudgeRank{texts}}
                                    : PromptTask{JudgeConsistency{g.token, g.task, texts}};
        j.prompt = build_prompt(task, ctx.templates);
        const auto outcome = call_with_retry(provider, user_request(judge_model, j.prompt, 0.0), cfg.retry);
        if (!outcome.response) {
          j.error = outcome.error;
          return j;
        }
        j.response = outcome.response;
        if (mode == JudgeMode::Rank) {
          j.ranking = parse_ranking(*j.response, j.members.size());
          if (!j.ranking) j.error = "MalformedJudgeOutput: no permutation of 1.." +
                                    std::to_string(j.members.size());
        } else {
          const auto flags = parse_consistency_flags(*j.response);
          if (flags) {
            j.consistent = flags->first;
            j.accurate = flags->second;
          } else {
            j.error = "MalformedJudgeOutput: missing consistent=/accurate= flags";
          }
        }
        return j;
      },
      [&](const JudgeRecord& j) {
        writer.write(to_json(j));
        if (ctx.log) ctx.log(j.record_id + " judge " + j.task + " token " +
                             std::to_string(j.token_rank) + (j.error ? " ERROR" : ""));
      });
}

}  // namespace tokbias
