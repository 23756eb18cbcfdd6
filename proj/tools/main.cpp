// tokbias command-line tool. Exit 0 on success, 1 on domain errors, 2 on
// usage errors.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tokbias/bpe.hpp"
#include "tokbias/error.hpp"
#include "tokbias/harness.hpp"
#include "tokbias/metrics.hpp"
#include "tokbias/provider.hpp"
#include "tokbias/records.hpp"
#include "tokbias/report.hpp"
#include "tokbias/sampler.hpp"
#include "tokbias/script.hpp"
#include "tokbias/segmenter.hpp"
#include "tokbias/vocab.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using namespace tokbias;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path data_root() {
  if (const char* env = std::getenv("TOKBIAS_DATA_DIR"); env && *env) return env;
  return TOKBIAS_DEFAULT_DATA_DIR;
}

// Accepts a path, or a bare name looked up under the shipped data
// directory ("o200k.json" finds profiles/o200k_base.json).
fs::path resolve_data_file(const std::string& arg, const std::string& subdir) {
  const fs::path given(arg);
  if (fs::exists(given)) return given;
  const auto dir = data_root() / subdir;
  const auto stem = given.stem().string();
  for (const auto& candidate : {dir / given.filename(), dir / (stem + ".json"), dir / (stem + "_base.json")}) {
    if (fs::exists(candidate)) return candidate;
  }
  throw Error(Errc::Io, "no such file: " + arg);
}

std::optional<fs::path> rank_dir_for(const std::string& flag) {
  if (!flag.empty()) return fs::path(flag);
  if (const char* env = std::getenv("TOKBIAS_RANK_DIR"); env && *env) return fs::path(env);
  const fs::path built = TOKBIAS_DEFAULT_RANK_DIR;
  if (!built.empty() && fs::exists(built)) return built;
  return std::nullopt;
}

struct Loaded {
  VocabularyProfile profile;
  Vocabulary vocab;
};

Loaded load_vocabulary(const std::string& profile_arg, const std::string& rank_dir) {
  const auto path = resolve_data_file(profile_arg, "profiles");
  auto profile = load_profile(path, rank_dir_for(rank_dir));
  if (!fs::exists(profile.rank_file_path)) {
    // Fall back to a rank file next to the profile.
    const auto local = path.parent_path() / profile.rank_file_path.filename();
    if (fs::exists(local)) profile.rank_file_path = local;
  }
  auto vocab = load_rank_file(profile.rank_file_path, profile.name);
  return {std::move(profile), std::move(vocab)};
}

LengthRule length_rule(const std::string& name) {
  const auto rule = parse_length_rule(name);
  if (!rule) throw UsageError("unknown length rule: " + name);
  return *rule;
}

ScriptClass script_class(const std::string& name) {
  const auto cls = parse_script_class(name);
  if (!cls) throw UsageError("unknown script class: " + name);
  return *cls;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ojson histogram_json(const LengthHistogram& h) {
  ojson counts = ojson::object();
  for (const auto& [len, n] : h.counts) counts[std::to_string(len)] = n;
  return {{"filter", h.filter_description}, {"total", h.total()}, {"counts", counts}};
}

// ---- audit -----------------------------------------------------------------

struct AuditArgs {
  std::string profile, rank_dir, script = "han", rule = "strict";
  std::size_t min_len = 2;
  bool skip_merge_checks = false;
};

int cmd_audit(const AuditArgs& a, bool json_mode) {
  const auto loaded = load_vocabulary(a.profile, a.rank_dir);
  const auto& vocab = loaded.vocab;
  const auto rule = length_rule(a.rule);
  Rank max_rank = 0;
  for (const auto& rec : vocab.records()) max_rank = std::max(max_rank, rec.rank());

  ojson classes = ojson::object();
  for (const auto& [cls, n] : count_classes(vocab, rule)) classes[std::string(to_string(cls))] = n;
  const auto hist = build_length_histogram(vocab, script_class(a.script), a.min_len, rule);

  ojson out;
  out["profile"] = loaded.profile.name;
  out["vocab_size"] = vocab.size();
  out["max_rank"] = max_rank;
  out["length_rule"] = a.rule;
  out["classes"] = classes;
  out["histogram"] = histogram_json(hist);
  if (!a.skip_merge_checks) {
    out["merge_unreachable"] = find_merge_unreachable(vocab).size();
    out["strict_divergent"] = find_strict_divergent(vocab).size();
  }
  std::cout << out.dump(2) << "\n";
  if (json_mode) {
    std::cerr << loaded.profile.name << ": " << vocab.size() << " tokens, " << hist.total() << " "
              << a.script << " tokens of length >= " << a.min_len << "\n";
  }
  return 0;
}

// ---- sample ----------------------------------------------------------------

struct SampleArgs {
  std::string profile, rank_dir, script = "han", rule = "strict", out;
  std::size_t min_len = 2, cap = 20;
  std::uint64_t seed = 1;
};

int cmd_sample(const SampleArgs& a) {
  const auto loaded = load_vocabulary(a.profile, a.rank_dir);
  const auto rule = length_rule(a.rule);
  const auto cls = script_class(a.script);
  const auto hist = build_length_histogram(loaded.vocab, cls, a.min_len, rule);
  const auto plan = plan_sample(hist, a.cap);
  const auto cands = collect_candidates(loaded.vocab, cls, a.min_len, rule);
  auto sample = draw_sample(cands, plan, a.seed);
  attach_texts(sample, loaded.vocab, rule);
  const auto text = sample_to_json(sample, plan);
  if (!a.out.empty()) {
    write_text_file(a.out, text + "\n");
    std::cerr << "wrote " << sample.entries.size() << " tokens to " << a.out << "\n";
  }
  std::cout << text << "\n";
  return 0;
}

// ---- segment ---------------------------------------------------------------

struct SegmentArgs {
  std::string text, profile, rank_dir, dict = "fixture.dict";
  std::optional<Rank> rank;
};

int cmd_segment(const SegmentArgs& a, bool json_mode) {
  std::string text = a.text;
  if (a.rank) {
    if (a.profile.empty()) throw UsageError("--rank needs --profile");
    const auto loaded = load_vocabulary(a.profile, a.rank_dir);
    const auto stripped = stripped_text(loaded.vocab.at(*a.rank), LengthRule::strict());
    if (!stripped) throw Error(Errc::InvalidUtf8, "token " + std::to_string(*a.rank) + " is not text");
    text = std::string(*stripped);
  }
  const auto dict = load_dictionary(resolve_data_file(a.dict, "dict"));
  const auto result = segment(text, dict);
  if (json_mode) {
    std::cout << ojson{{"text", text}, {"segments", result.segments}, {"log_prob", result.log_prob}}.dump() << "\n";
  } else {
    for (std::size_t i = 0; i < result.segments.size(); ++i) std::cout << (i ? " " : "") << result.segments[i];
    std::cout << "\n";
  }
  return 0;
}

// ---- run -------------------------------------------------------------------

struct RunArgs {
  std::string config, out;
  bool mock = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> concurrency;
};

int cmd_run(const RunArgs& a, bool json_mode) {
  const fs::path config_path(a.config);
  ojson c;
  try {
    c = ojson::parse(read_text(config_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, config_path.string() + ": " + e.what());
  }
  const auto base = config_path.parent_path();
  const auto rel = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  ExperimentConfig cfg;
  fs::path out_dir;
  TokenSample sample;
  std::optional<FrequencyDictionary> dict;
  HarnessContext ctx;
  std::string judge_model;
  HttpProviderOptions http;
  bool mock = a.mock;
  try {
    cfg.models = c.at("models").get<std::vector<std::string>>();
    cfg.labels = c.value("labels", std::map<std::string, std::string>{});
    if (c.contains("consistency_model")) cfg.consistency_model = c.at("consistency_model").get<std::string>();
    cfg.repetitions_consistency = c.value("repetitions_consistency", cfg.repetitions_consistency);
    cfg.temperature = c.value("temperature", cfg.temperature);
    cfg.seed = a.seed.value_or(c.value("seed", cfg.seed));
    cfg.max_concurrency = a.concurrency.value_or(c.value("max_concurrency", cfg.max_concurrency));
    if (c.contains("retry")) {
      cfg.retry.attempts = c["retry"].value("attempts", cfg.retry.attempts);
      cfg.retry.base_delay = std::chrono::milliseconds(c["retry"].value("base_delay_ms", 500));
    }
    out_dir = a.out.empty() ? rel(c.value("output_dir", std::string("out"))) : fs::path(a.out);
    sample = load_sample(rel(c.at("sample").get<std::string>()));
    dict = load_dictionary(c.contains("dict") ? rel(c.at("dict").get<std::string>())
                                              : resolve_data_file("fixture.dict", "dict"));
    if (c.contains("templates")) ctx.templates = TemplateSet::load(rel(c.at("templates").get<std::string>()));
    judge_model = c.value("judge_model", std::string{});
    mock = mock || c.value("mock", false);
    if (c.contains("provider")) {
      const auto& p = c.at("provider");
      http.base_url = p.value("base_url", http.base_url);
      http.path = p.value("path", http.path);
      http.api_key_env = p.value("api_key_env", http.api_key_env);
      http.timeout_seconds = p.value("timeout_seconds", http.timeout_seconds);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, config_path.string() + ": " + e.what());
  }
  cfg.validate();

  // Mock runs get a fixed clock so the record files are reproducible.
  if (mock) ctx.clock = logical_clock();
  ctx.log = [](std::string_view line) { std::cerr << line << "\n"; };

  std::unique_ptr<Provider> provider;
  std::unique_ptr<Provider> judge;
  if (mock) {
    provider = std::make_unique<MockProvider>(cfg.seed);
    auto mj = std::make_unique<MockProvider>(cfg.seed + 1);
    mj->add_rule({"", "Rank them", "1,2,3,4"});
    mj->add_rule({"", "consistent=<0 or 1>", "consistent=1, accurate=1"});
    judge = std::move(mj);
  } else {
    provider = std::make_unique<OpenAICompatibleProvider>(http);
    judge = std::make_unique<OpenAICompatibleProvider>(http);
  }

  fs::create_directories(out_dir);
  ojson summary;
  cfg.output_path = out_dir / "generations.jsonl";
  const auto gen = run_generation(sample, *dict, cfg, *provider, ctx);
  summary["generations"] = {{"file", cfg.output_path.string()}, {"records", gen.size()}};
  cfg.output_path = out_dir / "consistency.jsonl";
  const auto cons = run_consistency(sample, cfg, *provider, ctx);
  summary["consistency"] = {{"file", cfg.output_path.string()}, {"records", cons.size()}};
  if (!judge_model.empty()) {
    cfg.output_path = out_dir / "judge_rank.jsonl";
    const auto jr = run_judge(gen, judge_model, *judge, JudgeMode::Rank, cfg, ctx);
    summary["judge_rank"] = {{"file", cfg.output_path.string()}, {"records", jr.size()}};
    cfg.output_path = out_dir / "judge_consistency.jsonl";
    const auto jc = run_judge(cons, judge_model, *judge, JudgeMode::Consistency, cfg, ctx);
    summary["judge_consistency"] = {{"file", cfg.output_path.string()}, {"records", jc.size()}};
  }
  std::size_t errors = 0;
  for (const auto* set : {&gen, &cons}) {
    for (const auto& r : *set) errors += r.error ? 1 : 0;
  }
  summary["errored_records"] = errors;
  if (json_mode) {
    std::cout << summary.dump(2) << "\n";
  } else {
    std::cout << gen.size() << " generation records, " << cons.size() << " consistency records, " << errors
              << " errored; written to " << out_dir.string() << "\n";
  }
  return 0;
}

// ---- score -----------------------------------------------------------------

struct ScoreArgs {
  std::string fixtures, sample, out;
  std::vector<std::string> generations, judgments, scores, rankings;
  std::vector<std::string> labels;
};

int cmd_score(const ScoreArgs& a) {
  MetricsInputs in;
  if (!a.fixtures.empty()) in = load_metrics_inputs(a.fixtures);
  const auto append = [](auto& dst, const auto& src) { dst.insert(dst.end(), src.begin(), src.end()); };
  for (const auto& p : a.generations) append(in.generations, load_generations(p));
  for (const auto& p : a.judgments) append(in.judgments, load_judgments(p));
  for (const auto& p : a.scores) append(in.scores, load_scores(p));
  for (const auto& p : a.rankings) append(in.rankings, load_rankings(p));
  for (const auto& l : a.labels) {
    const auto eq = l.find('=');
    if (eq == std::string::npos) throw UsageError("--label expects MODEL=LABEL, got " + l);
    in.labels[l.substr(0, eq)] = l.substr(eq + 1);
  }
  if (!a.sample.empty()) {
    const auto text = read_text(a.sample);
    const auto sample = sample_from_json(text);
    for (const auto& e : sample.entries) in.lengths[e.rank] = e.length;
    const auto j = nlohmann::json::parse(text);
    if (j.is_object() && j.contains("plan")) {
      SamplePlan plan;
      plan.cap = j["plan"].value("cap", std::size_t{0});
      plan.total = j["plan"].value("total", std::size_t{0});
      for (const auto& [len, n] : j["plan"]["per_length"].items()) plan.per_length[std::stoul(len)] = n;
      in.sample_plan = plan;
    }
  }
  const auto text = report_to_json(compute_metrics(in));
  if (!a.out.empty()) write_text_file(a.out, text + "\n");
  std::cout << text << "\n";
  return 0;
}

// ---- report ----------------------------------------------------------------

struct ReportArgs {
  std::string metrics, format = "markdown", out_dir;
};

int cmd_report(const ReportArgs& a, bool json_mode) {
  const auto format = parse_report_format(a.format);
  if (!format) throw UsageError("unknown format: " + a.format);
  const auto report = report_from_json(read_text(a.metrics));
  const auto docs = render_report(report, *format);
  if (!a.out_dir.empty()) {
    for (const auto& [name, body] : docs) write_text_file(fs::path(a.out_dir) / name, body);
    if (json_mode) {
      ojson files = ojson::array();
      for (const auto& [name, body] : docs) files.push_back((fs::path(a.out_dir) / name).string());
      std::cout << ojson{{"files", files}}.dump() << "\n";
    } else {
      for (const auto& [name, body] : docs) std::cout << (fs::path(a.out_dir) / name).string() << "\n";
    }
    return 0;
  }
  if (json_mode && *format != ReportFormat::Json) {
    ojson files = ojson::object();
    for (const auto& [name, body] : docs) files[name] = body;
    std::cout << files.dump(2) << "\n";
    return 0;
  }
  for (const auto& [name, body] : docs) {
    if (docs.size() > 1) std::cout << "# " << name << "\n";
    std::cout << body;
    if (!body.empty() && body.back() != '\n') std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tokenizer vocabulary audit toolkit"};
  app.require_subcommand(1);
  bool json_mode = false;
  app.add_flag("--json", json_mode, "Machine-readable standard output; messages go to stderr");

  AuditArgs audit;
  auto* audit_cmd = app.add_subcommand("audit", "Vocabulary size, script classes and length histogram");
  audit_cmd->add_option("--profile", audit.profile, "Profile JSON or shipped profile name")->required();
  audit_cmd->add_option("--rank-dir", audit.rank_dir, "Directory with .tiktoken rank files");
  audit_cmd->add_option("--script", audit.script, "Script class for the histogram");
  audit_cmd->add_option("--min-len", audit.min_len, "Minimum character length");
  audit_cmd->add_option("--length-rule", audit.rule, "strict or raw");
  audit_cmd->add_flag("--skip-merge-checks", audit.skip_merge_checks, "Skip the merge reachability scans");

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Length-capped random token sample");
  sample_cmd->add_option("--profile", sample.profile, "Profile JSON or shipped profile name")->required();
  sample_cmd->add_option("--rank-dir", sample.rank_dir, "Directory with .tiktoken rank files");
  sample_cmd->add_option("--script", sample.script, "Script class");
  sample_cmd->add_option("--min-len", sample.min_len, "Minimum character length");
  sample_cmd->add_option("--cap", sample.cap, "Tokens per length");
  sample_cmd->add_option("--seed", sample.seed, "Sampling seed");
  sample_cmd->add_option("--length-rule", sample.rule, "strict or raw");
  sample_cmd->add_option("--out", sample.out, "Also write the sample to this file");

  SegmentArgs seg;
  Rank seg_rank = 0;
  auto* seg_cmd = app.add_subcommand("segment", "Dictionary segmentation of a text or vocabulary token");
  auto* text_opt = seg_cmd->add_option("--text", seg.text, "Text to segment");
  auto* rank_opt = seg_cmd->add_option("--rank", seg_rank, "Token rank to decode and segment");
  text_opt->excludes(rank_opt);
  seg_cmd->add_option("--profile", seg.profile, "Profile for --rank");
  seg_cmd->add_option("--rank-dir", seg.rank_dir, "Directory with .tiktoken rank files");
  seg_cmd->add_option("--dict", seg.dict, "Frequency dictionary");

  RunArgs run;
  std::uint64_t run_seed = 0;
  std::size_t run_conc = 0;
  auto* run_cmd = app.add_subcommand("run", "Run the generation and consistency experiments");
  run_cmd->add_option("--config", run.config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_flag("--mock", run.mock, "Use the deterministic offline provider");
  run_cmd->add_option("--out", run.out, "Output directory (overrides config)");
  auto* run_seed_opt = run_cmd->add_option("--seed", run_seed, "Seed (overrides config)");
  auto* run_conc_opt = run_cmd->add_option("--concurrency", run_conc, "Max parallel requests")->check(CLI::PositiveNumber);

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Compute metrics from record files");
  score_cmd->add_option("--fixtures", score.fixtures, "Fixture directory with manifest.json")
      ->check(CLI::ExistingDirectory);
  score_cmd->add_option("--generations", score.generations, "Generation JSONL files");
  score_cmd->add_option("--judgments", score.judgments, "Judge JSONL files");
  score_cmd->add_option("--scores", score.scores, "Score JSONL files");
  score_cmd->add_option("--rankings", score.rankings, "Ranking JSONL files");
  score_cmd->add_option("--sample", score.sample, "Sample JSON for token lengths and plan");
  score_cmd->add_option("--label", score.labels, "Series label, MODEL=LABEL");
  score_cmd->add_option("--out", score.out, "Also write the metrics JSON here");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Render a metrics JSON file");
  report_cmd->add_option("--metrics", report.metrics, "Metrics JSON from `score`")->required();
  report_cmd->add_option("--format", report.format, "json, csv or markdown");
  report_cmd->add_option("--out-dir", report.out_dir, "Write files here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const auto code = app.exit(e, std::cout, std::cerr);
    return e.get_exit_code() == 0 ? code : 2;
  }

  try {
    if (*audit_cmd) return cmd_audit(audit, json_mode);
    if (*sample_cmd) return cmd_sample(sample);
    if (*seg_cmd) {
      if (!*text_opt && !*rank_opt) throw UsageError("segment needs --text or --rank");
      if (*rank_opt) seg.rank = seg_rank;
      return cmd_segment(seg, json_mode);
    }
    if (*run_cmd) {
      if (*run_seed_opt) run.seed = run_seed;
      if (*run_conc_opt) run.concurrency = run_conc;
      return cmd_run(run, json_mode);
    }
    if (*score_cmd) return cmd_score(score);
    if (*report_cmd) return cmd_report(report, json_mode);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
