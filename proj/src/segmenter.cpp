#include "tokbias/segmenter.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tokbias/error.hpp"
#include "tokbias/utf8.hpp"

namespace tokbias {

void FrequencyDictionary::add(std::string_view word, std::uint64_t freq) {
  if (freq == 0) throw Error(Errc::ZeroFrequency, std::string(word));
  auto it = entries_.find(word);
  if (it == entries_.end()) {
    entries_.emplace(std::string(word), freq);
    const auto chars = utf8::split_chars(word);
    std::size_t end = 0;
    for (const auto ch : chars) {
      end += ch.size();
      prefixes_.emplace(word.substr(0, end));
    }
  } else {
    it->second += freq;
  }
  total_ += freq;
}

std::uint64_t FrequencyDictionary::frequency(std::string_view word) const noexcept {
  const auto it = entries_.find(word);
  return it == entries_.end() ? 0 : it->second;
}

bool FrequencyDictionary::is_prefix(std::string_view s) const noexcept {
  return prefixes_.find(s) != prefixes_.end();
}

FrequencyDictionary parse_dictionary(std::string_view contents) {
  FrequencyDictionary dict;
  std::size_t line_no = 0;
  while (!contents.empty()) {
    const auto eol = contents.find('\n');
    auto line = contents.substr(0, eol);
    contents = eol == std::string_view::npos ? std::string_view{} : contents.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    for (std::size_t pos = 0; pos <= line.size();) {
      const auto sp = line.find(' ', pos);
      const auto field = line.substr(pos, sp == std::string_view::npos ? line.npos : sp - pos);
      if (!field.empty()) fields.push_back(field);
      if (sp == std::string_view::npos) break;
      pos = sp + 1;
    }
    const auto where = "line " + std::to_string(line_no);
    if (fields.size() < 2 || fields.size() > 3) {
      throw Error(Errc::MalformedLine, where + ": expected `word frequency [tag]`");
    }
    if (!utf8::is_valid(fields[0])) throw Error(Errc::MalformedLine, where + ": word is not UTF-8");
    std::uint64_t freq = 0;
    const auto f = fields[1];
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), freq);
    if (ec != std::errc{} || ptr != f.data() + f.size()) {
      throw Error(Errc::MalformedLine, where + ": frequency is not a non-negative integer");
    }
    if (freq == 0) throw Error(Errc::ZeroFrequency, where + ": " + std::string(fields[0]));
    dict.add(fields[0], freq);
  }
  return dict;
}

FrequencyDictionary load_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open dictionary " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dictionary(ss.str());
}

namespace {

// Byte offset of every character boundary, including the end.
std::vector<std::size_t> char_offsets(std::string_view text) {
  std::vector<std::size_t> offsets{0};
  for (const auto ch : utf8::split_chars(text)) offsets.push_back(offsets.back() + ch.size());
  return offsets;
}

SegmentDag dag_from_offsets(std::string_view text, const std::vector<std::size_t>& offsets,
                            const FrequencyDictionary& dict) {
  SegmentDag dag;
  const auto n = offsets.size() - 1;
  for (std::size_t k = 0; k < n; ++k) {
    auto& ends = dag[k];
    ends.push_back(k + 1);
    for (std::size_t e = k + 1; e <= n; ++e) {
      const auto frag = text.substr(offsets[k], offsets[e] - offsets[k]);
      if (!dict.is_prefix(frag)) break;
      if (e > k + 1 && dict.contains(frag)) ends.push_back(e);
    }
  }
  return dag;
}

}  // namespace

SegmentDag build_dag(std::string_view text, const FrequencyDictionary& dict) {
  if (!utf8::is_valid(text)) throw Error(Errc::InvalidUtf8, "segment input");
  return dag_from_offsets(text, char_offsets(text), dict);
}

double segment_log_prob(std::string_view word, const FrequencyDictionary& dict) {
  const auto freq = dict.frequency(word);
  const auto total = std::max<std::uint64_t>(dict.total(), 1);
  return std::log(static_cast<double>(freq == 0 ? 1 : freq)) - std::log(static_cast<double>(total));
}

SegmentationResult segment(std::string_view text, const FrequencyDictionary& dict) {
  SegmentationResult result;
  if (text.empty()) return result;
  if (!utf8::is_valid(text)) throw Error(Errc::InvalidUtf8, "segment input");
  const auto offsets = char_offsets(text);
  const auto n = offsets.size() - 1;
  const auto dag = dag_from_offsets(text, offsets, dict);

  std::vector<double> best(n + 1, 0.0);
  std::vector<std::size_t> choice(n, 0);
  for (std::size_t k = n; k-- > 0;) {
    bool first = true;
    for (const auto e : dag.at(k)) {
      const auto word = text.substr(offsets[k], offsets[e] - offsets[k]);
      const double score = segment_log_prob(word, dict) + best[e];
      // Ends are ascending, so `>=` keeps the longest among equal scores.
      if (first || score >= best[k]) {
        best[k] = score;
        choice[k] = e;
        first = false;
      }
    }
  }
  result.log_prob = best[0];
  for (std::size_t k = 0; k < n; k = choice[k]) {
    result.segments.emplace_back(text.substr(offsets[k], offsets[choice[k]] - offsets[k]));
  }
  return result;
}

}  // namespace tokbias
