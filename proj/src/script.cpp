#include "tokbias/script.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include <json.hpp>

#include "tokbias/error.hpp"
#include "tokbias/utf8.hpp"

namespace tokbias {

std::string_view to_string(ScriptClass cls) noexcept {
  switch (cls) {
    case ScriptClass::Han: return "han";
    case ScriptClass::Latin: return "latin";
    case ScriptClass::Mixed: return "mixed";
    case ScriptClass::NonText: return "nontext";
    case ScriptClass::Other: return "other";
  }
  return "other";
}

std::optional<ScriptClass> parse_script_class(std::string_view name) noexcept {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto cls : {ScriptClass::Han, ScriptClass::Latin, ScriptClass::Mixed,
                         ScriptClass::NonText, ScriptClass::Other}) {
    if (lower == to_string(cls)) return cls;
  }
  return std::nullopt;
}

std::optional<LengthRule> parse_length_rule(std::string_view name) {
  if (name == "strict") return LengthRule::strict();
  if (name == "raw") return LengthRule::raw();
  return std::nullopt;
}

namespace {

enum class CharKind { Han, Latin, Other };

CharKind kind_of(char32_t cp) noexcept {
  if (is_han(cp)) return CharKind::Han;
  if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z')) return CharKind::Latin;
  return CharKind::Other;
}

struct Stripped {
  std::string_view text;
  bool stripped = false;
};

Stripped strip(std::string_view text, const LengthRule& rule) {
  if (!text.empty() && rule.strippable.find(text.front()) != std::string::npos) {
    return {text.substr(1), true};
  }
  return {text, false};
}

}  // namespace

ScriptClass classify_text(std::string_view text, const LengthRule& rule) {
  if (!utf8::is_valid(text)) return ScriptClass::NonText;
  const auto body = strip(text, rule).text;
  if (body.empty()) return ScriptClass::Other;
  bool han = false, latin = false, other = false;
  for (const auto cp : utf8::code_points(body)) {
    switch (kind_of(cp)) {
      case CharKind::Han: han = true; break;
      case CharKind::Latin: latin = true; break;
      case CharKind::Other: other = true; break;
    }
  }
  const int kinds = int{han} + int{latin} + int{other};
  if (kinds > 1) return ScriptClass::Mixed;
  if (han) return ScriptClass::Han;
  if (latin) return ScriptClass::Latin;
  return ScriptClass::Other;
}

ScriptClass classify_token(const TokenRecord& record, const LengthRule& rule) {
  if (!record.text()) return ScriptClass::NonText;
  return classify_text(*record.text(), rule);
}

std::optional<std::string_view> stripped_text(const TokenRecord& record, const LengthRule& rule) {
  const auto text = record.text();
  if (!text) return std::nullopt;
  return strip(*text, rule).text;
}

std::optional<std::size_t> effective_char_length(const TokenRecord& record,
                                                 const LengthRule& rule) {
  const auto text = record.text();
  if (!text) return std::nullopt;
  const auto s = strip(*text, rule);
  auto len = *utf8::char_count(s.text);
  if (s.stripped && rule.count_stripped) ++len;
  return len;
}

std::size_t LengthHistogram::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0},
                         [](std::size_t acc, const auto& kv) { return acc + kv.second; });
}

std::size_t LengthHistogram::max_length() const noexcept {
  return counts.empty() ? 0 : counts.rbegin()->first;
}

std::size_t LengthHistogram::at(std::size_t length) const noexcept {
  const auto it = counts.find(length);
  return it == counts.end() ? 0 : it->second;
}

LengthHistogram build_length_histogram(const Vocabulary& vocab, ScriptClass cls,
                                       std::size_t min_len, const LengthRule& rule) {
  if (min_len < 1) throw Error(Errc::InvalidConfig, "min_len must be >= 1");
  LengthHistogram hist;
  hist.filter_description = std::string("class=") + std::string(to_string(cls)) +
                            " min_len=" + std::to_string(min_len) + " strip='" +
                            rule.strippable + "'" + (rule.count_stripped ? " count_stripped" : "");
  for (const auto& rec : vocab.records()) {
    if (classify_token(rec, rule) != cls) continue;
    const auto len = effective_char_length(rec, rule);
    if (len && *len >= min_len) ++hist.counts[*len];
  }
  return hist;
}

std::map<ScriptClass, std::size_t> count_classes(const Vocabulary& vocab, const LengthRule& rule) {
  std::map<ScriptClass, std::size_t> out;
  for (const auto& rec : vocab.records()) ++out[classify_token(rec, rule)];
  return out;
}

std::string histogram_to_csv(const LengthHistogram& hist) {
  std::string out = "length,count\n";
  for (const auto& [len, n] : hist.counts) {
    out += std::to_string(len) + "," + std::to_string(n) + "\n";
  }
  return out;
}

std::string histogram_to_json(const LengthHistogram& hist) {
  nlohmann::ordered_json j;
  j["filter"] = hist.filter_description;
  auto& counts = j["counts"] = nlohmann::ordered_json::object();
  for (const auto& [len, n] : hist.counts) counts[std::to_string(len)] = n;
  return j.dump();
}

}  // namespace tokbias
