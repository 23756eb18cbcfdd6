#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace tokbias {

enum class TemplateKind { SentenceLong, SentenceSplit, Translate, Explain, JudgeRank, JudgeConsistency };

std::string_view to_string(TemplateKind kind) noexcept;

/// Versioned prompt templates. Placeholders are `{name}`; `{{` and `}}`
/// produce literal braces.
struct TemplateSet {
  std::string version;
  std::map<TemplateKind, std::string> templates;

  const std::string& get(TemplateKind kind) const;

  /// Compiled-in defaults, version "builtin-1".
  static TemplateSet builtin();

  /// Directory with `manifest.json` ({"version": ..., "<kind>": "<file>"})
  /// plus the referenced UTF-8 files. Kinds missing from the manifest fall
  /// back to the builtin text. Throws Io, InvalidConfig.
  static TemplateSet load(const std::filesystem::path& dir);
};

/// Substitutes `{name}` placeholders. Throws InvalidConfig on unknown or
/// unterminated placeholders.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars);

/// Separator between segments in prompts, matching the `微信; 公众; ...` display.
inline constexpr std::string_view kSegmentDelimiter = "; ";

}  // namespace tokbias
