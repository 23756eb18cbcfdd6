#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tokbias {

enum class Errc {
  Io,
  MalformedLine,
  DuplicateRank,
  DuplicateBytes,
  UnknownRank,
  InvalidProfile,
  PatternCompileError,
  InvalidUtf8,
  SpecialTokenInText,
  Undecomposable,
  InsufficientTokens,
  ZeroFrequency,
  WrongVariant,
  NonZeroTemperature,
  InvalidConfig,
  ProviderError,
  PersistError,
  MalformedRecord,
  EmptyInput,
  InvalidPermutation,
  ScoreOutOfRange,
  MissingLength,
};

std::string_view to_string(Errc code) noexcept;

/// Domain error raised by every tokbias module. The CLI maps it to exit 1.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace tokbias
