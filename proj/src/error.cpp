#include "tokbias/error.hpp"

namespace tokbias {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::Io: return "Io";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::DuplicateRank: return "DuplicateRank";
    case Errc::DuplicateBytes: return "DuplicateBytes";
    case Errc::UnknownRank: return "UnknownRank";
    case Errc::InvalidProfile: return "InvalidProfile";
    case Errc::PatternCompileError: return "PatternCompileError";
    case Errc::InvalidUtf8: return "InvalidUtf8";
    case Errc::SpecialTokenInText: return "SpecialTokenInText";
    case Errc::Undecomposable: return "Undecomposable";
    case Errc::InsufficientTokens: return "InsufficientTokens";
    case Errc::ZeroFrequency: return "ZeroFrequency";
    case Errc::WrongVariant: return "WrongVariant";
    case Errc::NonZeroTemperature: return "NonZeroTemperature";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::ProviderError: return "ProviderError";
    case Errc::PersistError: return "PersistError";
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InvalidPermutation: return "InvalidPermutation";
    case Errc::ScoreOutOfRange: return "ScoreOutOfRange";
    case Errc::MissingLength: return "MissingLength";
  }
  return "Unknown";
}

}  // namespace tokbias
