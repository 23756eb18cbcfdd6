#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace tokbias::base64 {

// Standard alphabet with '=' padding.
std::string encode(std::string_view bytes);

// Strict decode: canonical padding required, no whitespace, unused bits in
// the final quantum must be zero. Returns nullopt on any violation.
std::optional<std::string> decode(std::string_view text);

}  // namespace tokbias::base64
